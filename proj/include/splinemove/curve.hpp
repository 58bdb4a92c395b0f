#pragma once

// NURBS curves and the exact split/join surgery used for closed-boundary
// reparameterization. A ClosedCurve is stored clamped over [0,1] with a
// bit-equal closing control point; periodic behaviour is realized purely
// through splitting and merging, never through periodic basis arithmetic.

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "splinemove/errors.hpp"
#include "splinemove/knots.hpp"

namespace splinemove {

class Curve {
 public:
  Curve() = default;
  Curve(KnotVector kv, Eigen::MatrixXd points, Eigen::VectorXd weights)
      : kv_(std::move(kv)), pts_(std::move(points)), wts_(std::move(weights)) {
    validate();
  }
  Curve(KnotVector kv, Eigen::MatrixXd points)
      : kv_(std::move(kv)), pts_(std::move(points)) {
    wts_ = Eigen::VectorXd::Ones(pts_.rows());
    validate();
  }

  /// Straight segment reproducing the chord exactly (control points on the
  /// Greville abscissae).
  static Curve line(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                    const KnotVector& kv) {
    const auto g = kv.greville();
    Eigen::MatrixXd P(g.size(), a.size());
    for (int i = 0; i < g.size(); ++i)
      P.row(i) = ((1.0 - g[i]) * a + g[i] * b).transpose();
    return Curve(kv, std::move(P));
  }

  const KnotVector& kv() const { return kv_; }
  int degree() const { return kv_.degree(); }
  int num_points() const { return static_cast<int>(pts_.rows()); }
  int dim() const { return static_cast<int>(pts_.cols()); }
  const Eigen::MatrixXd& points() const { return pts_; }
  Eigen::MatrixXd& points() { return pts_; }
  const Eigen::VectorXd& weights() const { return wts_; }
  std::pair<double, double> domain() const { return kv_.domain(); }

  Eigen::VectorXd eval(double u) const {
    const int span = kv_.find_span(u);
    const auto N = kv_.eval_basis(span, u);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(pts_.cols());
    double w = 0.0;
    for (int j = 0; j <= degree(); ++j) {
      const int i = span - degree() + j;
      acc += N[j] * wts_[i] * pts_.row(i).transpose();
      w += N[j] * wts_[i];
    }
    return acc / w;
  }

  Eigen::VectorXd derivative(double u) const {
    const int span = kv_.find_span(u);
    const auto d = kv_.eval_basis_ders(span, u, 1);
    Eigen::VectorXd A = Eigen::VectorXd::Zero(pts_.cols());
    Eigen::VectorXd dA = Eigen::VectorXd::Zero(pts_.cols());
    double W = 0.0, dW = 0.0;
    for (int j = 0; j <= degree(); ++j) {
      const int i = span - degree() + j;
      A += d(0, j) * wts_[i] * pts_.row(i).transpose();
      dA += d(1, j) * wts_[i] * pts_.row(i).transpose();
      W += d(0, j) * wts_[i];
      dW += d(1, j) * wts_[i];
    }
    return (dA - (dW / W) * A) / W;
  }

  Eigen::VectorXd start_point() const { return pts_.row(0); }
  Eigen::VectorXd end_point() const { return pts_.row(pts_.rows() - 1); }

  Curve elevated(int t = 1) const {
    auto r = elevate_degree(kv_, homogeneous(), t);
    return from_homogeneous(std::move(r.kv), r.coefs);
  }
  Curve with_knots(const std::vector<double>& values) const {
    auto r = insert_knots(kv_, homogeneous(), values);
    return from_homogeneous(std::move(r.kv), r.coefs);
  }
  Curve refined_uniform(int times = 1) const {
    auto r = refine_uniform(kv_, homogeneous(), times);
    return from_homogeneous(std::move(r.kv), r.coefs);
  }
  /// Shift the parameter interval by `offset`; the trace is unchanged.
  Curve shifted(double offset) const {
    return Curve(remap_knots(kv_, 1.0, offset), pts_, wts_);
  }

  std::pair<Curve, Curve> split(double u) const {
    auto [l, r] = split_curve(kv_, homogeneous(), u);
    return {from_homogeneous(std::move(l.kv), l.coefs),
            from_homogeneous(std::move(r.kv), r.coefs)};
  }

  /// C^0 join of `a` followed by `b` (contiguous parameter ranges).
  static Curve join(const Curve& a, const Curve& b) {
    if ((a.end_point() - b.start_point()).norm() > 1e-12)
      throw geometry_error("Curve::join: endpoints do not coincide");
    auto r = join_curves(a.kv_, a.homogeneous(), b.kv_, b.homogeneous());
    return from_homogeneous(std::move(r.kv), r.coefs);
  }

  Eigen::MatrixXd homogeneous() const {
    Eigen::MatrixXd H(pts_.rows(), pts_.cols() + 1);
    H.leftCols(pts_.cols()) = pts_.array().colwise() * wts_.array();
    H.col(pts_.cols()) = wts_;
    return H;
  }
  static Curve from_homogeneous(KnotVector kv, const Eigen::MatrixXd& H) {
    const int d = static_cast<int>(H.cols()) - 1;
    Eigen::VectorXd w = H.col(d);
    Eigen::MatrixXd P = H.leftCols(d).array().colwise() / w.array();
    return Curve(std::move(kv), std::move(P), std::move(w));
  }

 private:
  void validate() const {
    if (pts_.rows() != kv_.size())
      throw argument_error("Curve: control count does not match knot vector");
    if (wts_.size() != pts_.rows())
      throw argument_error("Curve: weight count mismatch");
    if ((wts_.array() <= 0.0).any())
      throw argument_error("Curve: weights must be positive");
  }

  KnotVector kv_;
  Eigen::MatrixXd pts_;
  Eigen::VectorXd wts_;
};

/// Closed curve over [0,1] with marked corner parameters. The seam sits at
/// parameter 0; gamma(0) == gamma(1) with a bit-equal closing control point.
class ClosedCurve {
 public:
  ClosedCurve() = default;
  ClosedCurve(Curve curve, std::vector<double> corners)
      : curve_(std::move(curve)), corners_(std::move(corners)) {
    auto [lo, hi] = curve_.domain();
    if (lo != 0.0 || hi != 1.0)
      throw argument_error("ClosedCurve: parameter domain must be [0,1]");
    const auto& P = curve_.points();
    if ((P.row(0) - P.row(P.rows() - 1)).norm() > 1e-12)
      throw geometry_error("ClosedCurve: start and end points do not coincide");
    // enforce the bit-equal closing point
    Eigen::MatrixXd Q = curve_.points();
    Q.row(Q.rows() - 1) = Q.row(0);
    curve_ = Curve(curve_.kv(), std::move(Q), curve_.weights());
    for (double c : corners_)
      if (c < 0.0 || c >= 1.0)
        throw argument_error("ClosedCurve: corner parameters must lie in [0,1)");
  }

  /// Closed polygon through `vertices` (in order), degree 1, corners at j/n.
  static ClosedCurve polygon(const Eigen::MatrixXd& vertices) {
    const int n = static_cast<int>(vertices.rows());
    if (n < 3) throw argument_error("ClosedCurve::polygon: need at least 3 vertices");
    std::vector<double> knots;
    knots.push_back(0.0);
    std::vector<double> corners;
    for (int i = 0; i <= n; ++i) knots.push_back(static_cast<double>(i) / n);
    knots.push_back(1.0);
    Eigen::MatrixXd P(n + 1, vertices.cols());
    P.topRows(n) = vertices;
    P.row(n) = vertices.row(0);
    for (int i = 0; i < n; ++i) corners.push_back(static_cast<double>(i) / n);
    return ClosedCurve(Curve(KnotVector(1, std::move(knots)), std::move(P)),
                       std::move(corners));
  }

  const Curve& curve() const { return curve_; }
  const std::vector<double>& corners() const { return corners_; }
  Eigen::VectorXd eval(double s) const { return curve_.eval(s); }

  ClosedCurve elevated(int t = 1) const { return ClosedCurve(curve_.elevated(t), corners_); }
  ClosedCurve refined_uniform(int times = 1) const {
    return ClosedCurve(curve_.refined_uniform(times), corners_);
  }
  ClosedCurve with_knots(const std::vector<double>& values) const {
    return ClosedCurve(curve_.with_knots(values), corners_);
  }

 private:
  Curve curve_;
  std::vector<double> corners_;
};

/// Cut a closed curve at an interior parameter into the pieces [0,s0] and
/// [s0,1]; both pieces trace the original exactly.
inline std::pair<Curve, Curve> split_closed_curve(const ClosedCurve& c, double s0) {
  if (!(s0 > 0.0 && s0 < 1.0))
    throw argument_error("split_closed_curve: split parameter must be in (0,1)");
  return c.curve().split(s0);
}

/// Close up two open pieces, traversing `a` then `b`. The pieces keep their
/// parametric lengths; the result is re-anchored so `a` starts at 0.
/// Corner markers of the result are left empty (callers track them).
inline ClosedCurve merge_curves(const Curve& a, const Curve& b) {
  if (a.degree() != b.degree())
    throw argument_error("merge_curves: degree mismatch");
  const double la = a.domain().second - a.domain().first;
  const double lb = b.domain().second - b.domain().first;
  if (std::abs(la + lb - 1.0) > 1e-12)
    throw argument_error("merge_curves: piece lengths must sum to 1");
  if ((a.end_point() - b.start_point()).norm() > 1e-12 ||
      (b.end_point() - a.start_point()).norm() > 1e-12)
    throw geometry_error("merge_curves: pieces do not close up");
  const Curve as = a.shifted(-a.domain().first);
  const Curve bs = b.shifted(as.domain().second - b.domain().first);
  Curve joined = Curve::join(as, bs);
  // exact [0,1] endpoints (the shifts can leave round-off at the far end)
  joined = Curve(normalize_knots(joined.kv()), joined.points(), joined.weights());
  return ClosedCurve(std::move(joined), {});
}

/// Elevate/refine both curves into one shared spline space.
inline std::pair<Curve, Curve> make_compatible(Curve a, Curve b) {
  if (a.domain() != b.domain())
    throw argument_error("make_compatible: parameter domains differ");
  if (a.degree() < b.degree()) a = a.elevated(b.degree() - a.degree());
  if (b.degree() < a.degree()) b = b.elevated(a.degree() - b.degree());
  const auto ma = missing_knots(a.kv(), b.kv());
  if (!ma.empty()) a = a.with_knots(ma);
  const auto mb = missing_knots(b.kv(), a.kv());
  if (!mb.empty()) b = b.with_knots(mb);
  return {std::move(a), std::move(b)};
}

}  // namespace splinemove
