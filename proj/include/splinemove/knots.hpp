#pragma once

// Univariate B-spline machinery: clamped knot vectors, Cox-de Boor basis
// evaluation, and the exact knot-surgery operations (insertion, uniform
// refinement, degree elevation, splitting, joining). The surgery routines
// act on a coefficient matrix whose rows are control values, so the same
// code serves curves (rows = control points, possibly homogeneous) and
// tensor-product patches (rows = pencils of a coefficient tensor).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "splinemove/errors.hpp"

namespace splinemove {

/// Clamped (open) knot vector of a fixed degree.
///
/// Invariants: knots are non-decreasing, both ends have multiplicity
/// degree+1, interior multiplicities never exceed the degree, and there is
/// at least one basis function beyond the Bezier minimum (n >= p+1).
class KnotVector {
 public:
  KnotVector() = default;
  KnotVector(int degree, std::vector<double> knots)
      : p_(degree), knots_(std::move(knots)) {
    validate();
  }

  /// Uniformly spaced clamped knot vector with `spans` nonzero spans on [a,b].
  static KnotVector clamped_uniform(int degree, int spans, double a = 0.0,
                                    double b = 1.0) {
    if (degree < 1 || spans < 1 || !(a < b))
      throw argument_error("clamped_uniform: bad degree/span arguments");
    std::vector<double> t;
    t.reserve(spans + 1 + 2 * degree);
    for (int i = 0; i <= degree; ++i) t.push_back(a);
    for (int i = 1; i < spans; ++i)
      t.push_back(a + (b - a) * static_cast<double>(i) / spans);
    for (int i = 0; i <= degree; ++i) t.push_back(b);
    return KnotVector(degree, std::move(t));
  }

  int degree() const { return p_; }
  int num_knots() const { return static_cast<int>(knots_.size()); }
  /// Number of basis functions.
  int size() const { return num_knots() - p_ - 1; }
  const std::vector<double>& knots() const { return knots_; }
  double knot(int i) const { return knots_[static_cast<size_t>(i)]; }
  std::pair<double, double> domain() const {
    return {knots_[static_cast<size_t>(p_)],
            knots_[knots_.size() - 1 - static_cast<size_t>(p_)]};
  }

  bool operator==(const KnotVector& o) const {
    return p_ == o.p_ && knots_ == o.knots_;
  }

  /// Index of the knot span containing u. The right end of the domain maps
  /// to the last nonzero span, so evaluation at the closing knot is valid.
  int find_span(double u) const {
    auto [lo, hi] = domain();
    if (!(u >= lo && u <= hi))
      throw argument_error("find_span: parameter outside knot range");
    const int n = size();
    if (u >= knots_[static_cast<size_t>(n)]) return n - 1;  // end convention
    // binary search for t_k <= u < t_{k+1}
    int low = p_, high = n;
    int mid = (low + high) / 2;
    while (u < knots_[static_cast<size_t>(mid)] ||
           u >= knots_[static_cast<size_t>(mid + 1)]) {
      if (u < knots_[static_cast<size_t>(mid)])
        high = mid;
      else
        low = mid;
      mid = (low + high) / 2;
    }
    return mid;
  }

  /// The p+1 basis values N_{span-p..span}(u); they sum to one.
  Eigen::VectorXd eval_basis(int span, double u) const {
    Eigen::VectorXd N(p_ + 1);
    std::vector<double> left(p_ + 1), right(p_ + 1);
    N[0] = 1.0;
    for (int j = 1; j <= p_; ++j) {
      left[j] = u - knots_[static_cast<size_t>(span + 1 - j)];
      right[j] = knots_[static_cast<size_t>(span + j)] - u;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        const double temp = N[r] / (right[r + 1] + left[j - r]);
        N[r] = saved + right[r + 1] * temp;
        saved = left[j - r] * temp;
      }
      N[j] = saved;
    }
    return N;
  }

  /// Rows 0..k of derivatives of the active basis functions at u
  /// (row 0 = values). Requires k <= degree.
  Eigen::MatrixXd eval_basis_ders(int span, double u, int k) const {
    if (k < 0 || k > p_)
      throw argument_error("eval_basis_ders: derivative order must be in [0, degree]");
    Eigen::MatrixXd ders(k + 1, p_ + 1);
    // ndu holds basis functions and knot differences (The NURBS Book, A2.3).
    Eigen::MatrixXd ndu(p_ + 1, p_ + 1);
    std::vector<double> left(p_ + 1), right(p_ + 1);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p_; ++j) {
      left[j] = u - knots_[static_cast<size_t>(span + 1 - j)];
      right[j] = knots_[static_cast<size_t>(span + j)] - u;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        ndu(j, r) = right[r + 1] + left[j - r];
        const double temp = ndu(r, j - 1) / ndu(j, r);
        ndu(r, j) = saved + right[r + 1] * temp;
        saved = left[j - r] * temp;
      }
      ndu(j, j) = saved;
    }
    for (int j = 0; j <= p_; ++j) ders(0, j) = ndu(j, p_);
    Eigen::MatrixXd a(2, p_ + 1);
    for (int r = 0; r <= p_; ++r) {
      int s1 = 0, s2 = 1;
      a(0, 0) = 1.0;
      for (int kk = 1; kk <= k; ++kk) {
        double d = 0.0;
        const int rk = r - kk, pk = p_ - kk;
        if (r >= kk) {
          a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
          d = a(s2, 0) * ndu(rk, pk);
        }
        const int j1 = (rk >= -1) ? 1 : -rk;
        const int j2 = (r - 1 <= pk) ? kk - 1 : p_ - r;
        for (int j = j1; j <= j2; ++j) {
          a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
          d += a(s2, j) * ndu(rk + j, pk);
        }
        if (r <= pk) {
          a(s2, kk) = -a(s1, kk - 1) / ndu(pk + 1, r);
          d += a(s2, kk) * ndu(r, pk);
        }
        ders(kk, r) = d;
        std::swap(s1, s2);
      }
    }
    double fac = p_;
    for (int kk = 1; kk <= k; ++kk) {
      for (int j = 0; j <= p_; ++j) ders(kk, j) *= fac;
      fac *= (p_ - kk);
    }
    return ders;
  }

  /// Greville abscissae (knot averages); there is one per basis function.
  Eigen::VectorXd greville() const {
    const int n = size();
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 1; j <= p_; ++j) s += knots_[static_cast<size_t>(i + j)];
      g[i] = s / p_;
    }
    return g;
  }

  /// Span indices of the nonzero spans, in increasing order.
  std::vector<int> nonzero_spans() const {
    std::vector<int> spans;
    const int n = size();
    for (int i = p_; i < n; ++i)
      if (knots_[static_cast<size_t>(i + 1)] > knots_[static_cast<size_t>(i)])
        spans.push_back(i);
    return spans;
  }

  /// Distinct knot values with multiplicities.
  std::vector<std::pair<double, int>> unique_knots() const {
    std::vector<std::pair<double, int>> u;
    for (double t : knots_) {
      if (u.empty() || u.back().first != t)
        u.emplace_back(t, 1);
      else
        u.back().second += 1;
    }
    return u;
  }

  int multiplicity(double u) const {
    int m = 0;
    for (double t : knots_)
      if (t == u) ++m;
    return m;
  }

 private:
  void validate() const {
    if (p_ < 1) throw argument_error("KnotVector: degree must be >= 1");
    const int m = num_knots();
    if (m < 2 * (p_ + 1))
      throw argument_error("KnotVector: too few knots for a clamped vector");
    for (int i = 0; i + 1 < m; ++i)
      if (knots_[static_cast<size_t>(i)] > knots_[static_cast<size_t>(i + 1)])
        throw argument_error("KnotVector: knots must be non-decreasing");
    const double a = knots_.front(), b = knots_.back();
    for (int i = 0; i <= p_; ++i)
      if (knots_[static_cast<size_t>(i)] != a ||
          knots_[knots_.size() - 1 - static_cast<size_t>(i)] != b)
        throw argument_error("KnotVector: ends must have multiplicity degree+1");
    // interior multiplicity must leave at least C^0 continuity
    auto uk = unique_knots();
    for (size_t i = 1; i + 1 < uk.size(); ++i)
      if (uk[i].second > p_)
        throw argument_error("KnotVector: interior multiplicity exceeds degree");
    if (size() < p_ + 1)
      throw argument_error("KnotVector: fewer basis functions than degree+1");
  }

  int p_ = 0;
  std::vector<double> knots_;
};

// ---------------------------------------------------------------------------
// Knot surgery on (KnotVector, coefficient-rows) pairs. All operations are
// geometrically exact: they reproduce the original spline on its domain.

struct CurveData {
  KnotVector kv;
  Eigen::MatrixXd coefs;  // one control value per row
};

/// Insert `u` into the knot vector `times` times (Boehm's algorithm).
inline CurveData insert_knot(const KnotVector& kv, const Eigen::MatrixXd& C,
                             double u, int times) {
  const int p = kv.degree();
  auto [lo, hi] = kv.domain();
  if (!(u > lo && u < hi))
    throw argument_error("insert_knot: knot outside the open parameter domain");
  const int s = kv.multiplicity(u);
  if (times < 1 || s + times > p)
    throw argument_error("insert_knot: resulting multiplicity would exceed degree");
  const int k = kv.find_span(u);
  const int n = kv.size();
  const int cols = static_cast<int>(C.cols());

  std::vector<double> nk = kv.knots();
  nk.insert(nk.begin() + k + 1, static_cast<size_t>(times), u);

  Eigen::MatrixXd Q(n + times, cols);
  Q.topRows(k - p + 1) = C.topRows(k - p + 1);
  Q.bottomRows(n - k + s) = C.bottomRows(n - k + s);
  Eigen::MatrixXd R = C.middleRows(k - p, p - s + 1);
  for (int j = 1; j <= times; ++j) {
    const int L = k - p + j;
    for (int i = 0; i <= p - j - s; ++i) {
      const double alpha = (u - kv.knot(L + i)) / (kv.knot(i + k + 1) - kv.knot(L + i));
      R.row(i) = alpha * R.row(i + 1) + (1.0 - alpha) * R.row(i);
    }
    Q.row(L) = R.row(0);
    Q.row(k + times - j - s) = R.row(p - j - s);
  }
  for (int i = 1; i < p - s - times; ++i) Q.row(k - p + times + i) = R.row(i);
  return {KnotVector(p, std::move(nk)), std::move(Q)};
}

/// Insert every value of `values` (ascending, with multiplicities) that the
/// vector does not already contain.
inline CurveData insert_knots(KnotVector kv, Eigen::MatrixXd C,
                              const std::vector<double>& values) {
  // group consecutive equal values so each distinct knot is inserted once
  size_t i = 0;
  while (i < values.size()) {
    size_t j = i;
    while (j + 1 < values.size() && values[j + 1] == values[i]) ++j;
    const int want = static_cast<int>(j - i + 1);
    const int have = kv.multiplicity(values[i]);
    if (want > have) {
      auto r = insert_knot(kv, C, values[i], want - have);
      kv = std::move(r.kv);
      C = std::move(r.coefs);
    }
    i = j + 1;
  }
  return {std::move(kv), std::move(C)};
}

/// Split every nonzero span at its midpoint, `times` times.
inline CurveData refine_uniform(KnotVector kv, Eigen::MatrixXd C, int times = 1) {
  for (int r = 0; r < times; ++r) {
    std::vector<double> mids;
    auto uk = kv.unique_knots();
    for (size_t i = 0; i + 1 < uk.size(); ++i)
      mids.push_back(0.5 * (uk[i].first + uk[i + 1].first));
    auto res = insert_knots(std::move(kv), std::move(C), mids);
    kv = std::move(res.kv);
    C = std::move(res.coefs);
  }
  return {std::move(kv), std::move(C)};
}

namespace detail {
inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace detail

/// Raise the degree by `t` without changing the curve (The NURBS Book, A5.9).
inline CurveData elevate_degree(const KnotVector& kv, const Eigen::MatrixXd& C,
                                int t) {
  if (t < 1) throw argument_error("elevate_degree: t must be >= 1");
  const int p = kv.degree();
  const int cols = static_cast<int>(C.cols());
  const int n = kv.size() - 1;          // highest control index
  const int m = n + p + 1;              // highest knot index
  const std::vector<double>& U = kv.knots();
  const int ph = p + t, ph2 = ph / 2;

  // Bezier degree-elevation coefficients.
  Eigen::MatrixXd bezalfs = Eigen::MatrixXd::Zero(ph + 1, p + 1);
  bezalfs(0, 0) = bezalfs(ph, p) = 1.0;
  for (int i = 1; i <= ph2; ++i) {
    const double inv = 1.0 / detail::binom(ph, i);
    const int mpi = std::min(p, i);
    for (int j = std::max(0, i - t); j <= mpi; ++j)
      bezalfs(i, j) = inv * detail::binom(p, j) * detail::binom(t, i - j);
  }
  for (int i = ph2 + 1; i <= ph - 1; ++i) {
    const int mpi = std::min(p, i);
    for (int j = std::max(0, i - t); j <= mpi; ++j)
      bezalfs(i, j) = bezalfs(ph - i, p - j);
  }

  const int new_n_bound = kv.size() + t * (static_cast<int>(kv.unique_knots().size()));
  Eigen::MatrixXd Q(new_n_bound + ph + 2, cols);
  std::vector<double> Uh(static_cast<size_t>(new_n_bound + 2 * (ph + 1)), 0.0);
  Eigen::MatrixXd bpts(p + 1, cols), ebpts(ph + 1, cols), Nextbpts(p - 1 > 0 ? p - 1 : 1, cols);
  std::vector<double> alfs(p > 0 ? p : 1);

  int mh = ph, kind = ph + 1, r = -1, a = p, b = p + 1, cind = 1;
  double ua = U[0];
  Q.row(0) = C.row(0);
  for (int i = 0; i <= ph; ++i) Uh[static_cast<size_t>(i)] = ua;
  for (int i = 0; i <= p; ++i) bpts.row(i) = C.row(i);

  while (b < m) {
    const int i0 = b;
    while (b < m && U[static_cast<size_t>(b)] == U[static_cast<size_t>(b + 1)]) ++b;
    const int mul = b - i0 + 1;
    mh += mul + t;
    const double ub = U[static_cast<size_t>(b)];
    const int oldr = r;
    r = p - mul;
    const int lbz = (oldr > 0) ? (oldr + 2) / 2 : 1;
    const int rbz = (r > 0) ? ph - (r + 1) / 2 : ph;
    if (r > 0) {
      const double numer = ub - ua;
      for (int k = p; k > mul; --k)
        alfs[static_cast<size_t>(k - mul - 1)] =
            numer / (U[static_cast<size_t>(a + k)] - ua);
      for (int j = 1; j <= r; ++j) {
        const int save = r - j, s = mul + j;
        for (int k = p; k >= s; --k)
          bpts.row(k) = alfs[static_cast<size_t>(k - s)] * bpts.row(k) +
                        (1.0 - alfs[static_cast<size_t>(k - s)]) * bpts.row(k - 1);
        Nextbpts.row(save) = bpts.row(p);
      }
    }
    for (int i = lbz; i <= ph; ++i) {
      ebpts.row(i).setZero();
      const int mpi = std::min(p, i);
      for (int j = std::max(0, i - t); j <= mpi; ++j)
        ebpts.row(i) += bezalfs(i, j) * bpts.row(j);
    }
    if (oldr > 1) {
      int first = kind - 2, last = kind;
      const double den = ub - ua;
      const double bet = (ub - Uh[static_cast<size_t>(kind - 1)]) / den;
      for (int tr = 1; tr < oldr; ++tr) {
        int i = first, j = last, kj = j - kind + 1;
        while (j - i > tr) {
          if (i < cind) {
            const double alf = (ub - Uh[static_cast<size_t>(i)]) /
                               (ua - Uh[static_cast<size_t>(i)]);
            Q.row(i) = alf * Q.row(i) + (1.0 - alf) * Q.row(i - 1);
          }
          if (j >= lbz) {
            if (j - tr <= kind - ph + oldr) {
              const double gam = (ub - Uh[static_cast<size_t>(j - tr)]) / den;
              ebpts.row(kj) = gam * ebpts.row(kj) + (1.0 - gam) * ebpts.row(kj + 1);
            } else {
              ebpts.row(kj) = bet * ebpts.row(kj) + (1.0 - bet) * ebpts.row(kj + 1);
            }
          }
          ++i; --j; --kj;
        }
        --first; ++last;
      }
    }
    if (a != p) {
      for (int i = 0; i < ph - oldr; ++i) {
        Uh[static_cast<size_t>(kind)] = ua;
        ++kind;
      }
    }
    for (int j = lbz; j <= rbz; ++j) {
      Q.row(cind) = ebpts.row(j);
      ++cind;
    }
    if (b < m) {
      for (int j = 0; j < r; ++j) bpts.row(j) = Nextbpts.row(j);
      for (int j = r; j <= p; ++j) bpts.row(j) = C.row(b - p + j);
      a = b; ++b; ua = ub;
    } else {
      for (int i = 0; i <= ph; ++i) Uh[static_cast<size_t>(kind + i)] = ub;
    }
  }

  const int nh = mh - ph - 1;  // highest new control index
  Uh.resize(static_cast<size_t>(mh + 1));
  Eigen::MatrixXd Qout = Q.topRows(nh + 1);
  return {KnotVector(ph, std::move(Uh)), std::move(Qout)};
}

/// Split a clamped curve at `u` into two clamped pieces covering
/// [lo, u] and [u, hi]. Exact: both pieces trace the original curve.
inline std::pair<CurveData, CurveData> split_curve(const KnotVector& kv,
                                                   const Eigen::MatrixXd& C,
                                                   double u) {
  const int p = kv.degree();
  auto [lo, hi] = kv.domain();
  if (!(u > lo && u < hi))
    throw argument_error("split_curve: split parameter must be interior");
  KnotVector k2 = kv;
  Eigen::MatrixXd C2 = C;
  const int have = kv.multiplicity(u);
  if (have < p) {
    auto r = insert_knot(k2, C2, u, p - have);
    k2 = std::move(r.kv);
    C2 = std::move(r.coefs);
  }
  const std::vector<double>& T = k2.knots();
  // first index of the run of u's
  int f = 0;
  while (T[static_cast<size_t>(f)] != u) ++f;
  const int n = k2.size();

  std::vector<double> lk(T.begin(), T.begin() + f + p);
  lk.push_back(u);  // clamp the right end of the left piece
  Eigen::MatrixXd lc = C2.topRows(f);

  std::vector<double> rk;
  rk.reserve(static_cast<size_t>(p + 1) + T.size() - static_cast<size_t>(f + p));
  for (int i = 0; i <= p; ++i) rk.push_back(u);
  rk.insert(rk.end(), T.begin() + f + p, T.end());
  Eigen::MatrixXd rc = C2.bottomRows(n - f + 1);

  return {CurveData{KnotVector(p, std::move(lk)), std::move(lc)},
          CurveData{KnotVector(p, std::move(rk)), std::move(rc)}};
}

/// Join two clamped curves end-to-start with a C^0 junction. The shared
/// endpoint control values must agree; the left piece's value wins.
inline CurveData join_curves(const KnotVector& ka, const Eigen::MatrixXd& Ca,
                             const KnotVector& kb, const Eigen::MatrixXd& Cb,
                             double tol = 1e-12) {
  const int p = ka.degree();
  if (p != kb.degree())
    throw argument_error("join_curves: degree mismatch");
  // the junction parameter is taken from the left piece; a one-ulp gap from
  // shifted knots is tolerated
  if (std::abs(ka.domain().second - kb.domain().first) > tol)
    throw argument_error("join_curves: parameter ranges must be contiguous");
  if ((Ca.bottomRows(1) - Cb.topRows(1)).norm() > tol)
    throw geometry_error("join_curves: endpoint control values do not match");
  const double u = ka.domain().second;
  std::vector<double> nk(ka.knots().begin(), ka.knots().end() - (p + 1));
  for (int i = 0; i < p; ++i) nk.push_back(u);
  nk.insert(nk.end(), kb.knots().begin() + (p + 1), kb.knots().end());
  Eigen::MatrixXd C(Ca.rows() + Cb.rows() - 1, Ca.cols());
  C.topRows(Ca.rows()) = Ca;
  C.bottomRows(Cb.rows() - 1) = Cb.bottomRows(Cb.rows() - 1);
  return {KnotVector(p, std::move(nk)), std::move(C)};
}

/// Affinely remap the knot values; the traced curve is unchanged, only the
/// parameterization shifts.
inline KnotVector remap_knots(const KnotVector& kv, double scale, double offset) {
  if (!(scale > 0.0)) throw argument_error("remap_knots: scale must be positive");
  std::vector<double> t = kv.knots();
  for (double& v : t) v = scale * v + offset;
  return KnotVector(kv.degree(), std::move(t));
}

/// Remap the knot values onto [0,1] with exact endpoints.
inline KnotVector normalize_knots(const KnotVector& kv) {
  auto [lo, hi] = kv.domain();
  std::vector<double> t = kv.knots();
  for (double& v : t) v = (v - lo) / (hi - lo);
  return KnotVector(kv.degree(), std::move(t));
}

/// Values (with multiplicity) present in `b` but missing from `a`;
/// inserting them into `a` embeds `a`'s spline space into the union space.
inline std::vector<double> missing_knots(const KnotVector& a, const KnotVector& b) {
  std::vector<double> out;
  for (auto [v, mult] : b.unique_knots()) {
    auto [lo, hi] = a.domain();
    if (v <= lo || v >= hi) continue;
    const int have = a.multiplicity(v);
    const int want = std::min(mult, a.degree());
    for (int i = have; i < want; ++i) out.push_back(v);
  }
  return out;
}

}  // namespace splinemove
