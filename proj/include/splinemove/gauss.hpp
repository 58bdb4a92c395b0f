#pragma once

// Gauss-Legendre quadrature over the nonzero spans of a knot vector.
// A q-point rule is exact for polynomials of degree 2q-1 on each span.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "splinemove/errors.hpp"
#include "splinemove/knots.hpp"

namespace splinemove {

/// q-point Gauss-Legendre nodes/weights on [-1, 1].
inline void gauss_legendre(int q, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (q < 1) throw argument_error("gauss_legendre: need at least one point");
  nodes.resize(q);
  weights.resize(q);
  const int half = (q + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration from the Chebyshev estimate of the i-th root.
    double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= q; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // one polishing step, then stop
        p0 = 1.0; p1 = x;
        for (int j = 2; j <= q; ++j) {
          const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = q * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    nodes[i] = -x;
    nodes[q - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[q - 1 - i] = w;
  }
  if (q % 2 == 1) nodes[q / 2] = 0.0;
}

/// Per-span quadrature points and weights along one parametric direction.
struct GaussRule {
  GaussRule() = default;
  /// `q` points per nonzero span of `kv`.
  GaussRule(const KnotVector& kv, int q) {
    Eigen::VectorXd xs, ws;
    gauss_legendre(q, xs, ws);
    points_per_span = q;
    for (int span : kv.nonzero_spans()) {
      const double a = kv.knot(span), b = kv.knot(span + 1);
      span_index.push_back(span);
      for (int i = 0; i < q; ++i) {
        points.push_back(a + 0.5 * (b - a) * (xs[i] + 1.0));
        weights.push_back(0.5 * (b - a) * ws[i]);
      }
    }
  }

  int num_spans() const { return static_cast<int>(span_index.size()); }
  int num_points() const { return static_cast<int>(points.size()); }

  int points_per_span = 0;
  std::vector<int> span_index;   // knot-span index per span
  std::vector<double> points;    // flattened: span-major
  std::vector<double> weights;
};

}  // namespace splinemove
