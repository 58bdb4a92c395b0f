#pragma once

// Independent reference implementations used to validate the library.
// Everything here is written from first principles (textbook definitions,
// finite differences, dense sampling) and deliberately shares no code with
// the implementation under test.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

/// Linear scan for the knot span containing u (end convention: the closing
/// knot belongs to the last nonzero span).
inline int find_span_linear(int degree, const std::vector<double>& knots, double u) {
  const int n = static_cast<int>(knots.size()) - degree - 1;
  if (u >= knots[static_cast<size_t>(n)]) {
    // walk left from the end clamp to the last nonzero span
    int s = n - 1;
    while (knots[static_cast<size_t>(s + 1)] <= knots[static_cast<size_t>(s)]) --s;
    return s;
  }
  for (int i = degree; i < n; ++i)
    if (u >= knots[static_cast<size_t>(i)] && u < knots[static_cast<size_t>(i + 1)])
      return i;
  return -1;
}

/// Textbook recursive Cox-de Boor definition of a single basis function.
inline double coxdeboor(int i, int p, const std::vector<double>& knots, double u,
                        double domain_end) {
  if (p == 0) {
    // half-open spans, closed at the domain end
    const double a = knots[static_cast<size_t>(i)], b = knots[static_cast<size_t>(i + 1)];
    if (u >= a && u < b) return 1.0;
    if (u == domain_end && u == b && a < b) return 1.0;
    return 0.0;
  }
  double left = 0.0, right = 0.0;
  const double da = knots[static_cast<size_t>(i + p)] - knots[static_cast<size_t>(i)];
  if (da > 0.0) left = (u - knots[static_cast<size_t>(i)]) / da * coxdeboor(i, p - 1, knots, u, domain_end);
  const double db = knots[static_cast<size_t>(i + p + 1)] - knots[static_cast<size_t>(i + 1)];
  if (db > 0.0)
    right = (knots[static_cast<size_t>(i + p + 1)] - u) / db * coxdeboor(i + 1, p - 1, knots, u, domain_end);
  return left + right;
}

/// Central finite difference of a scalar -> vector function.
inline Eigen::VectorXd central_diff(const std::function<Eigen::VectorXd(double)>& f,
                                    double u, double h) {
  return (f(u + h) - f(u - h)) / (2.0 * h);
}

/// Deterministic RNG helpers for property tests.
inline std::mt19937& rng() {
  static std::mt19937 gen(0x5eed);
  return gen;
}
inline double uniform(double a, double b) {
  std::uniform_real_distribution<double> d(a, b);
  return d(rng());
}

/// Random clamped knot vector (degree p, a few interior knots, domain [0,1]).
inline std::vector<double> random_clamped_knots(int p, int interior) {
  std::vector<double> t;
  for (int i = 0; i <= p; ++i) t.push_back(0.0);
  std::vector<double> inner;
  for (int i = 0; i < interior; ++i) inner.push_back(uniform(0.05, 0.95));
  std::sort(inner.begin(), inner.end());
  // drop near-coincident interior knots to respect multiplicity limits
  for (size_t i = 0; i < inner.size(); ++i)
    if (i == 0 || inner[i] - inner[i - 1] > 1e-3) t.push_back(inner[i]);
  for (int i = 0; i <= p; ++i) t.push_back(1.0);
  return t;
}

}  // namespace oracles
