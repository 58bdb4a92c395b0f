#include <catch2/catch_amalgamated.hpp>

#include <splinemove/patch.hpp>

#include "oracles.hpp"

using namespace splinemove;

namespace {

// Naive evaluator summing over the full control net with recursively
// computed basis values; no span logic shared with the implementation.
Eigen::Vector2d eval_full_sum(const TensorPatch& p, double u, double v) {
  const auto& k1 = p.kv(0);
  const auto& k2 = p.kv(1);
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  double wsum = 0.0;
  int r = 0;
  for (int j = 0; j < k2.size(); ++j)
    for (int i = 0; i < k1.size(); ++i, ++r) {
      const double b = oracles::coxdeboor(i, k1.degree(), k1.knots(), u, 1.0) *
                       oracles::coxdeboor(j, k2.degree(), k2.knots(), v, 1.0);
      acc += b * p.weights()[r] * Eigen::Vector2d(p.points()(r, 0), p.points()(r, 1));
      wsum += b * p.weights()[r];
    }
  return acc / wsum;
}

TensorPatch random_patch(int p, int spans, bool rational = false) {
  auto k1 = KnotVector::clamped_uniform(p, spans);
  auto k2 = KnotVector::clamped_uniform(p, spans);
  TensorPatch base = TensorPatch::rectangle(k1, k2, 0, 0, 1, 1);
  Eigen::MatrixXd P = base.points();
  for (int r = 0; r < P.rows(); ++r) {
    P(r, 0) += oracles::uniform(-0.05, 0.05);
    P(r, 1) += oracles::uniform(-0.05, 0.05);
  }
  Eigen::VectorXd W = Eigen::VectorXd::Ones(P.rows());
  if (rational)
    for (int r = 0; r < W.size(); ++r) W[r] = oracles::uniform(0.5, 2.0);
  return TensorPatch({k1, k2}, P, W);
}

}  // namespace

TEST_CASE("identity patch reproduces parameters", "[patch]") {
  auto k = KnotVector::clamped_uniform(2, 4);
  auto patch = TensorPatch::rectangle(k, k, 0, 0, 1, 1);
  const auto f = patch.eval({0.3, 0.7});
  CHECK(f[0] == Catch::Approx(0.3).margin(1e-14));
  CHECK(f[1] == Catch::Approx(0.7).margin(1e-14));
  // corners interpolate
  const auto c = patch.eval({1.0, 1.0});
  CHECK(c[0] == Catch::Approx(1.0).margin(1e-15));
  CHECK(c[1] == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("patch evaluation matches the full-sum oracle", "[patch]") {
  for (int p = 1; p <= 3; ++p) {
    auto patch = random_patch(p, 3, p == 2);  // include one rational case
    for (int rep = 0; rep < 60; ++rep) {
      const double u = oracles::uniform(0.0, 1.0), v = oracles::uniform(0.0, 1.0);
      const auto f = patch.eval({u, v});
      const auto ref = eval_full_sum(patch, u, v);
      CHECK((Eigen::Vector2d(f[0], f[1]) - ref).norm() < 1e-12);
    }
  }
}

TEST_CASE("jacobian of affine patches", "[patch]") {
  auto k = KnotVector::clamped_uniform(2, 3);
  auto ident = TensorPatch::rectangle(k, k, 0, 0, 1, 1);
  const auto J = ident.jacobian({0.37, 0.81});
  CHECK((J - Eigen::Matrix2d::Identity()).norm() < 1e-13);

  auto scaled = TensorPatch::rectangle(k, k, 0, 0, 2, 3);
  const auto Js = scaled.jacobian({0.5, 0.25});
  Eigen::Matrix2d expect;
  expect << 2, 0, 0, 3;
  CHECK((Js - expect).norm() < 1e-13);
}

TEST_CASE("jacobian matches finite differences", "[patch]") {
  auto patch = random_patch(3, 3, true);
  for (int rep = 0; rep < 40; ++rep) {
    const double u = oracles::uniform(0.01, 0.99), v = oracles::uniform(0.01, 0.99);
    const auto J = patch.jacobian({u, v});
    const double h = 1e-6;
    const Eigen::VectorXd du = (patch.eval({u + h, v}) - patch.eval({u - h, v})) / (2 * h);
    const Eigen::VectorXd dv = (patch.eval({u, v + h}) - patch.eval({u, v - h})) / (2 * h);
    CHECK((J.col(0) - du).norm() < 1e-6);
    CHECK((J.col(1) - dv).norm() < 1e-6);
  }
}

TEST_CASE("second derivatives match finite differences of the jacobian", "[patch]") {
  auto patch = random_patch(3, 2, false);
  for (int rep = 0; rep < 20; ++rep) {
    const double u = oracles::uniform(0.05, 0.95), v = oracles::uniform(0.05, 0.95);
    const auto H = patch.second_derivatives({u, v});
    const double h = 1e-5;
    const Eigen::MatrixXd Ju1 = patch.jacobian({u + h, v});
    const Eigen::MatrixXd Ju0 = patch.jacobian({u - h, v});
    const Eigen::MatrixXd Jv1 = patch.jacobian({u, v + h});
    const Eigen::MatrixXd Jv0 = patch.jacobian({u, v - h});
    for (int c = 0; c < 2; ++c) {
      CHECK(H[c](0, 0) == Catch::Approx((Ju1(c, 0) - Ju0(c, 0)) / (2 * h)).margin(2e-5));
      CHECK(H[c](0, 1) == Catch::Approx((Jv1(c, 0) - Jv0(c, 0)) / (2 * h)).margin(2e-5));
      CHECK(H[c](1, 1) == Catch::Approx((Jv1(c, 1) - Jv0(c, 1)) / (2 * h)).margin(2e-5));
      CHECK(H[c](0, 1) == Catch::Approx(H[c](1, 0)).margin(1e-14));
    }
  }
}

TEST_CASE("refinement and elevation leave the geometry invariant", "[patch]") {
  auto patch = random_patch(2, 2, true);
  auto refined = patch.refined_uniform(1);
  auto elevated = patch.elevated(1);
  auto both = patch.elevated(1).refined_uniform(2);
  for (int rep = 0; rep < 100; ++rep) {
    const double u = oracles::uniform(0.0, 1.0), v = oracles::uniform(0.0, 1.0);
    const auto f = patch.eval({u, v});
    CHECK((refined.eval({u, v}) - f).norm() < 1e-12);
    CHECK((elevated.eval({u, v}) - f).norm() < 1e-12);
    CHECK((both.eval({u, v}) - f).norm() < 1e-12);
  }
  // one uniform refinement splits every span in both directions
  CHECK(refined.kv(0).nonzero_spans().size() == 2 * patch.kv(0).nonzero_spans().size());
  CHECK(refined.kv(1).nonzero_spans().size() == 2 * patch.kv(1).nonzero_spans().size());
  CHECK(elevated.kv(0).degree() == patch.kv(0).degree() + 1);
}

TEST_CASE("split is exact and renormalizes cleanly", "[patch]") {
  auto patch = random_patch(2, 3, false);
  const double cut = 0.47;
  auto [left, right] = patch.split(0, cut);
  for (int rep = 0; rep < 60; ++rep) {
    const double v = oracles::uniform(0.0, 1.0);
    const double ul = oracles::uniform(0.0, cut);
    const double ur = oracles::uniform(cut, 1.0);
    CHECK((left.eval({ul, v}) - patch.eval({ul, v})).norm() < 1e-12);
    CHECK((right.eval({ur, v}) - patch.eval({ur, v})).norm() < 1e-12);
  }
  auto norm_right = right.normalized();
  CHECK(norm_right.kv(0).domain().first == 0.0);
  CHECK(norm_right.kv(0).domain().second == 1.0);
  // normalization only reparameterizes
  CHECK((norm_right.eval({0.5, 0.5}) -
         right.eval({cut + 0.5 * (1.0 - cut), 0.5})).norm() < 1e-12);
}

TEST_CASE("insertion outside the domain is rejected", "[patch]") {
  auto patch = random_patch(2, 2, false);
  CHECK_THROWS_AS(patch.with_inserted_knots(0, {1.5}), argument_error);
  CHECK_THROWS_AS(patch.with_inserted_knots(1, {-0.1}), argument_error);
}

TEST_CASE("boundary classification and faces", "[patch]") {
  auto k = KnotVector::clamped_uniform(2, 2);
  auto patch = TensorPatch::rectangle(k, k, 0, 0, 1, 1);  // 4x4 net
  CHECK(patch.boundary_indices().size() == 12);
  CHECK(patch.interior_indices().size() == 4);
  const auto west = patch.face_indices(0, 0);
  REQUIRE(west.size() == 4);
  for (int idx : west) CHECK(patch.indexer().unflat(idx)[0] == 0);
  const auto north = patch.face_indices(1, 1);
  for (int idx : north) CHECK(patch.indexer().unflat(idx)[1] == 3);
}

TEST_CASE("rational patch traces an exact circular arc", "[patch]") {
  // quarter ring r in [1,2]: quadratic arc with midpoint weight 1/sqrt(2)
  KnotVector arc(2, {0, 0, 0, 1, 1, 1});
  KnotVector lin(1, {0, 0, 1, 1});
  Eigen::MatrixXd P(6, 2);
  P << 1, 0, 1, 1, 0, 1,   // inner arc
       2, 0, 2, 2, 0, 2;   // outer arc
  Eigen::VectorXd W(6);
  const double s = std::sqrt(0.5);
  W << 1, s, 1, 1, s, 1;
  TensorPatch ring({arc, lin}, P, W);
  for (int rep = 0; rep < 30; ++rep) {
    const double u = oracles::uniform(0.0, 1.0), v = oracles::uniform(0.0, 1.0);
    const auto f = ring.eval({u, v});
    const double r = std::hypot(f[0], f[1]);
    CHECK(r == Catch::Approx(1.0 + v).margin(1e-13));
  }
}

TEST_CASE("content hash distinguishes patches", "[patch]") {
  auto a = random_patch(2, 2, false);
  auto b = a;
  CHECK(a.content_hash() == b.content_hash());
  Eigen::MatrixXd P = a.points();
  P(5, 0) += 1e-16;  // any bit flip changes the hash
  if (P(5, 0) != a.points()(5, 0)) {
    TensorPatch c({a.kv(0), a.kv(1)}, P, a.weights());
    CHECK(c.content_hash() != a.content_hash());
  }
}
