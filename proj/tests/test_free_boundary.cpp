#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hjb/error.hpp"
#include "hjb/free_boundary.hpp"
#include "hjb/validation.hpp"
#include "support.hpp"

using namespace hjb;
using doctest::Approx;
using test::mask_for;

namespace {

struct Solved {
  Fixture fixture;
  DomainMask mask;
  ScalarField u;
};

Solved solved(const std::string& name, double h) {
  Fixture f = make_fixture(name);
  DomainMask m = mask_for(f.problem, h);
  ScalarField u = sweep_solve(f.problem, m).solution;
  return {std::move(f), std::move(m), std::move(u)};
}

double radius(const DomainMask& m, std::size_t k) { return radius_of(m.grid().coord(k), m.grid().dim()); }

// Radius where the closed-form |f'| first exceeds 1 + delta on the last piece.
double threshold_radius(const RadialSolution& sol, double delta) {
  double lo = sol.pieces.back().t_lo, hi = sol.t_max();
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::abs(eval(sol, mid).slope) > 1 + delta ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("cone fixture is labeled eikonal") {
  const Solved s = solved("eikonal_ball", 1.0 / 64);
  const RegionLabeling L = classify_regions(s.u, s.mask, 0.05);
  CHECK(L.nodes.size() == s.mask.interior_count());
  CHECK(L.fraction(Region::Eikonal) >= 0.95);
  CHECK(L.count(Region::Eikonal) + L.count(Region::Brownian) == L.nodes.size());
  CHECK_THROWS_AS(extract_interface(classify_active_branch(s.u, s.fixture.problem, s.mask), s.mask), Error);
  try {
    extract_interface(classify_active_branch(s.u, s.fixture.problem, s.mask), s.mask);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyInterface);
  }
}

TEST_CASE("interval: eikonal exactly on a band of half-width delta") {
  // |u'| = 1 + |x|, so |u'| <= 1 + delta iff |x| <= delta.
  const double h = 1.0 / 256, delta = 0.05;
  const Solved s = solved("interval", h);
  const RegionLabeling L = classify_regions(s.u, s.mask, delta);
  for (std::size_t i = 0; i < L.nodes.size(); ++i) {
    const double x = std::abs(s.mask.grid().coord(L.nodes[i])[0]);
    if (x < delta - h) CHECK(L.labels[i] == Region::Eikonal);
    if (x > delta + h) CHECK(L.labels[i] == Region::Brownian);
  }
}

TEST_CASE("scaled ball: threshold labels split where the closed-form slope reaches 1 + delta") {
  const double h = 1.0 / 64, delta = 0.05;
  const Solved s = solved("ball_scaled", h);
  const double t_delta = threshold_radius(*s.fixture.oracle, delta);
  CHECK(t_delta == Approx((1.05 + std::sqrt(1.05 * 1.05 - 1.0)) / 2));
  const RegionLabeling L = classify_regions(s.u, s.mask, delta);
  for (std::size_t i = 0; i < L.nodes.size(); ++i) {
    const double t = radius(s.mask, L.nodes[i]);
    if (1.0 - t < 0.1) continue;
    if (L.labels[i] == Region::Eikonal) CHECK(t < t_delta + 2 * h);
    if (L.labels[i] == Region::Brownian) CHECK(t > t_delta - 2 * h);
  }
}

TEST_CASE("threshold labeling is monotone in delta") {
  const Solved s = solved("annulus_2piece", 1.0 / 32);
  const RegionLabeling a = classify_regions(s.u, s.mask, 0.02);
  const RegionLabeling b = classify_regions(s.u, s.mask, 0.2);
  for (std::size_t i = 0; i < a.nodes.size(); ++i)
    if (b.labels[i] == Region::Brownian) CHECK(a.labels[i] == Region::Brownian);
  CHECK(b.count(Region::Brownian) <= a.count(Region::Brownian));
}

TEST_CASE("delta outside its range is rejected") {
  const Solved s = solved("interval", 1.0 / 16);
  CHECK_THROWS_AS(classify_regions(s.u, s.mask, 0.0), Error);
  CHECK_THROWS_AS(classify_regions(s.u, s.mask, 0.5), Error);
  CHECK_THROWS_AS(small_gradient_measure(s.u, s.mask, 1.0), Error);
}

TEST_CASE("annulus interface within 2h of the closed form") {
  const double h = 1.0 / 64;
  const Solved s = solved("annulus_2piece", h);
  const InterfaceEstimate est = extract_interface(classify_active_branch(s.u, s.fixture.problem, s.mask), s.mask);
  REQUIRE(est.rho_hat);
  CHECK(std::abs(*est.rho_hat - s.fixture.oracle->interfaces()[0]) < 2 * h);
  CHECK(*est.spread <= 4 * h);
  for (const InterfaceCluster& c : est.clusters) CHECK(c.sharp == (c.spread <= 4 * h));
}

TEST_CASE("three-region annulus yields two sharp interfaces") {
  const double h = 1.0 / 64;
  const Solved s = solved("annulus_3piece", h);
  const InterfaceEstimate est = extract_interface(classify_active_branch(s.u, s.fixture.problem, s.mask), s.mask);
  std::vector<double> sharp;
  for (const InterfaceCluster& c : est.clusters)
    if (c.sharp) sharp.push_back(c.rho_hat);
  REQUIRE(sharp.size() == 2);
  const auto rho = s.fixture.oracle->interfaces();
  CHECK(std::abs(sharp[0] - rho[0]) < 2 * h);
  CHECK(std::abs(sharp[1] - rho[1]) < 2 * h);
}

TEST_CASE("interface cells avoid the boundary margin") {
  const double h = 1.0 / 64;
  const Solved s = solved("annulus_2piece", h);
  const RegionLabeling L = classify_active_branch(s.u, s.fixture.problem, s.mask);
  CHECK(L.rule == LabelRule::ActiveBranch);
  const InterfaceEstimate est = extract_interface(L, s.mask);
  for (const Point& x : est.cells) CHECK(distance_to_boundary(s.mask.domain(), x, 2) >= 4 * h - h / 2);
  const InterfaceEstimate wide = extract_interface(L, s.mask, 0.0);
  CHECK(wide.cells.size() >= est.cells.size());
}

TEST_CASE("gradient jumps vanish on affine data") {
  const DomainMask m = mask_for(Box{{2.0, 2.0, 0}}, 2, 1.0 / 16);
  const ScalarField u = sample(m, [](const Point& x) { return 1.0 + 0.3 * x[0] - 0.2 * x[1]; });
  const GradientModulusJumps j = gradient_modulus_diagnostic(u, m);
  CHECK(j.pairs > 0);
  CHECK(j.jump_gradnorm < 1e-12);
  CHECK(j.jump_gradnorm_central < 1e-12);
  CHECK(j.jump_gradvec < 1e-12);
}

TEST_CASE("cone: modulus jump is O(h) while the vector jumps at the apex") {
  for (double h : {1.0 / 32, 1.0 / 64}) {
    const Solved s = solved("eikonal_ball", h);
    const GradientModulusJumps j = gradient_modulus_diagnostic(s.u, s.mask);
    CHECK(j.jump_gradnorm < h);
    CHECK(j.jump_gradvec > 0.5);
  }
}

TEST_CASE("small-gradient measure") {
  const DomainMask m = mask_for(Ball{1.0}, 2, 1.0 / 16);
  CHECK(small_gradient_measure(ScalarField(m.grid(), 0.0), m) == 1.0);
  const Solved s = solved("interval", 1.0 / 256);
  CHECK(small_gradient_measure(s.u, s.mask, 0.05) < 0.02);
}
