#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hjb/free_boundary.hpp"
#include "hjb/hjb_solver.hpp"
#include "hjb/validation.hpp"
#include "support.hpp"

using namespace hjb;
using test::mask_for;

namespace {

constexpr double kTol = 1e-10;

ScalarField random_boundary(const DomainMask& m, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> U(0.0, scale);
  ScalarField g(m.grid(), 0.0);
  for (std::size_t k : m.boundary_nodes()) g[k] = U(rng);
  return g;
}

double max_interior_gap(const ScalarField& a, const ScalarField& b, const DomainMask& m) {
  double gap = 0;
  for (std::size_t k : m.interior_nodes()) gap = std::max(gap, std::abs(a[k] - b[k]));
  return gap;
}

}  // namespace

TEST_CASE("ordered boundary data and costs give ordered solutions") {
  std::mt19937_64 rng(2024);
  const DomainMask m = mask_for(Annulus{0.3, 1.0}, 2, 1.0 / 24);
  for (int trial = 0; trial < 10; ++trial) {
    const ScalarField g1 = random_boundary(m, rng, 0.3);
    ScalarField g2 = g1;
    const ScalarField bump = random_boundary(m, rng, 0.3);
    for (std::size_t k : m.boundary_nodes()) g2[k] += bump[k];
    std::uniform_real_distribution<double> R(0.0, 2.0);
    const double r1 = R(rng), r2 = r1 + R(rng);
    const ScalarField u1 = sweep_solve({Annulus{0.3, 1.0}, 2, r1, g1}, m).solution;
    const ScalarField u2 = sweep_solve({Annulus{0.3, 1.0}, 2, r2, g2}, m).solution;
    for (std::size_t k : m.interior_nodes()) CHECK(u1[k] <= u2[k] + 10 * kTol);
  }
}

TEST_CASE("constant shift of the data shifts the solution") {
  std::mt19937_64 rng(5);
  const DomainMask m = mask_for(Ball{1.0}, 2, 1.0 / 32);
  const ScalarField g = random_boundary(m, rng, 0.5);
  ScalarField shifted = g;
  for (std::size_t k : m.boundary_nodes()) shifted[k] += 0.75;
  const ScalarField a = sweep_solve({Ball{1.0}, 2, 1.0, g}, m).solution;
  const ScalarField b = sweep_solve({Ball{1.0}, 2, 1.0, shifted}, m).solution;
  for (std::size_t k : m.interior_nodes()) CHECK(std::abs(b[k] - a[k] - 0.75) <= 10 * kTol);
}

TEST_CASE("grid-aligned dilation: u(2x)/2 at h solves the doubled-cost problem at 2h") {
  const double h = 1.0 / 32;
  const DomainMask coarse = mask_for(Ball{2.0}, 2, 2 * h);
  const DomainMask fine = mask_for(Ball{1.0}, 2, h);
  REQUIRE(coarse.interior_count() == fine.interior_count());
  const ScalarField u = sweep_solve({Ball{2.0}, 2, 1.0}, coarse).solution;
  const ScalarField v = sweep_solve({Ball{1.0}, 2, 2.0}, fine).solution;
  const auto ci = coarse.interior_nodes(), fi = fine.interior_nodes();
  double gap = 0;
  for (std::size_t i = 0; i < fi.size(); ++i) {
    const Point xf = fine.grid().coord(fi[i]), xc = coarse.grid().coord(ci[i]);
    REQUIRE(std::abs(2 * xf[0] - xc[0]) + std::abs(2 * xf[1] - xc[1]) < 1e-12);
    gap = std::max(gap, std::abs(v[fi[i]] - u[ci[i]] / 2));
  }
  CHECK(gap <= 10 * kTol);
}

TEST_CASE("reflection symmetry on a symmetric grid") {
  const DomainMask m = mask_for(Annulus{0.5, 1.0}, 2, 1.0 / 32);
  const ScalarField u = sweep_solve({Annulus{0.5, 1.0}, 2, 1.0}, m).solution;
  for (std::size_t k : m.interior_nodes()) {
    const Point x = m.grid().coord(k);
    CHECK(std::abs(u[k] - u[test::node_at(m.grid(), {-x[0], x[1], 0})]) <= 10 * kTol);
    CHECK(std::abs(u[k] - u[test::node_at(m.grid(), {x[1], x[0], 0})]) <= 10 * kTol);
  }
}

TEST_CASE("the limit does not depend on the initial guess under random data") {
  std::mt19937_64 rng(99);
  const DomainMask m = mask_for(Ball{1.0}, 2, 1.0 / 24);
  for (int trial = 0; trial < 3; ++trial) {
    const ProblemSpec p{Ball{1.0}, 2, 1.0, random_boundary(m, rng, 0.5)};
    SolverConfig above, below;
    below.init = InitMode::FromBoundaryData;
    CHECK(max_interior_gap(sweep_solve(p, m, above).solution, sweep_solve(p, m, below).solution, m) <= 10 * kTol);
  }
}

TEST_CASE("Lipschitz ratio at the coarsest grid bounds the finer grids") {
  const StudyReport r = lipschitz_study(make_fixture("ball_scaled"), {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256});
  const auto q = r.column("ratio");
  for (double v : q) CHECK(v <= 1.1 * q.front());
}

TEST_CASE("halving h roughly halves the oracle error") {
  for (const char* name : {"interval", "eikonal_ball", "ball_scaled", "annulus_2piece"}) {
    CAPTURE(name);
    const Fixture f = make_fixture(name);
    double prev = 0;
    for (double h : {1.0 / 64, 1.0 / 128}) {
      const DomainMask m = mask_for(f.problem, h);
      const double e = oracle_error(sweep_solve(f.problem, m).solution, m, *f.oracle);
      if (prev > 0) {
        CHECK(e / prev >= 0.4);
        CHECK(e / prev <= 0.7);
      }
      prev = e;
    }
  }
}

TEST_CASE("gradient modulus stays at least 1 - delta on fine grids") {
  const double delta = 0.05;
  for (const char* name : {"interval", "ball_scaled", "annulus_2piece", "ridge_annulus"}) {
    CAPTURE(name);
    const Fixture f = make_fixture(name);
    const DomainMask m = mask_for(f.problem, 1.0 / 128);
    const ScalarField u = sweep_solve(f.problem, m).solution;
    double lowest = INFINITY;
    for (std::size_t k : m.interior_nodes()) lowest = std::min(lowest, upwind_gradient_norm(u, m, k));
    CHECK(lowest >= 1 - delta);
    CHECK(small_gradient_measure(u, m, delta) < 0.02);
  }
}

TEST_CASE("interface estimate converges to the closed-form radius") {
  const StudyReport r = interface_study(make_fixture("annulus_2piece"), {1.0 / 64, 1.0 / 128});
  const auto e = r.column("error_over_h");
  for (double v : e) CHECK(v < 2.0);
  CHECK(r.column("error").back() < r.column("error").front());
}
