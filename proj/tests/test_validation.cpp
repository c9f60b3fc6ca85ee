#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "hjb/error.hpp"
#include "hjb/validation.hpp"
#include "support.hpp"

using namespace hjb;
using doctest::Approx;

namespace {

const Check* find_check(const StudyReport& r, const std::string& name) {
  for (const Check& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("fixture registry") {
  for (const std::string& name : fixture_names()) {
    CAPTURE(name);
    const Fixture f = make_fixture(name);
    CHECK(f.name == name);
    CHECK_NOTHROW(validate(f.problem));
    CHECK(f.oracle.has_value() == (name != "box_affine"));
  }
  CHECK_THROWS_AS(make_fixture("nope"), Error);
}

TEST_CASE("scaled fixtures are the unscaled problems under v(x) = u(2x)/2") {
  const RadialSolution ball = oracle_ball(2, 2.0);
  const RadialSolution ridge = oracle_annulus(2, 1.0, 2.0);
  const Fixture bs = make_fixture("ball_scaled"), ra = make_fixture("ridge_annulus");
  for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    CHECK(eval(*bs.oracle, t).value == Approx(eval(ball, 2 * t).value / 2).epsilon(1e-12));
    if (t > 0.5) CHECK(eval(*ra.oracle, t).value == Approx(eval(ridge, 2 * t).value / 2).epsilon(1e-12));
  }
}

TEST_CASE("oracle error of the sampled closed form is zero") {
  const Fixture f = make_fixture("annulus_2piece");
  const DomainMask m = test::mask_for(f.problem, 1.0 / 32);
  const RadialSolution& o = *f.oracle;
  const double lo = o.pieces.front().t_lo, hi = o.t_max();
  const ScalarField u =
      sample(m, [&](const Point& x) { return eval(o, std::clamp(std::hypot(x[0], x[1]), lo, hi)).value; });
  CHECK(oracle_error(u, m, *f.oracle) < 1e-14);
}

TEST_CASE("check bounds") {
  CHECK(Check{"a", 1.0, 0.0, 2.0}.pass());
  CHECK_FALSE(Check{"a", 2.0, 0.0, 2.0}.pass());
  CHECK(Check{"a", 2.0, 0.0, 2.0, false}.pass());
  CHECK_FALSE(Check{"a", 0.0, 0.0, std::nullopt}.pass());
  CHECK_FALSE(Check{"a", NAN, std::nullopt, 1.0}.pass());
  StudyReport r;
  r.checks = {{"ok", 1.0, std::nullopt, 2.0}, {"violations_beyond_slack", 1.0, std::nullopt, 0.0, false}};
  CHECK_FALSE(r.passed());
  r.checks.pop_back();
  CHECK(r.passed());
  r.partial = true;
  CHECK_FALSE(r.passed());
}

TEST_CASE("threshold table") {
  const Thresholds& t = thresholds();
  CHECK(t.rate_low == 0.8);
  CHECK(t.rate_high == 1.2);
  CHECK(t.epsilon_gap_factor == 5.0);
  CHECK(t.comparison_slack == 10.0);
  CHECK(t.lipschitz_spread == 1.5);
  CHECK(t.growth_factor == 2.0);
  CHECK(t.small_gradient_fraction == 0.02);
  CHECK(t.small_gradient_delta == 0.05);
  CHECK(t.interface_window == 2.0);
  CHECK(t.continuity_final == 0.1);
  CHECK(t.gradvec_floor == 0.5);
}

TEST_CASE("fitted rate") {
  const std::vector<double> h{0.1, 0.05, 0.025};
  CHECK(fitted_rate(h, {0.3, 0.15, 0.075}) == Approx(1.0));
  CHECK(fitted_rate(h, {0.01, 0.0025, 0.000625}) == Approx(2.0));
  CHECK_THROWS_AS(fitted_rate({0.1}, {0.1}), Error);
  CHECK_THROWS_AS(fitted_rate(h, {0.1, 0.0, 0.1}), Error);
}

TEST_CASE("interval convergence study: first order") {
  const StudyReport r = convergence_study(make_fixture("interval"), {1.0 / 64, 1.0 / 128, 1.0 / 256});
  REQUIRE(r.rate);
  CHECK(*r.rate >= 0.8);
  CHECK(*r.rate <= 1.2);
  CHECK(r.passed());
  CHECK(r.rows.size() == 3);
  const auto e = r.column("error");
  CHECK(e[1] / e[0] == Approx(0.5).epsilon(0.05));
  CHECK_THROWS_AS(convergence_study(make_fixture("interval"), {1.0 / 64, 1.0 / 128}), Error);
  CHECK_THROWS_AS(convergence_study(make_fixture("interval"), {1.0 / 64, 1.0 / 32, 1.0 / 128}), Error);
  CHECK_THROWS_AS(convergence_study(make_fixture("box_affine"), {0.1, 0.05, 0.025}), Error);
}

TEST_CASE("epsilon study with one entry has no trend check") {
  const StudyReport r = epsilon_study(make_fixture("interval"), {0.1}, 1.0 / 32);
  CHECK(r.rows.size() == 1);
  CHECK(find_check(r, "gaps_strictly_decreasing") == nullptr);
  CHECK(find_check(r, "final_gap_over_discretization_error") != nullptr);
}

TEST_CASE("comparison battery: no violations, exact identical-data reproduction, deterministic") {
  const ProblemSpec spec{Ball{1.0}, 2, 1.0};
  const DomainMask m = test::mask_for(spec, 1.0 / 16);
  const StudyReport a = comparison_battery(spec, m, 10, 42);
  const StudyReport b = comparison_battery(spec, m, 10, 42);
  CHECK(a.passed());
  CHECK(find_check(a, "violations_beyond_slack")->observed == 0.0);
  CHECK(find_check(a, "identical_data_node_mismatches")->observed == 0.0);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_json() != comparison_battery(spec, m, 10, 43).to_json());
  CHECK_THROWS_AS(comparison_battery(spec, m, 9, 42), Error);
}

TEST_CASE("growth study edge cases") {
  const StudyReport one = growth_study(0.5, {2.0}, 1.0, 2, HPolicy{1.0 / 16});
  CHECK(one.rows.size() == 1);
  CHECK(find_check(one, "probe_min_increment") == nullptr);
  CHECK_THROWS_AS(growth_study(0.5, {4.0, 2.0}, 1.0), Error);
  CHECK_THROWS_AS(growth_study(0.5, {0.8}, 1.0), Error);
  CHECK_THROWS_AS(growth_study(0.5, {2.0}, 1.0, 1), Error);
}

TEST_CASE("one-dimensional contrast stays at the inner radius") {
  const StudyReport r = growth_contrast_study(0.5, {2.0, 4.0, 8.0}, HPolicy{1.0 / 32});
  for (double p : r.column("probe")) CHECK(p == Approx(0.5));
  CHECK(r.passed());
}

TEST_CASE("lipschitz study on the cone: ratio 1/(max|u| + 1)") {
  const StudyReport r = lipschitz_study(make_fixture("eikonal_ball"), {1.0 / 16, 1.0 / 32, 1.0 / 64});
  for (double q : r.column("ratio")) CHECK(q == Approx(0.5).epsilon(0.05));
  CHECK(r.passed());
}

TEST_CASE("aborted study carries the completed rows") {
  SolverConfig cfg;
  cfg.max_sweeps = 300;
  try {
    convergence_study(make_fixture("eikonal_ball"), {1.0 / 16, 1.0 / 32, 1.0 / 256}, cfg);
    FAIL("expected the finest run to abort");
  } catch (const StudyAborted& e) {
    CHECK(e.report().partial);
    CHECK(e.report().rows.size() == 2);
    CHECK_FALSE(e.report().passed());
  }
}

TEST_CASE("report serialization") {
  const StudyReport r = convergence_study(make_fixture("interval"), {1.0 / 16, 1.0 / 32, 1.0 / 64});
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["kind"] == "convergence");
  CHECK(j["fixture"] == "interval");
  CHECK(j["rows"].size() == 3);
  CHECK(j["passed"] == r.passed());
  const std::string csv = r.to_csv();
  CHECK(csv.rfind("h,error,error_over_h,sweeps\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
