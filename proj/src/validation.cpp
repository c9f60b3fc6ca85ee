#include "hjb/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <json.hpp>

#include "hjb/fields.hpp"
#include "hjb/free_boundary.hpp"
#include "hjb/io.hpp"

namespace hjb {

const Thresholds& thresholds() {
  static const Thresholds t;
  return t;
}

Fixture make_fixture(const std::string& name) {
  if (name == "interval") return {name, {Interval{1.0}, 1, 1.0}, oracle_interval(1.0)};
  if (name == "eikonal_ball") return {name, {Ball{1.0}, 2, 1.0}, oracle_eikonal_ball(2, 1.0)};
  if (name == "ball") return {name, {Ball{2.0}, 2, 1.0}, oracle_ball(2, 2.0)};
  // The ball fixture under the scaling v(x) = u(2x)/2, which halves the node
  // count per unit of resolution.
  if (name == "ball_scaled") return {name, {Ball{1.0}, 2, 2.0}, oracle_ball(2, 1.0, 2.0)};
  if (name == "annulus_2piece") return {name, {Annulus{0.1, 0.9}, 2, 1.0}, oracle_annulus(2, 0.1, 0.9)};
  if (name == "annulus_3piece") return {name, {Annulus{0.5, 1.5}, 2, 1.0}, oracle_annulus(2, 0.5, 1.5)};
  // Annulus(1, 2) with r = 1, scaled by 1/2: inner radius above (n-1)/r
  // gives two Poisson pieces meeting at a ridge.
  if (name == "ridge_annulus") return {name, {Annulus{0.5, 1.0}, 2, 2.0}, oracle_annulus(2, 0.5, 1.0, 2.0)};
  if (name == "box_affine") {
    ProblemSpec spec{Box{{2.0, 2.0, 0.0}}, 2, 1.0};
    spec.g = std::function<double(const Point&)>([](const Point& x) { return 1.0 + 0.3 * x[0] - 0.2 * x[1]; });
    return {name, std::move(spec), std::nullopt};
  }
  throw Error(ErrorCode::BadParameter, "unknown fixture '" + name + "'");
}

std::vector<std::string> fixture_names() {
  return {"interval", "eikonal_ball", "ball", "ball_scaled", "annulus_2piece", "annulus_3piece", "ridge_annulus",
          "box_affine"};
}

double oracle_error(const ScalarField& u, const DomainMask& mask, const RadialSolution& oracle) {
  const Grid& g = mask.grid();
  double e = 0.0;
  for (std::size_t k : mask.interior_nodes()) {
    const double t = std::clamp(radius_of(g.coord(k), g.dim()), oracle.t_min(), oracle.t_max());
    e = std::max(e, std::abs(u[k] - eval(oracle, t).value));
  }
  return e;
}

bool Check::pass() const {
  if (!std::isfinite(observed)) return false;
  if (lower && (strict ? !(observed > *lower) : !(observed >= *lower))) return false;
  if (upper && (strict ? !(observed < *upper) : !(observed <= *upper))) return false;
  return true;
}

bool StudyReport::passed() const {
  if (partial) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

std::vector<double> StudyReport::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error(ErrorCode::BadParameter, "report has no column '" + name + "'");
  const std::size_t c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::string StudyReport::to_json() const {
  using nlohmann::ordered_json;
  ordered_json j;
  j["kind"] = kind;
  j["fixture"] = fixture;
  j["parameter"] = parameter;
  j["columns"] = columns;
  j["rows"] = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json row = ordered_json::array();
    for (double v : r) row.push_back(io::round15(v));
    j["rows"].push_back(row);
  }
  if (!row_labels.empty()) j["row_labels"] = row_labels;
  if (rate) j["rate"] = io::round15(*rate);
  j["checks"] = ordered_json::array();
  for (const Check& c : checks) {
    ordered_json q;
    q["name"] = c.name;
    q["observed"] = std::isfinite(c.observed) ? ordered_json(io::round15(c.observed)) : ordered_json();
    q["lower"] = c.lower ? ordered_json(io::round15(*c.lower)) : ordered_json();
    q["upper"] = c.upper ? ordered_json(io::round15(*c.upper)) : ordered_json();
    q["strict"] = c.strict;
    q["pass"] = c.pass();
    j["checks"].push_back(q);
  }
  j["partial"] = partial;
  j["passed"] = passed();
  if (!note.empty()) j["note"] = note;
  return j.dump(2) + "\n";
}

std::string StudyReport::to_csv() const {
  std::string out;
  if (!row_labels.empty()) out += "label,";
  for (std::size_t c = 0; c < columns.size(); ++c) out += columns[c] + (c + 1 < columns.size() ? "," : "\n");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!row_labels.empty()) out += row_labels[r] + ",";
    for (std::size_t c = 0; c < rows[r].size(); ++c) out += io::number(rows[r][c]) + (c + 1 < rows[r].size() ? "," : "\n");
  }
  return out;
}

double fitted_rate(const std::vector<double>& h, const std::vector<double>& error) {
  if (h.size() != error.size() || h.size() < 2) throw Error(ErrorCode::BadParameter, "rate fit needs matching lists of length >= 2");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0 && error[i] > 0)) throw Error(ErrorCode::BadParameter, "rate fit needs positive values");
    const double x = std::log(h[i]), y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

struct Run {
  DomainMask mask;
  SolveResult result;
};

Run solve_on(const ProblemSpec& spec, double h, const SolverConfig& config) {
  DomainMask mask = classify_nodes(Grid::covering(spec.domain, spec.dim, h), spec.domain);
  SolveResult result = sweep_solve(spec, mask, config);
  return {std::move(mask), std::move(result)};
}

void require_decreasing(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) throw Error(ErrorCode::BadParameter, std::string(what) + " must be strictly decreasing");
}

void require_positive(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!(x > 0) || !std::isfinite(x)) throw Error(ErrorCode::BadParameter, std::string(what) + " entries must be positive");
}

const RadialSolution& require_oracle(const Fixture& f) {
  if (!f.oracle) throw Error(ErrorCode::BadParameter, "fixture '" + f.name + "' has no closed form");
  return *f.oracle;
}

// max_i (v[i+1] - v[i]): negative iff strictly decreasing.
double max_step(const std::vector<double>& v) {
  double m = -INFINITY;
  for (std::size_t i = 1; i < v.size(); ++i) m = std::max(m, v[i] - v[i - 1]);
  return m;
}

double min_step(const std::vector<double>& v) {
  double m = INFINITY;
  for (std::size_t i = 1; i < v.size(); ++i) m = std::min(m, v[i] - v[i - 1]);
  return m;
}

template <class Body>
void guarded(StudyReport& report, Body&& body) {
  try {
    body();
  } catch (const StudyAborted&) {
    throw;
  } catch (const NoConvergenceError& e) {
    report.partial = true;
    report.note = e.what();
    throw StudyAborted(e, report);
  }
}

}  // namespace

StudyReport convergence_study(const Fixture& fixture, const std::vector<double>& h_list, const SolverConfig& config) {
  const RadialSolution& oracle = require_oracle(fixture);
  if (h_list.size() < 3) throw Error(ErrorCode::BadParameter, "convergence_study needs at least three h values");
  require_positive(h_list, "h_list");
  require_decreasing(h_list, "h_list");
  const Thresholds& th = thresholds();

  StudyReport report{"convergence", fixture.name, "h", {"h", "error", "error_over_h", "sweeps"}};
  guarded(report, [&] {
    for (double h : h_list) {
      const Run run = solve_on(fixture.problem, h, config);
      const double e = oracle_error(run.result.solution, run.mask, oracle);
      report.rows.push_back({h, e, e / h, static_cast<double>(run.result.sweeps_used)});
    }
  });
  const auto hs = report.column("h");
  const auto es = report.column("error");
  report.rate = fitted_rate(hs, es);
  report.checks.push_back({"errors_strictly_decreasing", max_step(es), std::nullopt, 0.0});
  if (fixture.name == "interval" || fixture.name == "eikonal_ball")
    report.checks.push_back({"rate", *report.rate, th.rate_low, th.rate_high, false});
  if (fixture.name == "interval")
    report.checks.push_back({"finest_error_over_h", es.back() / hs.back(), std::nullopt, th.interval_error});
  if (fixture.name == "eikonal_ball" || fixture.name == "ball" || fixture.name == "ball_scaled")
    report.checks.push_back({"finest_error_over_h", es.back() / hs.back(), std::nullopt, th.ball_error});
  return report;
}

StudyReport epsilon_study(const Fixture& fixture, const std::vector<double>& eps_list, double h,
                          const SolverConfig& config) {
  const RadialSolution& oracle = require_oracle(fixture);
  if (eps_list.empty()) throw Error(ErrorCode::BadParameter, "eps_list is empty");
  require_positive(eps_list, "eps_list");
  require_decreasing(eps_list, "eps_list");
  const Thresholds& th = thresholds();

  StudyReport report{"epsilon", fixture.name, "epsilon", {"epsilon", "gap", "sweeps"}};
  double disc_error = NAN;
  guarded(report, [&] {
    const Run base = solve_on(fixture.problem, h, config);
    disc_error = oracle_error(base.result.solution, base.mask, oracle);
    for (double eps : eps_list) {
      const SolveResult r = regularized_solve(fixture.problem, base.mask, eps, config);
      double gap = 0.0;
      for (std::size_t k : base.mask.interior_nodes())
        gap = std::max(gap, std::abs(r.solution[k] - base.result.solution[k]));
      report.rows.push_back({eps, gap, static_cast<double>(r.sweeps_used)});
    }
  });
  const auto gaps = report.column("gap");
  report.note = "h = " + io::number(h) + ", sweep oracle error = " + io::number(disc_error);
  if (gaps.size() >= 2) report.checks.push_back({"gaps_strictly_decreasing", max_step(gaps), std::nullopt, 0.0});
  report.checks.push_back(
      {"final_gap_over_discretization_error", gaps.back() / disc_error, std::nullopt, th.epsilon_gap_factor});
  return report;
}

namespace {

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ScalarField random_boundary_field(const DomainMask& mask, std::mt19937_64& rng) {
  const Grid& g = mask.grid();
  ScalarField raw(g, 0.0);
  for (std::size_t k : mask.boundary_nodes()) raw[k] = 0.2 * unit(rng);
  ScalarField out(g, 0.0);
  for (std::size_t k : mask.boundary_nodes()) {
    double sum = raw[k];
    int count = 1;
    for (int a = 0; a < g.dim(); ++a) {
      for (std::ptrdiff_t step : {-g.stride(a), g.stride(a)}) {
        const auto nb = static_cast<std::ptrdiff_t>(k) + step;
        if (nb < 0 || static_cast<std::size_t>(nb) >= g.size()) continue;
        if (mask.label(static_cast<std::size_t>(nb)) != NodeLabel::Boundary) continue;
        sum += raw[static_cast<std::size_t>(nb)];
        ++count;
      }
    }
    out[k] = sum / count;
  }
  return out;
}

}  // namespace

StudyReport comparison_battery(const ProblemSpec& spec, const DomainMask& mask, int trials, std::uint64_t seed,
                               const SolverConfig& config) {
  if (trials < 10) throw Error(ErrorCode::BadParameter, "comparison_battery needs at least 10 trials");
  const Thresholds& th = thresholds();
  const double slack = th.comparison_slack * config.tolerance;
  StudyReport report{"comparison", describe(spec.domain), "trial", {"trial", "max_violation", "sweeps_low", "sweeps_high"}};
  std::mt19937_64 rng(seed);
  int violations = 0;
  double shift_dev = 0.0;
  double mismatches = 0.0;

  guarded(report, [&] {
    ProblemSpec low = spec, high = spec;
    for (int t = 0; t < trials; ++t) {
      ScalarField g1 = random_boundary_field(mask, rng);
      ScalarField bump = random_boundary_field(mask, rng);
      ScalarField g2 = g1;
      for (std::size_t k : mask.boundary_nodes()) g2[k] += bump[k];
      low.g = g1;
      high.g = g2;
      const SolveResult u1 = sweep_solve(low, mask, config);
      const SolveResult u2 = sweep_solve(high, mask, config);
      double worst = -INFINITY;
      for (std::size_t k : mask.interior_nodes()) worst = std::max(worst, u1.solution[k] - u2.solution[k]);
      violations += worst > slack;
      report.rows.push_back({static_cast<double>(t), worst, static_cast<double>(u1.sweeps_used),
                             static_cast<double>(u2.sweeps_used)});
    }

    // Constant shift and identical data.
    low.g = random_boundary_field(mask, rng);
    ScalarField shifted(mask.grid(), 0.0);
    const double c = 0.125;
    for (std::size_t k : mask.boundary_nodes()) shifted[k] = low.g.at(mask, k) + c;
    high.g = shifted;
    const SolveResult a = sweep_solve(low, mask, config);
    const SolveResult b = sweep_solve(high, mask, config);
    const SolveResult a2 = sweep_solve(low, mask, config);
    for (std::size_t k : mask.interior_nodes()) {
      shift_dev = std::max(shift_dev, std::abs(b.solution[k] - a.solution[k] - c));
      mismatches += a.solution[k] != a2.solution[k];
    }
  });
  report.note = "seed = " + std::to_string(seed);
  report.checks.push_back({"violations_beyond_slack", static_cast<double>(violations), std::nullopt, 0.0, false});
  report.checks.push_back({"constant_shift_deviation", shift_dev, std::nullopt, slack, false});
  report.checks.push_back({"identical_data_node_mismatches", mismatches, std::nullopt, 0.0, false});
  return report;
}

namespace {

double probe_value(const SolveResult& r, const DomainMask& mask, double r_in) {
  return multilinear_interpolate(r.solution, mask, Point{2.0 * r_in, 0.0, 0.0});
}

StudyReport growth_common(const char* kind, double r_in, const std::vector<double>& R_list, double rhs, int dim,
                          HPolicy policy, const SolverConfig& config) {
  if (!(r_in > 0)) throw Error(ErrorCode::BadParameter, "r_in must be positive");
  if (R_list.empty()) throw Error(ErrorCode::BadParameter, "R_list is empty");
  for (std::size_t i = 0; i < R_list.size(); ++i) {
    if (!(R_list[i] > 2.0 * r_in)) throw Error(ErrorCode::BadParameter, "every R must exceed the probe radius 2 r_in");
    if (i > 0 && !(R_list[i] > R_list[i - 1])) throw Error(ErrorCode::BadParameter, "R_list must be increasing");
  }
  StudyReport report{kind, "annulus r_in=" + io::number(r_in) + " rhs=" + io::number(rhs) + " n=" + std::to_string(dim),
                     "R", {"R", "h", "probe", "sweeps"}};
  guarded(report, [&] {
    for (double R : R_list) {
      const double h = policy.h_for(R);
      const ProblemSpec spec{Annulus{r_in, R}, dim, rhs};
      const Run run = solve_on(spec, h, config);
      report.rows.push_back({R, h, probe_value(run.result, run.mask, r_in), static_cast<double>(run.result.sweeps_used)});
    }
  });
  return report;
}

}  // namespace

StudyReport growth_study(double r_in, const std::vector<double>& R_list, double rhs, int dim, HPolicy h_policy,
                         const SolverConfig& config) {
  if (dim < 2) throw Error(ErrorCode::BadParameter, "growth_study needs n >= 2");
  StudyReport report = growth_common("growth", r_in, R_list, rhs, dim, h_policy, config);
  const auto p = report.column("probe");
  if (p.size() >= 2) {
    report.checks.push_back({"probe_min_increment", min_step(p), 0.0, std::nullopt});
    report.checks.push_back({"last_over_first", p.back() / p.front(), thresholds().growth_factor, std::nullopt});
  }
  return report;
}

StudyReport growth_contrast_study(double r_in, const std::vector<double>& R_list, HPolicy h_policy,
                                  const SolverConfig& config) {
  StudyReport report = growth_common("growth_contrast", r_in, R_list, 0.0, 1, h_policy, config);
  const auto p = report.column("probe");
  if (p.size() >= 2)
    report.checks.push_back({"last_over_first", p.back() / p.front(), std::nullopt, thresholds().growth_factor});
  report.note = "zero time cost in one dimension: the probe stays at r_in for every R";
  return report;
}

StudyReport lipschitz_study(const Fixture& fixture, const std::vector<double>& h_list, const SolverConfig& config) {
  if (h_list.empty()) throw Error(ErrorCode::BadParameter, "h_list is empty");
  require_positive(h_list, "h_list");
  const Thresholds& th = thresholds();
  StudyReport report{"lipschitz", fixture.name, "h", {"h", "max_gradient", "max_abs_u", "ratio"}};
  guarded(report, [&] {
    for (double h : h_list) {
      const Run run = solve_on(fixture.problem, h, config);
      const Grid& g = run.mask.grid();
      const ScalarField grad = upwind_norm_field(run.result.solution, run.mask);
      double gmax = 0.0;
      for (std::size_t k : run.mask.interior_nodes()) {
        const double d = distance_to_boundary(run.mask.domain(), g.coord(k), g.dim());
        if (std::isnan(d) || d >= th.lipschitz_margin) gmax = std::max(gmax, grad[k]);
      }
      const double umax = max_abs(run.result.solution, run.mask);
      report.rows.push_back({h, gmax, umax, gmax / (umax + 1.0)});
    }
  });
  const auto ratio = report.column("ratio");
  const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
  report.checks.push_back({"ratio_max_over_min", *hi / *lo, std::nullopt, th.lipschitz_spread});
  return report;
}

StudyReport small_gradient_study(const std::vector<Fixture>& fixtures, double h, const SolverConfig& config) {
  const Thresholds& th = thresholds();
  StudyReport report{"small_gradient", "", "fixture", {"h", "measure"}};
  guarded(report, [&] {
    for (const Fixture& f : fixtures) {
      const Run run = solve_on(f.problem, h, config);
      const double m = small_gradient_measure(run.result.solution, run.mask, th.small_gradient_delta);
      report.rows.push_back({h, m});
      report.row_labels.push_back(f.name);
      report.checks.push_back({"measure_" + f.name, m, std::nullopt, th.small_gradient_fraction});
    }
  });
  return report;
}

StudyReport interface_study(const Fixture& fixture, const std::vector<double>& h_list, const SolverConfig& config) {
  const RadialSolution& oracle = require_oracle(fixture);
  const std::vector<double> truth = oracle.interfaces();
  if (truth.empty()) throw Error(ErrorCode::BadParameter, "fixture '" + fixture.name + "' has no interface");
  require_positive(h_list, "h_list");
  const Thresholds& th = thresholds();
  const bool arbitrate = fixture.name == "annulus_2piece";
  std::optional<double> literal;
  if (arbitrate) {
    const auto& a = std::get<Annulus>(fixture.problem.domain);
    literal = annulus_with_literal_condition(fixture.problem.dim, a.inner, a.outer).interfaces().front();
  }

  StudyReport report{"interface", fixture.name, "h", {"h", "rho_hat", "spread", "error", "error_over_h"}};
  if (literal) report.columns.push_back("literal_error");
  guarded(report, [&] {
    for (double h : h_list) {
      const Run run = solve_on(fixture.problem, h, config);
      const RegionLabeling lab = classify_active_branch(run.result.solution, fixture.problem, run.mask);
      const InterfaceEstimate est = extract_interface(lab, run.mask);
      // Distance from each true interface to the nearest sharp cluster.
      double err = 0.0;
      for (double rho : truth) {
        double best = INFINITY;
        for (const InterfaceCluster& c : est.clusters)
          if (c.sharp) best = std::min(best, std::abs(c.rho_hat - rho));
        err = std::max(err, best);
      }
      std::vector<double> row{h, *est.rho_hat, *est.spread, err, err / h};
      if (literal) row.push_back(std::abs(*est.rho_hat - *literal));
      report.rows.push_back(row);
    }
  });
  const auto ratio = report.column("error_over_h");
  report.checks.push_back({"finest_error_over_h", ratio.back(), std::nullopt, th.interface_window});
  if (literal) {
    report.checks.push_back({"corrected_minus_literal_error",
                             report.column("error").back() - report.column("literal_error").back(), std::nullopt, 0.0});
    report.note = "literal-condition interface radius = " + io::number(*literal);
  }
  return report;
}

StudyReport continuity_study(const Fixture& fixture, const std::vector<double>& h_list, const SolverConfig& config) {
  require_positive(h_list, "h_list");
  require_decreasing(h_list, "h_list");
  const Thresholds& th = thresholds();
  StudyReport report{"continuity", fixture.name, "h", {"h", "jump_gradnorm", "jump_gradnorm_central", "jump_gradvec"}};
  guarded(report, [&] {
    for (double h : h_list) {
      const Run run = solve_on(fixture.problem, h, config);
      const GradientModulusJumps j = gradient_modulus_diagnostic(run.result.solution, run.mask);
      report.rows.push_back({h, j.jump_gradnorm, j.jump_gradnorm_central, j.jump_gradvec});
    }
  });
  const auto norm = report.column("jump_gradnorm");
  const auto vec = report.column("jump_gradvec");
  if (norm.size() >= 2) report.checks.push_back({"jump_gradnorm_max_step", max_step(norm), std::nullopt, 0.0});
  report.checks.push_back({"final_jump_gradnorm", norm.back(), std::nullopt, th.continuity_final});
  report.checks.push_back({"min_jump_gradvec", *std::min_element(vec.begin(), vec.end()), th.gradvec_floor, std::nullopt});
  return report;
}

}  // namespace hjb
