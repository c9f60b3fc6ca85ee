#include "hjb/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hjb/error.hpp"
#include "hjb/fields.hpp"
#include "hjb/free_boundary.hpp"
#include "hjb/hjb_solver.hpp"
#include "hjb/io.hpp"
#include "hjb/kernels.hpp"
#include "hjb/radial_oracle.hpp"
#include "hjb/validation.hpp"

namespace hjb::cli {

using nlohmann::ordered_json;

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "domain", "radius",    "inner",      "outer",  "width",  "n",        "r",        "g",
      "h",      "epsilon",   "delta",      "dt",     "M",      "dt_override", "tolerance", "max_sweeps",
      "init",   "update",    "relaxation", "seed",   "trials", "fixture",  "h_list",   "eps_list",
      "R_list", "output"};
  return keys;
}

namespace {

bool known_key(const std::string& key) {
  const auto& k = config_keys();
  return std::find(k.begin(), k.end(), key) != k.end();
}

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::Validation, "invalid value for '" + field + "': " + why);
}

double to_double(const std::string& field, const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    invalid(field, "'" + text + "' is not a number");
  }
  if (used != text.size() || !std::isfinite(v)) invalid(field, "'" + text + "' is not a finite number");
  return v;
}

long long to_integer(const std::string& field, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    invalid(field, "'" + text + "' is not an integer");
  }
  if (used != text.size()) invalid(field, "'" + text + "' is not an integer");
  return v;
}

bool to_bool(const std::string& field, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  invalid(field, "'" + text + "' is not a boolean");
}

std::vector<double> to_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(field, item));
  if (out.empty()) invalid(field, "empty list");
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + io::number(v[i]);
  return s;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream lines(text);
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      const auto eq = token.find('=');
      const std::string where = "line " + std::to_string(number) + ": ";
      if (eq == std::string::npos || eq == 0 || eq + 1 == token.size())
        throw Error(ErrorCode::ConfigParse, where + "expected key=value, got '" + token + "'");
      const std::string key = token.substr(0, eq);
      if (!known_key(key)) throw Error(ErrorCode::ConfigParse, where + "unknown key '" + key + "'");
      if (out.count(key)) throw Error(ErrorCode::ConfigParse, where + "duplicate key '" + key + "'");
      out[key] = token.substr(eq + 1);
    }
  }
  return out;
}

RunConfig resolve(const std::string& subcommand, const std::map<std::string, std::string>& values) {
  RunConfig c;
  c.subcommand = subcommand;
  for (const auto& [key, v] : values) {
    if (!known_key(key)) throw Error(ErrorCode::Validation, "unknown key '" + key + "'");
    if (key == "domain") c.domain = v;
    else if (key == "radius") c.radius = to_double(key, v);
    else if (key == "inner") c.inner = to_double(key, v);
    else if (key == "outer") c.outer = to_double(key, v);
    else if (key == "width") c.width = to_double(key, v);
    else if (key == "n") c.n = static_cast<int>(to_integer(key, v));
    else if (key == "r") c.r = to_double(key, v);
    else if (key == "g") c.g = to_double(key, v);
    else if (key == "h") c.h = to_double(key, v);
    else if (key == "epsilon") c.epsilon = to_double(key, v);
    else if (key == "delta") c.delta = to_double(key, v);
    else if (key == "dt") c.dt = v == "auto" ? std::nullopt : std::optional(to_double(key, v));
    else if (key == "M") c.M = static_cast<int>(to_integer(key, v));
    else if (key == "dt_override") c.dt_override = to_bool(key, v);
    else if (key == "tolerance") c.tolerance = to_double(key, v);
    else if (key == "max_sweeps") c.max_sweeps = static_cast<int>(to_integer(key, v));
    else if (key == "init") c.init = v;
    else if (key == "update") c.update = v;
    else if (key == "relaxation") c.relaxation = v == "auto" ? std::nullopt : std::optional(to_double(key, v));
    else if (key == "seed") {
      const long long s = to_integer(key, v);
      if (s < 0) invalid(key, "must be >= 0");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "trials") c.trials = static_cast<int>(to_integer(key, v));
    else if (key == "fixture") c.fixture = v;
    else if (key == "h_list") c.h_list = to_list(key, v);
    else if (key == "eps_list") c.eps_list = to_list(key, v);
    else if (key == "R_list") c.R_list = to_list(key, v);
    else if (key == "output") c.output = v;
  }

  if (c.domain != "interval" && c.domain != "ball" && c.domain != "annulus" && c.domain != "box")
    invalid("domain", "expected interval, ball, annulus or box");
  if (c.n < 1 || c.n > 3) invalid("n", "must be 1, 2 or 3");
  if (c.domain == "interval" && c.n != 1) invalid("n", "interval requires n = 1");
  if (!(c.radius > 0)) invalid("radius", "must be positive");
  if (!(c.inner > 0)) invalid("inner", "must be positive");
  if (!(c.outer > c.inner)) invalid("outer", "must exceed inner");
  if (!(c.width > 0)) invalid("width", "must be positive");
  if (!(c.r >= 0)) invalid("r", "must be >= 0");
  if (!(c.h > 0)) invalid("h", "must be positive");
  if (!(c.epsilon > 0)) invalid("epsilon", "must be positive");
  if (!(c.delta > 0 && c.delta < 0.5)) invalid("delta", "must lie in (0, 0.5)");
  if (c.dt && !(*c.dt > 0)) invalid("dt", "must be positive");
  if (c.n == 2 && c.M < 4) invalid("M", "must be >= 4 in two dimensions");
  if (c.n == 3 && c.M < 6) invalid("M", "must be >= 6 in three dimensions");
  if (!(c.tolerance > 0)) invalid("tolerance", "must be positive");
  if (c.max_sweeps < 1) invalid("max_sweeps", "must be >= 1");
  if (c.init != "above" && c.init != "boundary") invalid("init", "expected above or boundary");
  if (c.update != "gauss-seidel" && c.update != "jacobi") invalid("update", "expected gauss-seidel or jacobi");
  if (c.relaxation && !(*c.relaxation >= 1.0 && *c.relaxation < 2.0)) invalid("relaxation", "must lie in [1, 2)");
  if (c.trials < 10) invalid("trials", "must be >= 10");
  for (double x : c.h_list)
    if (!(x > 0)) invalid("h_list", "entries must be positive");
  for (double x : c.eps_list)
    if (!(x > 0)) invalid("eps_list", "entries must be positive");
  for (double x : c.R_list)
    if (!(x > 0)) invalid("R_list", "entries must be positive");
  if (!c.fixture.empty()) {
    const auto names = fixture_names();
    if (std::find(names.begin(), names.end(), c.fixture) == names.end()) invalid("fixture", "unknown fixture");
  }
  if (c.output.empty()) {
    const char* env = std::getenv("HJB_OUTPUT_DIR");
    c.output = env && *env ? env : "hjb_output";
  }
  return c;
}

std::map<std::string, std::string> echo(const RunConfig& c) {
  return {{"domain", c.domain},
          {"radius", io::number(c.radius)},
          {"inner", io::number(c.inner)},
          {"outer", io::number(c.outer)},
          {"width", io::number(c.width)},
          {"n", std::to_string(c.n)},
          {"r", io::number(c.r)},
          {"g", io::number(c.g)},
          {"h", io::number(c.h)},
          {"epsilon", io::number(c.epsilon)},
          {"delta", io::number(c.delta)},
          {"dt", c.dt ? io::number(*c.dt) : "auto"},
          {"M", std::to_string(c.M)},
          {"dt_override", c.dt_override ? "true" : "false"},
          {"tolerance", io::number(c.tolerance)},
          {"max_sweeps", std::to_string(c.max_sweeps)},
          {"init", c.init},
          {"update", c.update},
          {"relaxation", c.relaxation ? io::number(*c.relaxation) : "auto"},
          {"seed", std::to_string(c.seed)},
          {"trials", std::to_string(c.trials)},
          {"fixture", c.fixture},
          {"h_list", list_text(c.h_list)},
          {"eps_list", list_text(c.eps_list)},
          {"R_list", list_text(c.R_list)},
          {"output", c.output.string()}};
}

std::vector<DefaultRow> default_table() {
  const RunConfig c;
  const SolverConfig s;
  const DppConfig d;
  auto init_name = [](InitMode m) { return m == InitMode::FromAbove ? "above" : "boundary"; };
  auto update_name = [](UpdateMode m) { return m == UpdateMode::GaussSeidel ? "gauss-seidel" : "jacobi"; };
  const ProblemSpec p{Ball{1.0}};
  const DomainMask mask = classify_nodes(Grid::covering(p.domain, p.dim, 0.25), p.domain);
  return {
      {"tolerance", io::number(c.tolerance), io::number(s.tolerance)},
      {"max_sweeps", std::to_string(c.max_sweeps), std::to_string(s.max_sweeps)},
      {"init", c.init, init_name(s.init)},
      {"update", c.update, update_name(s.update)},
      {"relaxation", c.relaxation ? io::number(*c.relaxation) : "auto", s.relaxation ? io::number(*s.relaxation) : "auto"},
      {"M", std::to_string(c.M), std::to_string(d.directions)},
      {"dt", c.dt ? io::number(*c.dt) : "auto", d.dt ? io::number(*d.dt) : "auto"},
      {"dt_override", c.dt_override ? "true" : "false", d.allow_dt_override ? "true" : "false"},
      {"delta", io::number(c.delta), io::number(kDefaultDelta)},
      {"n", std::to_string(c.n), std::to_string(p.dim)},
      {"r", io::number(c.r), io::number(p.rhs)},
      {"g", io::number(c.g), io::number(p.g.at(mask, mask.boundary_nodes().front()))},
  };
}

namespace {

Domain make_domain(const RunConfig& c) {
  if (c.domain == "interval") return Interval{c.radius};
  if (c.domain == "ball") return Ball{c.radius};
  if (c.domain == "annulus") return Annulus{c.inner, c.outer};
  return Box{{c.width, c.width, c.width}};
}

ProblemSpec make_problem(const RunConfig& c) { return {make_domain(c), c.n, c.r, c.g}; }

SolverConfig make_solver_config(const RunConfig& c) {
  SolverConfig s;
  s.tolerance = c.tolerance;
  s.max_sweeps = c.max_sweeps;
  s.init = c.init == "above" ? InitMode::FromAbove : InitMode::FromBoundaryData;
  s.update = c.update == "jacobi" ? UpdateMode::Jacobi : UpdateMode::GaussSeidel;
  s.relaxation = c.relaxation;
  return s;
}

DomainMask make_mask(const ProblemSpec& p, double h) {
  return classify_nodes(Grid::covering(p.domain, p.dim, h), p.domain);
}

RadialSolution oracle_for(const RunConfig& c) {
  if (c.g != 0.0) throw Error(ErrorCode::BadParameter, "closed forms need zero boundary data");
  if (c.domain == "interval") return oracle_interval(c.radius, c.r);
  if (c.domain == "ball") {
    if (c.n < 2) throw Error(ErrorCode::BadParameter, "ball closed forms need n >= 2");
    if (c.radius * c.r <= c.n - 1.0) return oracle_eikonal_ball(c.n, c.radius, c.r);
    return oracle_ball(c.n, c.radius, c.r);
  }
  if (c.domain == "annulus") {
    if (c.n < 2) throw Error(ErrorCode::BadParameter, "annulus closed forms need n >= 2");
    return oracle_annulus(c.n, c.inner, c.outer, c.r);
  }
  throw Error(ErrorCode::BadParameter, "no closed form for domain '" + c.domain + "'");
}

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  const auto values = echo(c);
  for (const std::string& key : config_keys()) j[key] = values.at(key);
  return j;
}

ordered_json result_json(const SolveResult& r) {
  ordered_json j;
  j["scheme"] = r.scheme.to_string();
  j["sweeps_used"] = r.sweeps_used;
  j["final_defect"] = r.residual_history.empty() ? 0.0 : io::round15(r.residual_history.back());
  j["equation_residual"] = io::round15(r.equation_residual);
  j["relaxation"] = io::round15(r.relaxation);
  return j;
}

struct RunLog {
  const RunConfig& config;
  ordered_json extra = ordered_json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write() const {
    ordered_json j;
    j["version"] = kVersion;
    j["subcommand"] = config.subcommand;
    if (!config.study.empty()) j["study"] = config.study;
    j["kernels"] = kernels::active().name;
    j["config"] = config_json(config);
    for (const auto& [k, v] : extra.items()) j[k] = v;
    j["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    io::write_file(config.output / "run.json", j.dump(2) + "\n");
    std::error_code ignored;
    std::filesystem::remove(config.output / "error.json", ignored);
  }
};

void write_solution(const RunConfig& c, const SolveResult& r, const DomainMask& mask) {
  io::write_file(c.output / "solution.csv", io::field_csv(r.solution, mask));
  io::write_file(c.output / "residuals.csv", io::residual_csv(r.residual_history));
}

int run_solver(const RunConfig& c) {
  RunLog log{c};
  const ProblemSpec p = make_problem(c);
  const DomainMask mask = make_mask(p, c.h);
  const SolverConfig s = make_solver_config(c);
  SolveResult r = [&] {
    if (c.subcommand == "regularized") return regularized_solve(p, mask, c.epsilon, s);
    if (c.subcommand == "dpp") {
      DppConfig d;
      d.dt = c.dt;
      d.directions = c.M;
      d.allow_dt_override = c.dt_override;
      return dpp_value_iteration(p, mask, d, s);
    }
    return sweep_solve(p, mask, s);
  }();
  write_solution(c, r, mask);
  log.extra["result"] = result_json(r);
  log.write();
  return Success;
}

int run_oracle(const RunConfig& c) {
  RunLog log{c};
  const RadialSolution sol = oracle_for(c);
  io::write_file(c.output / "oracle.json", to_json(sol));
  std::string csv = "t,value,slope\n";
  const int samples = 400;
  for (int i = 0; i <= samples; ++i) {
    const double t = sol.t_min() + (sol.t_max() - sol.t_min()) * i / samples;
    const RadialSample s = eval(sol, t);
    csv += io::number(t, 12) + "," + io::number(s.value) + "," + io::number(s.slope) + "\n";
  }
  io::write_file(c.output / "oracle_profile.csv", csv);
  const RadialDiagnostics d = diagnose(sol);
  log.extra["diagnostics"] = {{"continuity_gap", io::round15(d.continuity_gap)},
                              {"min_slope_magnitude", io::round15(d.min_slope_magnitude)},
                              {"max_pde_residual", io::round15(d.max_pde_residual)},
                              {"max_modulus_jump", io::round15(d.max_modulus_jump)},
                              {"min_eikonal_laplacian_slack", io::round15(d.min_eikonal_laplacian_slack)}};
  log.write();
  return Success;
}

int run_compare(const RunConfig& c) {
  RunLog log{c};
  const RadialSolution sol = oracle_for(c);
  const ProblemSpec p = make_problem(c);
  const DomainMask mask = make_mask(p, c.h);
  const SolveResult r = sweep_solve(p, mask, make_solver_config(c));
  const double err = oracle_error(r.solution, mask, sol);
  const double threshold = 3.0 * c.h;
  const bool pass = err < threshold;
  io::write_file(c.output / "compare.csv", "h,sup_error,threshold,pass\n" + io::number(c.h) + "," + io::number(err) +
                                               "," + io::number(threshold) + "," + (pass ? "1" : "0") + "\n");
  write_solution(c, r, mask);
  log.extra["result"] = result_json(r);
  log.extra["sup_error"] = io::round15(err);
  log.extra["threshold"] = io::round15(threshold);
  log.extra["pass"] = pass;
  log.write();
  return pass ? Success : AssertionFailure;
}

int run_freeboundary(const RunConfig& c) {
  RunLog log{c};
  const ProblemSpec p = make_problem(c);
  const DomainMask mask = make_mask(p, c.h);
  const SolveResult r = sweep_solve(p, mask, make_solver_config(c));
  write_solution(c, r, mask);

  const RegionLabeling regions = classify_regions(r.solution, mask, c.delta);
  io::write_file(c.output / "regions.csv", io::regions_csv(regions, mask));
  const RegionLabeling branches = classify_active_branch(r.solution, p, mask);
  io::write_file(c.output / "branches.csv", io::regions_csv(branches, mask));

  ordered_json summary;
  summary["eikonal_fraction"] = io::round15(regions.fraction(Region::Eikonal));
  summary["small_gradient_measure"] = io::round15(small_gradient_measure(r.solution, mask, c.delta));
  const GradientModulusJumps jumps = gradient_modulus_diagnostic(r.solution, mask);
  summary["jump_gradnorm"] = io::round15(jumps.jump_gradnorm);
  summary["jump_gradnorm_central"] = io::round15(jumps.jump_gradnorm_central);
  summary["jump_gradvec"] = io::round15(jumps.jump_gradvec);
  try {
    const InterfaceEstimate est = extract_interface(branches, mask);
    io::write_file(c.output / "interface.csv", io::interface_csv(est, p.dim));
    io::write_file(c.output / "interface.json", io::interface_json(est));
    summary["interface"] = "found";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyInterface) throw;
    io::write_file(c.output / "interface.csv", io::interface_csv({}, p.dim));
    io::write_file(c.output / "interface.json", io::interface_json({}));
    summary["interface"] = "empty";
  }
  log.extra["result"] = result_json(r);
  log.extra["free_boundary"] = summary;
  log.write();
  return Success;
}

std::vector<double> or_default(const std::vector<double>& v, std::vector<double> fallback) {
  return v.empty() ? fallback : v;
}

std::string or_default(const std::string& v, const char* fallback) { return v.empty() ? fallback : v; }

void write_report(const RunConfig& c, const StudyReport& report, const std::string& stem) {
  io::write_file(c.output / (stem + "_report.json"), report.to_json());
  io::write_file(c.output / (stem + "_report.csv"), report.to_csv());
}

int run_validate(const RunConfig& c) {
  RunLog log{c};
  const SolverConfig s = make_solver_config(c);
  std::vector<StudyReport> reports;
  const std::string& study = c.study;
  try {
    if (study == "convergence") {
      reports.push_back(convergence_study(make_fixture(or_default(c.fixture, "interval")),
                                          or_default(c.h_list, {1.0 / 64, 1.0 / 128, 1.0 / 256}), s));
    } else if (study == "epsilon") {
      reports.push_back(epsilon_study(make_fixture(or_default(c.fixture, "interval")),
                                      or_default(c.eps_list, {1e-1, 1e-2, 1e-3}), c.h, s));
    } else if (study == "comparison") {
      const ProblemSpec p = make_problem(c);
      reports.push_back(comparison_battery(p, make_mask(p, c.h), c.trials, c.seed, s));
    } else if (study == "growth") {
      const auto R = or_default(c.R_list, {2, 4, 8});
      reports.push_back(growth_study(c.inner, R, c.r, c.n, {}, s));
      reports.push_back(growth_contrast_study(c.inner, R, {}, s));
    } else if (study == "lipschitz") {
      reports.push_back(lipschitz_study(make_fixture(or_default(c.fixture, "ball")),
                                        or_default(c.h_list, {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}), s));
    } else if (study == "small_gradient") {
      std::vector<Fixture> fixtures;
      if (c.fixture.empty())
        for (const char* f : {"ball_scaled", "interval", "annulus_2piece"}) fixtures.push_back(make_fixture(f));
      else
        fixtures.push_back(make_fixture(c.fixture));
      reports.push_back(small_gradient_study(fixtures, c.h, s));
    } else if (study == "interface") {
      reports.push_back(interface_study(make_fixture(or_default(c.fixture, "annulus_2piece")),
                                        or_default(c.h_list, {1.0 / 64, 1.0 / 128}), s));
    } else if (study == "continuity") {
      reports.push_back(continuity_study(make_fixture(or_default(c.fixture, "ridge_annulus")),
                                         or_default(c.h_list, {1.0 / 64, 1.0 / 128, 1.0 / 256}), s));
    } else {
      throw Error(ErrorCode::Validation, "invalid value for 'study': unknown study '" + study + "'");
    }
  } catch (const StudyAborted& e) {
    write_report(c, e.report(), study);
    throw;
  }

  bool pass = true;
  ordered_json summary = ordered_json::array();
  for (const StudyReport& r : reports) {
    write_report(c, r, r.kind);
    summary.push_back({{"kind", r.kind}, {"passed", r.passed()}});
    pass = pass && r.passed();
  }
  log.extra["reports"] = summary;
  log.extra["passed"] = pass;
  log.write();
  return pass ? Success : AssertionFailure;
}

int run_selfcheck(const RunConfig& c) {
  RunLog log{c};
  bool pass = true;
  ordered_json rows = ordered_json::array();
  for (const DefaultRow& row : default_table()) {
    const bool same = row.cli == row.module;
    pass = pass && same;
    rows.push_back({{"key", row.key}, {"cli", row.cli}, {"module", row.module}, {"match", same}});
  }
  // Scalar and SIMD kernels must agree bitwise on a solved field.
  const ProblemSpec p{Ball{1.0}, 2, 1.0};
  const DomainMask mask = make_mask(p, 1.0 / 32);
  const SolveResult r = sweep_solve(p, mask);
  ordered_json kernel_rows = ordered_json::array();
  for (const kernels::KernelTable* k : kernels::available()) {
    ScalarField a(mask.grid()), b(mask.grid());
    jacobi_update(r.solution, a, mask, p.rhs, kernels::scalar_table());
    jacobi_update(r.solution, b, mask, p.rhs, *k);
    std::size_t mismatches = 0;
    for (std::size_t i : mask.interior_nodes()) mismatches += a[i] != b[i];
    pass = pass && mismatches == 0;
    kernel_rows.push_back({{"kernel", k->name}, {"mismatches", mismatches}});
  }
  ordered_json out;
  out["defaults"] = rows;
  out["kernels"] = kernel_rows;
  out["passed"] = pass;
  io::write_file(c.output / "selfcheck.json", out.dump(2) + "\n");
  log.extra["passed"] = pass;
  log.write();
  return pass ? Success : AssertionFailure;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence: return NonConvergence;
    default: return ConfigError;
  }
}

void report_error(const std::optional<std::filesystem::path>& out, const std::string& code, const std::string& message,
                  int exit_code, const std::vector<double>* history = nullptr) {
  ordered_json j;
  j["error"] = code;
  j["message"] = message;
  j["exit_code"] = exit_code;
  if (history) j["sweeps"] = history->size();
  std::cerr << j.dump() << "\n";
  if (!out) return;
  try {
    io::write_file(*out / "error.json", j.dump(2) + "\n");
    if (history) io::write_file(*out / "residuals.csv", io::residual_csv(*history));
  } catch (const std::exception&) {
  }
}

}  // namespace

int run(const RunConfig& config) {
  const std::string& s = config.subcommand;
  if (s == "solve" || s == "regularized" || s == "dpp") return run_solver(config);
  if (s == "oracle") return run_oracle(config);
  if (s == "compare") return run_compare(config);
  if (s == "freeboundary") return run_freeboundary(config);
  if (s == "validate") return run_validate(config);
  if (s == "selfcheck") return run_selfcheck(config);
  throw Error(ErrorCode::Validation, "unknown subcommand '" + s + "'");
}

int main(int argc, const char* const* argv) {
  CLI::App app{"Solver and diagnostics for min(-Lap u - r, |Du| - 1) = 0 with Dirichlet data", "hjb"};
  app.set_help_flag("--help", "print this help and exit");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "key=value configuration file");

  const RunConfig defaults;
  const auto defaults_echo = echo(defaults);
  std::map<std::string, std::string> flags;
  for (const std::string& key : config_keys()) {
    std::string def = defaults_echo.at(key);
    if (key == "output") def = "$HJB_OUTPUT_DIR or hjb_output";
    app.add_option_function<std::string>("--" + key, [&flags, key](const std::string& v) { flags[key] = v; })
        ->description("default: " + (def.empty() ? std::string("study default") : def));
  }

  std::string study;
  std::vector<CLI::App*> subs;
  subs.push_back(app.add_subcommand("solve", "monotone sweeping solve"));
  subs.push_back(app.add_subcommand("regularized", "eps-regularized solve"));
  subs.push_back(app.add_subcommand("dpp", "dynamic programming value iteration"));
  subs.push_back(app.add_subcommand("oracle", "closed-form radial solution"));
  subs.push_back(app.add_subcommand("compare", "solver against closed form; exit 1 unless error < 3h"));
  subs.push_back(app.add_subcommand("freeboundary", "regions, interface and gradient diagnostics"));
  CLI::App* validate = app.add_subcommand("validate", "run a study");
  validate->add_option("study", study,
                       "convergence | epsilon | comparison | growth | lipschitz | small_gradient | interface | continuity")
      ->required();
  subs.push_back(validate);
  subs.push_back(app.add_subcommand("selfcheck", "defaults table and kernel equivalence"));
  for (CLI::App* sub : subs) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report_error(std::nullopt, "ConfigParse", e.what(), ConfigError);
    return ConfigError;
  }

  std::optional<std::filesystem::path> out;
  try {
    std::map<std::string, std::string> values;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw Error(ErrorCode::ConfigParse, "cannot read config file '" + config_path + "'");
      std::stringstream buffer;
      buffer << f.rdbuf();
      values = parse_config_text(buffer.str());
    }
    for (const auto& [k, v] : flags) values[k] = v;
    if (const auto it = values.find("output"); it != values.end()) {
      out = it->second;
    } else {
      const char* env = std::getenv("HJB_OUTPUT_DIR");
      out = env && *env ? env : "hjb_output";
    }
    RunConfig config = resolve(app.get_subcommands().front()->get_name(), values);
    config.study = study;
    out = config.output;
    return run(config);
  } catch (const NoConvergenceError& e) {
    report_error(out, "NoConvergence", e.what(), NonConvergence, &e.residual_history());
    return NonConvergence;
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    report_error(out, std::string(to_string(e.code())), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    report_error(out, "Internal", e.what(), ConfigError);
    return ConfigError;
  }
}

}  // namespace hjb::cli
