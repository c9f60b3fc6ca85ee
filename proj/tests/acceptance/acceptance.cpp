// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hjb/free_boundary.hpp"
#include "hjb/hjb_solver.hpp"
#include "hjb/validation.hpp"

using namespace hjb;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DomainMask mask_for(const ProblemSpec& p, double h) { return classify_nodes(Grid::covering(p.domain, p.dim, h), p.domain); }

double interior_gap(const ScalarField& a, const ScalarField& b, const DomainMask& m) {
  double gap = 0;
  for (std::size_t k : m.interior_nodes()) gap = std::max(gap, std::abs(a[k] - b[k]));
  return gap;
}

std::string failed_checks(const StudyReport& r) {
  std::string s;
  for (const Check& c : r.checks)
    if (!c.pass()) s += " " + c.name + "=" + fmt("%.4g", c.observed);
  return s.empty() ? "" : " failing:" + s;
}

Outcome closed_form_1d() {
  const double h = 1.0 / 256;
  const Fixture f = make_fixture("interval");
  const DomainMask m = mask_for(f.problem, h);
  const double e = oracle_error(sweep_solve(f.problem, m).solution, m, *f.oracle);
  const StudyReport r = convergence_study(f, {1.0 / 64, 1.0 / 128, 1.0 / 256});
  return {e < 2 * h && *r.rate >= 0.8 && *r.rate <= 1.2, fmt("error %.3g (< %.3g), rate %.3f", e, 2 * h, *r.rate)};
}

Outcome eikonal_regime() {
  const double h = 1.0 / 128;
  const Fixture f = make_fixture("eikonal_ball");
  const DomainMask m = mask_for(f.problem, h);
  const ScalarField u = sweep_solve(f.problem, m).solution;
  const double e = oracle_error(u, m, *f.oracle);
  const double frac = classify_regions(u, m, 0.05).fraction(Region::Eikonal);
  return {e < 3 * h && frac >= 0.98, fmt("error %.3g (< %.3g), eikonal fraction %.4f", e, 3 * h, frac)};
}

Outcome two_regime_ball() {
  const double h = 1.0 / 128;
  const Fixture f = make_fixture("ball");
  const DomainMask m = mask_for(f.problem, h);
  const ScalarField u = sweep_solve(f.problem, m).solution;
  const double e = oracle_error(u, m, *f.oracle);
  const InterfaceEstimate est = extract_interface(classify_active_branch(u, f.problem, m), m);
  const double off = std::abs(*est.rho_hat - 1.0);
  return {e < 3 * h && off < 2 * h, fmt("error %.3g (< %.3g), interface %.5f (|off| %.3g < %.3g)", e, 3 * h,
                                        *est.rho_hat, off, 2 * h)};
}

Outcome annulus_free_boundary() {
  const double h = 1.0 / 128;
  const Fixture f = make_fixture("annulus_2piece");
  const DomainMask m = mask_for(f.problem, h);
  const ScalarField u = sweep_solve(f.problem, m).solution;
  const InterfaceEstimate est = extract_interface(classify_active_branch(u, f.problem, m), m);
  const double rho = f.oracle->interfaces().front();
  const double literal = annulus_with_literal_condition(2, 0.1, 0.9).interfaces().front();
  const double e = std::abs(*est.rho_hat - rho), el = std::abs(*est.rho_hat - literal);
  return {e < 2 * h && e < el, fmt("rho_hat %.5f, corrected %.5f (err %.3g < %.3g), literal %.5f (err %.3g)",
                                   *est.rho_hat, rho, e, 2 * h, literal, el)};
}

Outcome gradient_modulus_continuity() {
  const StudyReport r = continuity_study(make_fixture("ridge_annulus"), {1.0 / 64, 1.0 / 128, 1.0 / 256});
  const auto n = r.column("jump_gradnorm"), v = r.column("jump_gradvec");
  return {r.passed(), fmt("jump_gradnorm %.3g, %.3g, %.3g; jump_gradvec min %.3g", n[0], n[1], n[2],
                          *std::min_element(v.begin(), v.end())) +
                          failed_checks(r)};
}

Outcome epsilon_approximation() {
  const double h = 1.0 / 128;
  const StudyReport r = epsilon_study(make_fixture("interval"), {1e-1, 1e-2, 1e-3}, h);
  const auto g = r.column("gap");
  return {r.passed(), fmt("gaps %.4g, %.4g, %.4g; %s", g[0], g[1], g[2], r.note.c_str()) + failed_checks(r)};
}

Outcome comparison_principle() {
  const ProblemSpec p{Ball{1.0}, 2, 1.0};
  const StudyReport r = comparison_battery(p, mask_for(p, 1.0 / 64), 25, 1);
  double worst = -INFINITY;
  for (double v : r.column("max_violation")) worst = std::max(worst, v);
  return {r.passed(), fmt("25 trials, worst u1 - u2 = %.3g", worst) + failed_checks(r)};
}

Outcome lipschitz_and_small_gradient() {
  const StudyReport lip = lipschitz_study(make_fixture("ball_scaled"), {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256});
  const StudyReport sg = small_gradient_study(
      {make_fixture("ball_scaled"), make_fixture("interval"), make_fixture("annulus_2piece")}, 1.0 / 256);
  const auto q = lip.column("ratio");
  const auto mu = sg.column("measure");
  return {lip.passed() && sg.passed(),
          fmt("ratio spread %.3f; measures %.3g, %.3g, %.3g", *std::max_element(q.begin(), q.end()) /
                                                                  *std::min_element(q.begin(), q.end()),
              mu[0], mu[1], mu[2]) +
              failed_checks(lip) + failed_checks(sg)};
}

Outcome dpp_cross_validation() {
  const ProblemSpec p{Ball{1.0}, 2, 1.0};
  const DomainMask m = mask_for(p, 1.0 / 64);
  const double gap = interior_gap(dpp_value_iteration(p, m).solution, sweep_solve(p, m).solution, m);
  return {gap < 5e-2, fmt("sup gap %.3g (< 0.05)", gap)};
}

Outcome growth_trend() {
  const StudyReport g = growth_study(0.5, {2, 4, 8}, 1.0, 2);
  const StudyReport c = growth_contrast_study(0.5, {2, 4, 8});
  const auto p = g.column("probe"), q = c.column("probe");
  return {g.passed() && c.passed(),
          fmt("probe %.4g, %.4g, %.4g; 1-D %.4g, %.4g, %.4g", p[0], p[1], p[2], q[0], q[1], q[2]) + failed_checks(g) +
              failed_checks(c)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "hjb_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::string> runs{
      "solve --domain annulus --inner 0.1 --outer 0.9 --h 0.015625",
      "regularized --epsilon 0.01 --h 0.03125",
      "dpp --h 0.03125",
      "oracle --domain ball --radius 2",
      "compare --domain ball --radius 2 --h 0.03125",
      "freeboundary --domain annulus --inner 0.1 --outer 0.9 --h 0.015625",
      "validate comparison --h 0.0625 --trials 10 --seed 7",
      "validate growth --R_list 2,4 --h 0.0625",
  };
  std::size_t files = 0;
  std::string bad;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (const char* side : {"a", "b"}) {
      const fs::path out = root / std::to_string(i) / side;
      const std::string cmd = std::string(HJB_CLI) + " " + runs[i] + " --output " + out.string() + " 2>/dev/null";
      if (std::system(cmd.c_str()) != 0) bad += " [" + runs[i] + " exited nonzero]";
    }
    const fs::path a = root / std::to_string(i) / "a", b = root / std::to_string(i) / "b";
    for (const auto& entry : fs::directory_iterator(a)) {
      const std::string name = entry.path().filename().string();
      ++files;
      if (name == "run.json") {
        auto ja = nlohmann::json::parse(slurp(a / name)), jb = nlohmann::json::parse(slurp(b / name));
        for (auto* j : {&ja, &jb}) {
          j->erase("wall_time");
          (*j)["config"].erase("output");
        }
        if (ja != jb) bad += " " + std::to_string(i) + "/" + name;
      } else if (slurp(a / name) != slurp(b / name)) {
        bad += " " + std::to_string(i) + "/" + name;
      }
    }
  }
  fs::remove_all(root);
  return {bad.empty(), fmt("%zu subcommands, %zu files compared", runs.size(), files) + (bad.empty() ? "" : ";" + bad)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"closed-form 1-D reproduction", closed_form_1d},
      {"eikonal-regime reproduction", eikonal_regime},
      {"two-regime ball", two_regime_ball},
      {"annulus free boundary and matching-condition arbitration", annulus_free_boundary},
      {"|Du| continuity", gradient_modulus_continuity},
      {"epsilon approximation", epsilon_approximation},
      {"discrete comparison principle", comparison_principle},
      {"Lipschitz boundedness and small-gradient measure", lipschitz_and_small_gradient},
      {"DPP cross-validation", dpp_cross_validation},
      {"growth trend", growth_trend},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures ? 1 : 0;
}
