#pragma once

// Experiment harness: refinement studies against the radial oracles, the
// eps-study, comparison batteries, Lipschitz tracking and the growth trend
// on truncated exterior domains.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hjb/error.hpp"
#include "hjb/hjb_solver.hpp"
#include "hjb/radial_oracle.hpp"

namespace hjb {

/// Named test problem with its closed-form solution when one exists.
struct Fixture {
  std::string name;
  ProblemSpec problem;
  std::optional<RadialSolution> oracle;
};

/// interval, eikonal_ball, ball, ball_scaled, annulus_2piece, annulus_3piece,
/// ridge_annulus, box_affine.
Fixture make_fixture(const std::string& name);
std::vector<std::string> fixture_names();

/// Sup-norm over Interior nodes of |u - oracle(|x|)|.
double oracle_error(const ScalarField& u, const DomainMask& mask, const RadialSolution& oracle);

/// One pass/fail row: observed value against an open or closed bound on
/// either side. pass() recomputes from the stored numbers.
struct Check {
  std::string name;
  double observed = 0.0;
  std::optional<double> lower;
  std::optional<double> upper;
  bool strict = true;

  bool pass() const;
};

struct StudyReport {
  std::string kind;
  std::string fixture;
  std::string parameter;  // column holding the study parameter
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_labels;  // optional, one per row
  std::optional<double> rate;  // log-log slope, only with >= 3 runs
  std::vector<Check> checks;
  bool partial = false;
  std::string note;

  bool passed() const;
  std::vector<double> column(const std::string& name) const;
  std::string to_json() const;
  std::string to_csv() const;
};

/// Thrown when a solve inside a study fails; carries the runs completed.
class StudyAborted : public NoConvergenceError {
 public:
  StudyAborted(const NoConvergenceError& cause, StudyReport partial)
      : NoConvergenceError(cause.what(), cause.residual_history()), report_(std::move(partial)) {}
  const StudyReport& report() const noexcept { return report_; }

 private:
  StudyReport report_;
};

/// Named thresholds used by every study check.
struct Thresholds {
  double rate_low = 0.8;
  double rate_high = 1.2;
  double epsilon_gap_factor = 5.0;
  double comparison_slack = 10.0;  // times the solver tolerance
  double lipschitz_spread = 1.5;
  double growth_factor = 2.0;
  double small_gradient_fraction = 0.02;
  double small_gradient_delta = 0.05;
  double lipschitz_margin = 0.25;
  double interface_window = 2.0;   // times h
  double continuity_final = 0.1;
  double gradvec_floor = 0.5;
  double interval_error = 2.0;     // times h
  double ball_error = 3.0;         // times h
};
const Thresholds& thresholds();

/// Least-squares slope of log(error) against log(h).
double fitted_rate(const std::vector<double>& h, const std::vector<double>& error);

StudyReport convergence_study(const Fixture& fixture, const std::vector<double>& h_list,
                              const SolverConfig& config = {});

StudyReport epsilon_study(const Fixture& fixture, const std::vector<double>& eps_list, double h,
                          const SolverConfig& config = {});

/// Boundary data g1 uniform in [0, 0.2] per Boundary node, then one pass of
/// averaging with the Boundary axis neighbours; g2 = g1 + an independent
/// field drawn the same way. Also runs a constant shift pair and an
/// identical pair.
StudyReport comparison_battery(const ProblemSpec& spec, const DomainMask& mask, int trials, std::uint64_t seed,
                               const SolverConfig& config = {});

struct HPolicy {
  double fixed_h = 0.0;             // used when positive
  int nodes_per_outer_radius = 128;  // otherwise h = R / this
  double h_for(double outer) const { return fixed_h > 0.0 ? fixed_h : outer / nodes_per_outer_radius; }
};

/// Probe value u(2 r_in e1) on Annulus(r_in, R) with zero data, dim >= 2.
StudyReport growth_study(double r_in, const std::vector<double>& R_list, double rhs, int dim = 2,
                         HPolicy h_policy = {}, const SolverConfig& config = {});

/// One-dimensional counterpart with zero time cost: the probe stays bounded.
StudyReport growth_contrast_study(double r_in, const std::vector<double>& R_list, HPolicy h_policy = {},
                                  const SolverConfig& config = {});

/// Ratio max |D_h u| / (max |u| + 1) over Interior nodes at distance
/// >= 0.25 from the boundary, per h.
StudyReport lipschitz_study(const Fixture& fixture, const std::vector<double>& h_list,
                            const SolverConfig& config = {});

/// small_gradient_measure per fixture at one h.
StudyReport small_gradient_study(const std::vector<Fixture>& fixtures, double h, const SolverConfig& config = {});

/// Interface radius against the oracle interfaces at each h.
StudyReport interface_study(const Fixture& fixture, const std::vector<double>& h_list,
                            const SolverConfig& config = {});

/// gradient_modulus_diagnostic per h: jump_gradnorm decreasing with final
/// value < 0.1 while jump_gradvec stays > 0.5.
StudyReport continuity_study(const Fixture& fixture, const std::vector<double>& h_list,
                             const SolverConfig& config = {});

}  // namespace hjb
