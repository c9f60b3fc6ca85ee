#pragma once

// Grid solvers for min(-Lap u - r, |Du| - 1) = 0 with Dirichlet data:
// monotone sweeping, the viscous approximation -eps Lap u = max(eps r, 1 - |Du|),
// and value iteration of the two-regime dynamic programming principle.

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hjb/grid.hpp"

namespace hjb {

class BoundaryData {
 public:
  BoundaryData(double constant = 0.0) : source_(constant) {}
  BoundaryData(std::function<double(const Point&)> f) : source_(std::move(f)) {}
  BoundaryData(ScalarField values) : source_(std::move(values)) {}

  double at(const DomainMask& mask, std::size_t node) const;
  bool is_constant() const { return std::holds_alternative<double>(source_); }

 private:
  std::variant<double, std::function<double(const Point&)>, ScalarField> source_;
};

struct ProblemSpec {
  Domain domain;
  int dim = 2;
  double rhs = 1.0;  // time-cost rate of the Brownian regime
  BoundaryData g = 0.0;
};

void validate(const ProblemSpec& spec);

enum class InitMode { FromAbove, FromBoundaryData };
enum class UpdateMode { GaussSeidel, Jacobi };

struct SolverConfig {
  double tolerance = 1e-10;
  int max_sweeps = 10'000;
  InitMode init = InitMode::FromAbove;
  UpdateMode update = UpdateMode::GaussSeidel;
  /// Over-relaxation applied to nodes where the Brownian branch is active.
  /// Unset: 2 / (1 + sin(pi h / diam)). 1 gives plain Gauss-Seidel.
  std::optional<double> relaxation;
};

void validate(const SolverConfig& config);

struct SchemeTag {
  enum class Kind { Sweep, Regularized, Dpp } kind = Kind::Sweep;
  double epsilon = 0.0;
  double dt = 0.0;
  int directions = 0;

  std::string to_string() const;
};

struct SolveResult {
  ScalarField solution;
  /// Per-sweep fixed-point defect max |update(u) - u| over Interior nodes.
  std::vector<double> residual_history;
  int sweeps_used = 0;
  double wall_time = 0.0;  // seconds
  SchemeTag scheme;
  double relaxation = 1.0;
  double equation_residual = 0.0;  // residual() of the returned field
};

struct DppConfig {
  std::optional<double> dt;  // default h^2 / (2n)
  int directions = 16;       // 2-D; 1-D always uses +-e1
  bool allow_dt_override = false;
};

void validate(const DppConfig& config, const Grid& grid);

/// (sum of the 2n axis neighbours + h^2 r) / (2n).
double poisson_candidate(const ScalarField& u, const DomainMask& mask, std::size_t node, double rhs);

/// Upwind local eikonal solve: root t of sum_i max(t - m_i, 0)^2 = h^2.
double eikonal_candidate(const ScalarField& u, const DomainMask& mask, std::size_t node);

/// max(poisson_candidate, eikonal_candidate): the node value solving the
/// discrete min-equation with neighbours frozen.
double local_update(const ScalarField& u, const DomainMask& mask, std::size_t node, const ProblemSpec& spec);

/// Field with g on Boundary nodes and the chosen initial guess inside.
ScalarField initial_field(const ProblemSpec& spec, const DomainMask& mask, InitMode mode);

SolveResult sweep_solve(const ProblemSpec& spec, const DomainMask& mask, const SolverConfig& config = {});

/// max over Interior nodes of |min(-Lap_h u - r, |D_h u| - 1)|.
double residual(const ScalarField& u, const ProblemSpec& spec, const DomainMask& mask);

/// max over Interior nodes of |local_update(u) - u|.
double fixed_point_defect(const ScalarField& u, const ProblemSpec& spec, const DomainMask& mask);

SolveResult regularized_solve(const ProblemSpec& spec, const DomainMask& mask, double epsilon,
                              const SolverConfig& config = {});

/// max over Interior nodes of |eps (-Lap_h u) - max(eps r, 1 - |D_h u|)|.
double regularized_residual(const ScalarField& u, const ProblemSpec& spec, const DomainMask& mask,
                            double epsilon);

SolveResult dpp_value_iteration(const ProblemSpec& spec, const DomainMask& mask, const DppConfig& dpp = {},
                                const SolverConfig& config = {});

/// Unit directions used by the DPP eikonal branch.
std::vector<Point> dpp_directions(int dim, int count);

double default_relaxation(const ProblemSpec& spec, const DomainMask& mask);

}  // namespace hjb
