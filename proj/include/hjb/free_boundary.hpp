#pragma once

// Regime classification, interface extraction and gradient-modulus
// diagnostics computed from a converged grid solution.

#include <cstdint>
#include <optional>
#include <vector>

#include "hjb/grid.hpp"
#include "hjb/hjb_solver.hpp"

namespace hjb {

inline constexpr double kDefaultDelta = 0.05;
inline constexpr double kDiagnosticMargin = 0.1;

enum class Region : std::uint8_t { Brownian, Eikonal };

enum class LabelRule : std::uint8_t {
  GradientThreshold,  // Brownian iff |D_h u| > 1 + delta
  ActiveBranch,       // Brownian iff the Poisson candidate wins the node update
};

struct RegionLabeling {
  std::vector<std::size_t> nodes;  // Interior nodes in grid order
  std::vector<Region> labels;      // parallel to nodes
  double delta = 0.0;
  LabelRule rule = LabelRule::GradientThreshold;

  std::size_t count(Region r) const;
  double fraction(Region r) const;
};

/// Threshold labeling with delta in (0, 0.5).
RegionLabeling classify_regions(const ScalarField& u, const DomainMask& mask, double delta = kDefaultDelta);

/// Labels each Interior node by the branch that attains the max in the
/// discrete node update. Locates interfaces where |Du| meets 1 tangentially,
/// which a gradient threshold resolves only to O(sqrt(delta)).
RegionLabeling classify_active_branch(const ScalarField& u, const ProblemSpec& spec, const DomainMask& mask);

struct InterfaceCluster {
  double rho_hat;
  double spread;
  std::size_t cells;
  /// spread <= 4h. Wider clusters are bands of label noise, typically where
  /// the staircase boundary layer flattens the level sets of the solution.
  bool sharp;
};

struct InterfaceEstimate {
  /// Midpoints of axis-adjacent Interior node pairs with different labels,
  /// excluding pairs with a node within the boundary margin.
  std::vector<Point> cells;
  /// Radial domains only: cells grouped by radius (split at gaps above 3h),
  /// in increasing radius.
  std::vector<InterfaceCluster> clusters;
  /// Radial domains only: mean and max - min radius over the cells of the
  /// sharp clusters.
  std::optional<double> rho_hat;
  std::optional<double> spread;
};

/// boundary_margin defaults to 4h. Throws EmptyInterface when no cell
/// remains or, on radial domains, when no cluster is sharp.
InterfaceEstimate extract_interface(const RegionLabeling& labeling, const DomainMask& mask,
                                    std::optional<double> boundary_margin = std::nullopt);

struct GradientModulusJumps {
  /// Max |difference| of the upwind gradient norm |D_h u| over adjacent pairs.
  double jump_gradnorm = 0.0;
  /// Same with the central-difference gradient norm.
  double jump_gradnorm_central = 0.0;
  /// Max Euclidean norm of the difference of central gradient vectors.
  double jump_gradvec = 0.0;
  std::size_t pairs = 0;
};

/// Jumps over axis-adjacent Interior pairs whose nodes both lie at distance
/// >= margin from the boundary. For CustomPredicate domains every pair counts.
GradientModulusJumps gradient_modulus_diagnostic(const ScalarField& u, const DomainMask& mask,
                                                 double margin = kDiagnosticMargin);

/// Fraction of Interior nodes with |D_h u| < 1 - delta.
double small_gradient_measure(const ScalarField& u, const DomainMask& mask, double delta = kDefaultDelta);

}  // namespace hjb
