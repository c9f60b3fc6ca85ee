#pragma once

// Piecewise closed-form radial solutions of min(-Lap u - rhs, |Du| - 1) = 0
// on balls, annuli and intervals with zero Dirichlet data, and an independent
// 1-D radial grid solver used to cross-check them.

#include <string>
#include <vector>

namespace hjb {

/// Radial fundamental solution with Phi'(t) = t^(1-n): log t for n = 2,
/// t^(2-n)/(2-n) for n >= 3, and t for n = 1.
double fundamental(int n, double t);
double fundamental_slope(int n, double t);

enum class PieceKind { Eikonal, Poisson };

/// Eikonal pieces: value = a + b*t with b = +-1.
/// Poisson pieces: value = a + b*Phi(t) - rhs*t^2/(2n).
struct RadialPiece {
  double t_lo;
  double t_hi;
  PieceKind kind;
  double a;
  double b;
};

struct RadialSample {
  double value;
  double slope;
};

struct RadialSolution {
  int n = 2;
  double rhs = 1.0;
  std::vector<RadialPiece> pieces;

  double t_min() const { return pieces.front().t_lo; }
  double t_max() const { return pieces.back().t_hi; }
  std::vector<double> interfaces() const;
};

/// Piecewise evaluation; at an interface radius the left piece is used.
RadialSample eval(const RadialSolution& sol, double t);
double curvature(const RadialSolution& sol, double t);

/// Value of the radial operator -(f'' + (n-1) f'/t) at t, from closed forms.
double radial_laplacian_residual(const RadialSolution& sol, double t);

/// v(t) = u(s t) / s: maps a solution with right-hand side rhs on radii
/// [a, b] to one with right-hand side s*rhs on [a/s, b/s].
RadialSolution rescale(const RadialSolution& sol, double s);

RadialSolution oracle_eikonal_ball(int n, double radius, double rhs = 1.0);
RadialSolution oracle_ball(int n, double radius, double rhs = 1.0);
RadialSolution oracle_annulus(int n, double inner, double outer, double rhs = 1.0);
RadialSolution oracle_interval(double radius, double rhs = 1.0);

/// The Poisson/eikonal annulus split computed with the matching condition
/// B Phi'(rho) = 1 in place of the slope condition. Used only to show that
/// the grid solver rejects it.
RadialSolution annulus_with_literal_condition(int n, double inner, double outer);

struct RadialDiagnostics {
  double continuity_gap = 0.0;       // max value jump across interfaces
  double min_slope_magnitude = 0.0;  // over sampled radii
  double max_pde_residual = 0.0;     // Poisson pieces
  double max_modulus_jump = 0.0;     // max ||f'(t-)| - |f'(t+)|| at interfaces
  double min_eikonal_laplacian_slack = 0.0;  // min of -Lap f - rhs over eikonal pieces
};

RadialDiagnostics diagnose(const RadialSolution& sol, int samples_per_piece = 200);

std::string to_json(const RadialSolution& sol);

struct RadialProfile {
  std::vector<double> t;
  std::vector<double> f;
  double residual = 0.0;
  int sweeps = 0;
};

/// Monotone 1-D solve of the radial reduction on an N-point grid over
/// [inner, outer]. inner = 0 gives a ball with a symmetry condition at t = 0.
RadialProfile radial_ode_solve(int n, double inner, double outer, double rhs, int points,
                               double tolerance = 1e-12, int max_sweeps = 2'000'000);

}  // namespace hjb
