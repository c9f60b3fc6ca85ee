#include "hjb/radial_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include <json.hpp>

#include "hjb/error.hpp"

namespace hjb {

double fundamental(int n, double t) {
  if (n == 1) return t;
  if (n == 2) return std::log(t);
  return std::pow(t, 2 - n) / (2 - n);
}

double fundamental_slope(int n, double t) {
  if (n == 1) return 1.0;
  return std::pow(t, 1 - n);
}

namespace {

double fundamental_curvature(int n, double t) {
  if (n == 1) return 0.0;
  return (1 - n) * std::pow(t, -n);
}

// Cone regime iff radius * rhs <= n - 1.
double threshold_radius(int n) { return n - 1.0; }

// Poisson piece value/slope with given coefficients.
double poisson_value(int n, double rhs, double A, double B, double t) {
  return A + B * fundamental(n, t) - rhs * t * t / (2.0 * n);
}
double poisson_slope(int n, double rhs, double B, double t) {
  return B * fundamental_slope(n, t) - rhs * t / n;
}

const RadialPiece& piece_at(const RadialSolution& sol, double t) {
  const double span = sol.t_max() - sol.t_min();
  const double slack = 1e-12 * std::max(1.0, span);
  if (!(t >= sol.t_min() - slack && t <= sol.t_max() + slack))
    throw Error(ErrorCode::OutOfDomain, "radius outside the radial domain");
  for (const RadialPiece& p : sol.pieces)
    if (t <= p.t_hi) return p;
  return sol.pieces.back();
}

// Bisection to width 1e-10 followed by five Newton steps with a
// central-difference derivative. f(lo) < 0 < f(hi) is required.
double find_root(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0) == (fhi < 0)) throw Error(ErrorCode::NoInterface, "matching function does not change sign");
  const bool increasing = flo < 0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == increasing) lo = mid;
    else hi = mid;
  }
  const double a = lo, b = hi;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 5; ++it) {
    const double step = 1e-7 * std::max(1.0, std::abs(x));
    const double d = (f(x + step) - f(x - step)) / (2.0 * step);
    if (d == 0.0 || !std::isfinite(d)) break;
    const double next = x - f(x) / d;
    if (!(next >= a - 1e-9 && next <= b + 1e-9)) break;
    x = next;
  }
  return x;
}

struct Coeffs {
  double A;
  double B;
};

// Poisson piece vanishing at `inner` with slope +1 at rho (rhs = 1).
Coeffs rising_piece(int n, double inner, double rho) {
  const double B = (1.0 + rho / n) / fundamental_slope(n, rho);
  return {inner * inner / (2.0 * n) - B * fundamental(n, inner), B};
}

// Poisson piece vanishing at `outer` with slope -1 at rho (rhs = 1).
Coeffs falling_piece(int n, double outer, double rho) {
  const double B = (rho / n - 1.0) / fundamental_slope(n, rho);
  return {outer * outer / (2.0 * n) - B * fundamental(n, outer), B};
}

RadialPiece poisson_piece(double lo, double hi, Coeffs c) { return {lo, hi, PieceKind::Poisson, c.A, c.B}; }

RadialSolution annulus_unit_rhs(int n, double inner, double outer) {
  RadialSolution sol;
  sol.n = n;
  sol.rhs = 1.0;
  const double T = threshold_radius(n);
  auto f1 = [&](double rho) {
    const Coeffs c = rising_piece(n, inner, rho);
    return poisson_value(n, 1.0, c.A, c.B, rho);
  };
  if (outer <= T) {
    // Poisson on [inner, rho], eikonal outer - t on [rho, outer].
    const double rho = find_root([&](double r) { return f1(r) - (outer - r); }, inner, outer);
    sol.pieces = {poisson_piece(inner, rho, rising_piece(n, inner, rho)),
                  {rho, outer, PieceKind::Eikonal, outer, -1.0}};
    return sol;
  }
  auto ridge = [&](double rho) {
    const Coeffs c2 = falling_piece(n, outer, rho);
    return f1(rho) - poisson_value(n, 1.0, c2.A, c2.B, rho);
  };
  if (inner < T) {
    // Outer Poisson piece glued in a C^1 way to the eikonal cone at T.
    const Coeffs c2 = falling_piece(n, outer, T);
    const double cone = poisson_value(n, 1.0, c2.A, c2.B, T) + T;
    auto three = [&](double rho) { return f1(rho) - (cone - rho); };
    if (three(T) > 0.0) {
      const double rho = find_root(three, inner, T);
      sol.pieces = {poisson_piece(inner, rho, rising_piece(n, inner, rho)),
                    {rho, T, PieceKind::Eikonal, cone, -1.0},
                    poisson_piece(T, outer, c2)};
      return sol;
    }
    // The rising piece cannot reach the cone before T: the two Brownian
    // regions meet at a ridge beyond T.
    const double rho = find_root(ridge, T, outer);
    sol.pieces = {poisson_piece(inner, rho, rising_piece(n, inner, rho)),
                  poisson_piece(rho, outer, falling_piece(n, outer, rho))};
    return sol;
  }
  const double rho = find_root(ridge, inner, outer);
  sol.pieces = {poisson_piece(inner, rho, rising_piece(n, inner, rho)),
                poisson_piece(rho, outer, falling_piece(n, outer, rho))};
  return sol;
}

void require_dimension(int n) {
  if (n < 2) throw Error(ErrorCode::BadParameter, "radial oracles for balls and annuli need n >= 2");
}

}  // namespace

std::vector<double> RadialSolution::interfaces() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < pieces.size(); ++i) out.push_back(pieces[i].t_lo);
  return out;
}

RadialSample eval(const RadialSolution& sol, double t) {
  const RadialPiece& p = piece_at(sol, t);
  if (p.kind == PieceKind::Eikonal) return {p.a + p.b * t, p.b};
  return {poisson_value(sol.n, sol.rhs, p.a, p.b, t), poisson_slope(sol.n, sol.rhs, p.b, t)};
}

double curvature(const RadialSolution& sol, double t) {
  const RadialPiece& p = piece_at(sol, t);
  if (p.kind == PieceKind::Eikonal) return 0.0;
  return p.b * fundamental_curvature(sol.n, t) - sol.rhs / sol.n;
}

double radial_laplacian_residual(const RadialSolution& sol, double t) {
  const RadialSample s = eval(sol, t);
  const double metric = sol.n == 1 ? 0.0 : (sol.n - 1) * s.slope / t;
  return -(curvature(sol, t) + metric);
}

RadialSolution rescale(const RadialSolution& sol, double s) {
  if (!(s > 0)) throw Error(ErrorCode::BadParameter, "scale factor must be positive");
  RadialSolution out;
  out.n = sol.n;
  out.rhs = sol.rhs * s;
  for (const RadialPiece& p : sol.pieces) {
    RadialPiece q = p;
    q.t_lo = p.t_lo / s;
    q.t_hi = p.t_hi / s;
    if (p.kind == PieceKind::Eikonal) {
      q.a = p.a / s;
    } else if (sol.n == 2) {
      q.a = (p.a + p.b * std::log(s)) / s;
      q.b = p.b / s;
    } else {
      // Phi(s t) = s^(2-n) Phi(t) for n != 2
      q.a = p.a / s;
      q.b = p.b * std::pow(s, 1 - sol.n);
    }
    out.pieces.push_back(q);
  }
  return out;
}

RadialSolution oracle_eikonal_ball(int n, double radius, double rhs) {
  require_dimension(n);
  if (!(radius > 0) || !(rhs >= 0)) throw Error(ErrorCode::BadParameter, "radius > 0 and rhs >= 0 required");
  // Ties R*rhs = n-1 belong to the eikonal regime.
  if (radius * rhs > threshold_radius(n))
    throw Error(ErrorCode::WrongRegime, "radius exceeds (n-1)/rhs: use oracle_ball");
  RadialSolution sol;
  sol.n = n;
  sol.rhs = rhs;
  sol.pieces = {{0.0, radius, PieceKind::Eikonal, radius, -1.0}};
  return sol;
}

RadialSolution oracle_ball(int n, double radius, double rhs) {
  require_dimension(n);
  if (!(radius > 0) || !(rhs > 0)) throw Error(ErrorCode::BadParameter, "radius > 0 and rhs > 0 required");
  const double R = radius * rhs;
  const double T = threshold_radius(n);
  if (R <= T) throw Error(ErrorCode::WrongRegime, "radius within (n-1)/rhs: use oracle_eikonal_ball");

  // Unknowns (A, B, C):
  //   A + B Phi(R)          = R^2/(2n)
  //   A + B Phi(T) - C      = T^2/(2n) - T
  //       B Phi'(T)         = T/n - 1
  std::array<std::array<double, 4>, 3> m{{
      {1.0, fundamental(n, R), 0.0, R * R / (2.0 * n)},
      {1.0, fundamental(n, T), -1.0, T * T / (2.0 * n) - T},
      {0.0, fundamental_slope(n, T), 0.0, T / n - 1.0},
  }};
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (std::abs(m[pivot][col]) < 1e-14) throw Error(ErrorCode::DegenerateMatching, "singular matching system");
    std::swap(m[col], m[pivot]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double factor = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= factor * m[col][c];
    }
  }
  const double A = m[0][3] / m[0][0];
  const double B = m[1][3] / m[1][1];
  const double C = m[2][3] / m[2][2];

  RadialSolution sol;
  sol.n = n;
  sol.rhs = 1.0;
  sol.pieces = {{0.0, T, PieceKind::Eikonal, C, -1.0}, {T, R, PieceKind::Poisson, A, B}};
  return rhs == 1.0 ? sol : rescale(sol, rhs);
}

RadialSolution oracle_annulus(int n, double inner, double outer, double rhs) {
  require_dimension(n);
  if (!(inner > 0) || !(outer > inner)) throw Error(ErrorCode::BadParameter, "annulus requires 0 < inner < outer");
  if (!(rhs > 0)) throw Error(ErrorCode::BadParameter, "annulus oracle requires rhs > 0");
  const RadialSolution unit = annulus_unit_rhs(n, inner * rhs, outer * rhs);
  return rhs == 1.0 ? unit : rescale(unit, rhs);
}

RadialSolution oracle_interval(double radius, double rhs) {
  if (!(radius > 0) || !(rhs >= 0)) throw Error(ErrorCode::BadParameter, "radius > 0 and rhs >= 0 required");
  RadialSolution sol;
  sol.n = 1;
  sol.rhs = rhs;
  // (R + rhs R^2/2) - (t + rhs t^2/2) with Phi(t) = t
  sol.pieces = {{0.0, radius, PieceKind::Poisson, radius + rhs * radius * radius / 2.0, -1.0}};
  return sol;
}

RadialSolution annulus_with_literal_condition(int n, double inner, double outer) {
  require_dimension(n);
  if (!(inner > 0) || !(outer > inner) || outer > threshold_radius(n))
    throw Error(ErrorCode::BadParameter, "literal condition is stated for inner < outer <= n-1");
  auto coeffs = [&](double rho) {
    const double B = 1.0 / fundamental_slope(n, rho);
    return Coeffs{inner * inner / (2.0 * n) - B * fundamental(n, inner), B};
  };
  const double rho = find_root(
      [&](double r) {
        const Coeffs c = coeffs(r);
        return poisson_value(n, 1.0, c.A, c.B, r) - (outer - r);
      },
      inner, outer);
  RadialSolution sol;
  sol.n = n;
  sol.rhs = 1.0;
  sol.pieces = {poisson_piece(inner, rho, coeffs(rho)), {rho, outer, PieceKind::Eikonal, outer, -1.0}};
  return sol;
}

RadialDiagnostics diagnose(const RadialSolution& sol, int samples_per_piece) {
  RadialDiagnostics d;
  d.min_slope_magnitude = std::numeric_limits<double>::infinity();
  d.min_eikonal_laplacian_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sol.pieces.size(); ++i) {
    const RadialPiece& p = sol.pieces[i];
    for (int k = 0; k <= samples_per_piece; ++k) {
      const double t = p.t_lo + (p.t_hi - p.t_lo) * k / samples_per_piece;
      if (t <= 0.0) continue;  // centre of a ball: the cone tip has no slope
      double slope, residual;
      if (p.kind == PieceKind::Eikonal) {
        slope = p.b;
        residual = sol.n == 1 ? 0.0 : -(sol.n - 1) * p.b / t;
        d.min_eikonal_laplacian_slack = std::min(d.min_eikonal_laplacian_slack, residual - sol.rhs);
      } else {
        slope = poisson_slope(sol.n, sol.rhs, p.b, t);
        const double curv = p.b * fundamental_curvature(sol.n, t) - sol.rhs / sol.n;
        residual = -(curv + (sol.n == 1 ? 0.0 : (sol.n - 1) * slope / t));
        d.max_pde_residual = std::max(d.max_pde_residual, std::abs(residual - sol.rhs));
      }
      d.min_slope_magnitude = std::min(d.min_slope_magnitude, std::abs(slope));
    }
    if (i == 0) continue;
    const RadialPiece& q = sol.pieces[i - 1];
    const double t = p.t_lo;
    auto value = [&](const RadialPiece& piece) {
      return piece.kind == PieceKind::Eikonal ? piece.a + piece.b * t
                                              : poisson_value(sol.n, sol.rhs, piece.a, piece.b, t);
    };
    auto slope = [&](const RadialPiece& piece) {
      return piece.kind == PieceKind::Eikonal ? piece.b : poisson_slope(sol.n, sol.rhs, piece.b, t);
    };
    d.continuity_gap = std::max(d.continuity_gap, std::abs(value(p) - value(q)));
    d.max_modulus_jump = std::max(d.max_modulus_jump, std::abs(std::abs(slope(p)) - std::abs(slope(q))));
  }
  return d;
}

namespace {
double round15(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}
}  // namespace

std::string to_json(const RadialSolution& sol) {
  nlohmann::ordered_json j;
  j["n"] = sol.n;
  j["rhs"] = round15(sol.rhs);
  j["pieces"] = nlohmann::ordered_json::array();
  for (const RadialPiece& p : sol.pieces) {
    nlohmann::ordered_json q;
    q["kind"] = p.kind == PieceKind::Eikonal ? "eikonal" : "poisson";
    q["interval"] = {round15(p.t_lo), round15(p.t_hi)};
    if (p.kind == PieceKind::Eikonal) q["coefficients"] = {{"c", round15(p.a)}, {"sign", round15(p.b)}};
    else q["coefficients"] = {{"A", round15(p.a)}, {"B", round15(p.b)}};
    j["pieces"].push_back(q);
  }
  j["interfaces"] = nlohmann::ordered_json::array();
  for (double t : sol.interfaces()) j["interfaces"].push_back(round15(t));
  return j.dump(2);
}

RadialProfile radial_ode_solve(int n, double inner, double outer, double rhs, int points, double tolerance,
                               int max_sweeps) {
  if (points < 100) throw Error(ErrorCode::BadParameter, "radial_ode_solve needs at least 100 points");
  if (n < 1 || !(inner >= 0) || !(outer > inner) || !(rhs >= 0))
    throw Error(ErrorCode::BadParameter, "invalid radial problem");
  const bool ball = inner == 0.0;
  const int N = points;
  const double h = (outer - inner) / (N - 1);
  RadialProfile prof;
  prof.t.resize(N);
  for (int i = 0; i < N; ++i) prof.t[i] = inner + i * h;
  std::vector<double>& f = prof.f;
  // Start above the solution; the iteration relaxes downward.
  const double top = (outer - inner) * (1.0 + (outer - inner) * std::max(rhs, 1.0)) + 1.0;
  f.assign(N, top);
  f[N - 1] = 0.0;
  if (!ball) f[0] = 0.0;

  // Forward difference for the first-order term keeps the scheme monotone.
  auto update = [&](int i, bool& poisson) {
    double pc, ec;
    if (i == 0) {
      pc = f[1] + rhs * h * h / (2.0 * n);
      ec = f[1] + h;
    } else {
      const double c = (n - 1) / prof.t[i];
      pc = (rhs * h * h + f[i - 1] + f[i + 1] + c * h * f[i + 1]) / (2.0 + c * h);
      ec = std::min(f[i - 1], f[i + 1]) + h;
    }
    poisson = pc > ec;
    return std::max(pc, ec);
  };

  const double omega = 2.0 / (1.0 + std::sin(M_PI / N));
  const int first = ball ? 0 : 1;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double defect = 0.0;
    const bool forward = sweep % 2 == 0;
    for (int k = 0; k < N - 1 - first; ++k) {
      const int i = forward ? first + k : N - 2 - k;
      bool poisson = false;
      const double t = update(i, poisson);
      const double d = t - f[i];
      defect = std::max(defect, std::abs(d));
      f[i] = poisson ? f[i] + omega * d : t;
    }
    prof.sweeps = sweep + 1;
    if (defect < tolerance) {
      double res = 0.0;
      for (int k = 0; k < N - 1 - first; ++k) {
        bool poisson = false;
        const int i = first + k;
        res = std::max(res, std::abs(update(i, poisson) - f[i]));
      }
      prof.residual = res;
      if (res < tolerance) return prof;
    }
  }
  throw NoConvergenceError("radial_ode_solve exceeded its sweep budget", {});
}

}  // namespace hjb
