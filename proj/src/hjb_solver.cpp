#include "hjb/hjb_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "hjb/error.hpp"
#include "hjb/fields.hpp"
#include "hjb/stencil.hpp"

namespace hjb {

double BoundaryData::at(const DomainMask& mask, std::size_t node) const {
  if (const double* c = std::get_if<double>(&source_)) return *c;
  if (const auto* f = std::get_if<std::function<double(const Point&)>>(&source_)) return (*f)(mask.grid().coord(node));
  const ScalarField& field = std::get<ScalarField>(source_);
  if (!(field.grid() == mask.grid())) throw Error(ErrorCode::BadParameter, "boundary field lives on another grid");
  return field[node];
}

void validate(const ProblemSpec& spec) {
  validate_domain(spec.domain, spec.dim);
  if (!(spec.rhs >= 0) || !std::isfinite(spec.rhs)) throw Error(ErrorCode::BadParameter, "rhs must be >= 0");
}

void validate(const SolverConfig& config) {
  if (!(config.tolerance > 0)) throw Error(ErrorCode::BadParameter, "tolerance must be positive");
  if (config.max_sweeps < 1) throw Error(ErrorCode::BadParameter, "max_sweeps must be >= 1");
  if (config.relaxation && !(*config.relaxation >= 1.0 && *config.relaxation < 2.0))
    throw Error(ErrorCode::BadParameter, "relaxation must lie in [1, 2)");
}

void validate(const DppConfig& config, const Grid& grid) {
  const double natural = grid.h() * grid.h() / (2.0 * grid.dim());
  if (config.dt) {
    if (!(*config.dt > 0)) throw Error(ErrorCode::BadParameter, "dt must be positive");
    if (std::abs(*config.dt - natural) > 1e-12 * natural && !config.allow_dt_override)
      throw Error(ErrorCode::BadParameter,
                  "dt must equal h^2/(2n) so the Brownian sphere is the axis stencil (set the override flag)");
  }
  if (grid.dim() == 2 && config.directions < 4) throw Error(ErrorCode::BadParameter, "need at least 4 directions");
  if (grid.dim() == 3 && config.directions < 6) throw Error(ErrorCode::BadParameter, "need at least 6 directions");
}

std::string SchemeTag::to_string() const {
  std::ostringstream os;
  os.precision(12);
  switch (kind) {
    case Kind::Sweep: os << "Sweep"; break;
    case Kind::Regularized: os << "Regularized(" << epsilon << ")"; break;
    case Kind::Dpp: os << "DPP(" << dt << ", " << directions << ")"; break;
  }
  return os.str();
}

namespace {

using Clock = std::chrono::steady_clock;

void require_interior_stencil(const ScalarField& u, const DomainMask& mask, std::size_t node) {
  const Grid& g = mask.grid();
  if (!(u.grid() == g)) throw Error(ErrorCode::BadParameter, "field and mask live on different grids");
  if (node >= g.size() || g.on_edge(node)) throw Error(ErrorCode::MissingNeighbor, "node has no complete stencil");
  for (int a = 0; a < g.dim(); ++a)
    if (mask.exterior(node - g.stride(a)) || mask.exterior(node + g.stride(a)))
      throw Error(ErrorCode::MissingNeighbor, "axis neighbour is Exterior");
}

// Visits Interior nodes lexicographically; bit a of `orientation` reverses axis a.
template <class Visit>
void sweep_nodes(const DomainMask& mask, unsigned orientation, Visit&& visit) {
  const Grid& g = mask.grid();
  const int ny = g.extent(1);
  const int nz = g.extent(2);
  const bool rev0 = orientation & 1u;
  const bool rev1 = orientation & 2u;
  const bool rev2 = orientation & 4u;
  for (int kk = 0; kk < nz; ++kk) {
    const int k = rev2 ? nz - 1 - kk : kk;
    for (int jj = 0; jj < ny; ++jj) {
      const int j = rev1 ? ny - 1 - jj : jj;
      const auto segs = mask.row_segments(static_cast<std::size_t>(j) + static_cast<std::size_t>(k) * ny);
      if (!rev0) {
        for (const Segment& s : segs)
          for (std::size_t i = 0; i < s.length; ++i) visit(s.start + i);
      } else {
        for (auto it = segs.rbegin(); it != segs.rend(); ++it)
          for (std::size_t i = it->length; i-- > 0;) visit(it->start + i);
      }
    }
  }
}

double boundary_max(const ProblemSpec& spec, const DomainMask& mask) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k : mask.boundary_nodes()) m = std::max(m, spec.g.at(mask, k));
  return m;
}

double boundary_min(const ProblemSpec& spec, const DomainMask& mask) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k : mask.boundary_nodes()) m = std::min(m, spec.g.at(mask, k));
  return m;
}

void check_inputs(const ProblemSpec& spec, const DomainMask& mask, const SolverConfig& config) {
  validate(spec);
  validate(config);
  if (spec.dim != mask.grid().dim()) throw Error(ErrorCode::BadParameter, "problem and grid dimensions differ");
  if (mask.interior_count() == 0) throw Error(ErrorCode::EmptyDomain, "no interior node");
}

// Converged once the a posteriori bound q/(1-q) * defect on the distance to
// the fixed point is below the threshold, with the contraction factor q
// estimated from the defect decay over the last sweeps. Defects at roundoff
// level always stop.
bool settled(const std::vector<double>& history, double threshold, const ScalarField& u, const DomainMask& mask) {
  constexpr std::size_t window = 8;
  const double d = history.back();
  if (!(d < threshold)) return false;
  if (d <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, max_abs(u, mask))) return true;
  const std::size_t back = std::min(window, history.size() - 1);
  if (back == 0) return false;
  const double q = std::pow(d / history[history.size() - 1 - back], 1.0 / static_cast<double>(back));
  return q < 1.0 && d * q / (1.0 - q) < threshold;
}

// Gauss-Seidel driver shared by the three schemes. `node_update` returns the
// exact local solution and a relaxation weight w in [0, 1]; the node is
// over-relaxed by 1 + w (omega - 1).
template <class NodeUpdate>
SolveResult gauss_seidel(const ProblemSpec& spec, const DomainMask& mask, const SolverConfig& config,
                         double stop_threshold, double omega, NodeUpdate&& node_update, const char* name,
                         bool damp_on_stall = false) {
  const auto start = Clock::now();
  SolveResult result{initial_field(spec, mask, config.init), {}, 0, 0.0, {}, omega, 0.0};
  ScalarField& u = result.solution;
  // Plain Gauss-Seidel cycles through all axis orientations, which carries
  // eikonal information across the domain in a few sweeps. Over-relaxation
  // loses most of its speed-up when the ordering changes, so it keeps one.
  const unsigned orientations = 1u << mask.grid().dim();
  const auto orientation = [&](int sweep) { return omega == 1.0 ? static_cast<unsigned>(sweep) % orientations : 0u; };
  // Over-relax only nodes whose weight is unchanged since the previous
  // sweep; relaxing across a branch switch makes the iteration cycle.
  std::vector<double> last_weight(u.size(), 0.0);
  // Optional stagnation guard: halve omega - 1 when the defect has not
  // improved by 10% within `patience` sweeps. Only the path changes.
  constexpr int patience = 128;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  bool converged = false;
  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    double defect = 0.0;
    sweep_nodes(mask, orientation(sweep), [&](std::size_t k) {
      double weight = 0.0;
      const double t = node_update(u.data() + k, k, weight);
      const double d = t - u[k];
      defect = std::max(defect, std::abs(d));
      u[k] = weight > 0.0 && weight == last_weight[k] ? u[k] + (1.0 + weight * (omega - 1.0)) * d : t;
      last_weight[k] = weight;
    });
    result.residual_history.push_back(defect);
    result.sweeps_used = sweep + 1;
    if (!std::isfinite(defect)) break;
    if (defect < 0.9 * best) {
      best = defect;
      since_best = 0;
    } else if (++since_best >= patience && damp_on_stall && omega > 1.0) {
      omega = 1.0 + 0.5 * (omega - 1.0);
      best = defect;
      since_best = 0;
    }
    if (settled(result.residual_history, stop_threshold, u, mask)) {
      converged = true;
      break;
    }
  }
  result.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  if (!converged)
    throw NoConvergenceError(std::string(name) + " did not converge within max_sweeps",
                             std::move(result.residual_history));
  return result;
}

// Jacobi iteration through the SIMD row kernels; deterministic and
// order-independent, without over-relaxation.
SolveResult jacobi_solve(const ProblemSpec& spec, const DomainMask& mask, const SolverConfig& config) {
  const auto start = Clock::now();
  SolveResult result{initial_field(spec, mask, config.init), {}, 0, 0.0, {}, 1.0, 0.0};
  ScalarField next = result.solution;
  bool converged = false;
  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    jacobi_update(result.solution, next, mask, spec.rhs);
    double defect = 0.0;
    for (std::size_t k : mask.interior_nodes()) defect = std::max(defect, std::abs(next[k] - result.solution[k]));
    std::swap(result.solution, next);
    result.residual_history.push_back(defect);
    result.sweeps_used = sweep + 1;
    if (settled(result.residual_history, config.tolerance, result.solution, mask)) {
      converged = true;
      break;
    }
  }
  result.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  if (!converged)
    throw NoConvergenceError("Jacobi sweep_solve did not converge within max_sweeps",
                             std::move(result.residual_history));
  return result;
}

}  // namespace

double poisson_candidate(const ScalarField& u, const DomainMask& mask, std::size_t node, double rhs) {
  require_interior_stencil(u, mask, node);
  const Grid& g = mask.grid();
  return stencil::poisson_candidate(u.data() + node, g.strides().data(), g.dim(), g.h() * g.h() * rhs);
}

double eikonal_candidate(const ScalarField& u, const DomainMask& mask, std::size_t node) {
  require_interior_stencil(u, mask, node);
  const Grid& g = mask.grid();
  return stencil::eikonal_candidate(u.data() + node, g.strides().data(), g.dim(), g.h());
}

double local_update(const ScalarField& u, const DomainMask& mask, std::size_t node, const ProblemSpec& spec) {
  require_interior_stencil(u, mask, node);
  const Grid& g = mask.grid();
  return stencil::local_update(u.data() + node, g.strides().data(), g.dim(), g.h(), g.h() * g.h() * spec.rhs);
}

ScalarField initial_field(const ProblemSpec& spec, const DomainMask& mask, InitMode mode) {
  ScalarField u(mask.grid());
  for (std::size_t k : mask.boundary_nodes()) {
    u[k] = spec.g.at(mask, k);
    if (!std::isfinite(u[k])) throw Error(ErrorCode::BadParameter, "boundary data must be finite");
  }
  double start;
  if (mode == InitMode::FromAbove) {
    // Discrete supersolution bound.
    const double diam = diameter(spec.domain, spec.dim);
    start = boundary_max(spec, mask) + diam * (1.0 + diam * std::max(spec.rhs, 1.0));
  } else {
    // -Lap u >= 0 keeps the solution above the smallest boundary value.
    start = boundary_min(spec, mask);
  }
  for (std::size_t k : mask.interior_nodes()) u[k] = start;
  return u;
}

double default_relaxation(const ProblemSpec& spec, const DomainMask& mask) {
  const double diam = diameter(spec.domain, spec.dim);
  return 2.0 / (1.0 + std::sin(M_PI * mask.grid().h() / diam));
}

SolveResult sweep_solve(const ProblemSpec& spec, const DomainMask& mask, const SolverConfig& config) {
  check_inputs(spec, mask, config);
  const Grid& g = mask.grid();
  const std::ptrdiff_t* s = g.strides().data();
  const int dim = g.dim();
  const double h = g.h();
  const double hh_r = h * h * spec.rhs;

  SolveResult result = config.update == UpdateMode::Jacobi
                           ? jacobi_solve(spec, mask, config)
                           : gauss_seidel(
                                 spec, mask, config, config.tolerance,
                                 config.relaxation.value_or(default_relaxation(spec, mask)),
                                 [&](double* p, std::size_t, double& weight) {
                                   const double pc = stencil::poisson_candidate(p, s, dim, hh_r);
                                   const double ec = stencil::eikonal_candidate(p, s, dim, h);
                                   weight = pc > ec;
                                   return stencil::max2(pc, ec);
                                 },
                                 "sweep_solve");
  result.scheme = {SchemeTag::Kind::Sweep};
  result.equation_residual = residual(result.solution, spec, mask);
  return result;
}

double residual(const ScalarField& u, const ProblemSpec& spec, const DomainMask& mask) {
  const ScalarField lap = laplacian_field(u, mask);
  const ScalarField grad = upwind_norm_field(u, mask);
  double r = 0.0;
  for (std::size_t k : mask.interior_nodes())
    r = std::max(r, std::abs(std::min(-lap[k] - spec.rhs, grad[k] - 1.0)));
  return r;
}

double fixed_point_defect(const ScalarField& u, const ProblemSpec& spec, const DomainMask& mask) {
  ScalarField next(mask.grid());
  jacobi_update(u, next, mask, spec.rhs);
  double d = 0.0;
  for (std::size_t k : mask.interior_nodes()) d = std::max(d, std::abs(next[k] - u[k]));
  return d;
}

namespace {

struct RegularizedNode {
  double value;
  bool brownian;
};

// Solves eps (2n t - sum)/h^2 = max(eps r, 1 - |D_h u|(t)) by bisection.
RegularizedNode regularized_node(const double* p, const std::ptrdiff_t* s, int dim, double h, double eps,
                                 double rhs) {
  const double hh = h * h;
  const double sum = stencil::neighbour_sum(p, s, dim);
  double m[3] = {0, 0, 0};
  double mmin = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim; ++a) {
    m[a] = stencil::min2(p[-s[a]], p[s[a]]);
    mmin = std::min(mmin, m[a]);
  }
  const double floor_rate = eps * rhs;
  auto gradient = [&](double t) {
    double acc = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double d = std::max(t - m[a], 0.0) / h;
      acc += d * d;
    }
    return std::sqrt(acc);
  };
  auto excess = [&](double t) { return eps * (2.0 * dim * t - sum) / hh - std::max(floor_rate, 1.0 - gradient(t)); };
  double lo = mmin - h;
  double hi = (sum + hh * std::max(floor_rate, 1.0) / eps) / (2.0 * dim);
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (excess(mid) < 0.0) lo = mid;
    else hi = mid;
  }
  const double t = 0.5 * (lo + hi);
  return {t, floor_rate >= 1.0 - gradient(t)};
}

}  // namespace

SolveResult regularized_solve(const ProblemSpec& spec, const DomainMask& mask, double epsilon,
                              const SolverConfig& config) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) throw Error(ErrorCode::BadParameter, "epsilon must be positive");
  check_inputs(spec, mask, config);
  const Grid& g = mask.grid();
  const std::ptrdiff_t* s = g.strides().data();
  const int dim = g.dim();
  const double h = g.h();
  const double omega = config.relaxation.value_or(default_relaxation(spec, mask));
  const double gradient_weight = 1.0 / (1.0 + h / (2.0 * std::sqrt(static_cast<double>(dim)) * epsilon));
  SolveResult result = gauss_seidel(
      spec, mask, config, config.tolerance, omega,
      [&](double* p, std::size_t, double& weight) {
        // Gradient-branch weight: diffusion share 2n eps/h^2 over
        // 2n eps/h^2 + sqrt(n)/h of the linearized local equation.
        const RegularizedNode n = regularized_node(p, s, dim, h, epsilon, spec.rhs);
        weight = n.brownian ? 1.0 : gradient_weight;
        return n.value;
      },
      "regularized_solve", true);
  result.scheme = {SchemeTag::Kind::Regularized, epsilon};
  result.equation_residual = regularized_residual(result.solution, spec, mask, epsilon);
  return result;
}

double regularized_residual(const ScalarField& u, const ProblemSpec& spec, const DomainMask& mask,
                            double epsilon) {
  const ScalarField lap = laplacian_field(u, mask);
  const ScalarField grad = upwind_norm_field(u, mask);
  double r = 0.0;
  for (std::size_t k : mask.interior_nodes())
    r = std::max(r, std::abs(-epsilon * lap[k] - std::max(epsilon * spec.rhs, 1.0 - grad[k])));
  return r;
}

std::vector<Point> dpp_directions(int dim, int count) {
  std::vector<Point> dirs;
  if (dim == 1) return {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
  auto snap = [](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; };
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * M_PI * k / count;
      dirs.push_back({snap(std::cos(a)), snap(std::sin(a)), 0.0});
    }
    return dirs;
  }
  // Fibonacci lattice on the unit sphere.
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / count;
    const double rho = std::sqrt(1.0 - z * z);
    const double phi = golden * k;
    dirs.push_back({snap(rho * std::cos(phi)), snap(rho * std::sin(phi)), snap(z)});
  }
  return dirs;
}

namespace {

struct Corner {
  std::ptrdiff_t offset;
  double weight;
};

// Multilinear interpolation at x + dt*theta, excluding the centre node whose
// weight is handled implicitly by the local fixed-point solve.
struct Direction {
  std::vector<Corner> corners;
  double moving_weight;  // 1 - centre weight
};

}  // namespace

SolveResult dpp_value_iteration(const ProblemSpec& spec, const DomainMask& mask, const DppConfig& dpp,
                                const SolverConfig& config) {
  check_inputs(spec, mask, config);
  const Grid& g = mask.grid();
  validate(dpp, g);
  const int dim = g.dim();
  const double h = g.h();
  const double natural_dt = h * h / (2.0 * dim);
  const double dt = dpp.dt.value_or(natural_dt);
  // Brownian branch: axis-stencil average plus r*dt, i.e. (sum + 2n r dt)/(2n).
  const double brownian_cost = dpp.dt ? 2.0 * dim * spec.rhs * dt : h * h * spec.rhs;
  const std::ptrdiff_t* s = g.strides().data();

  std::vector<Direction> dirs;
  for (const Point& theta : dpp_directions(dim, dpp.directions)) {
    Direction d;
    const int corners = 1 << dim;
    double moving = 0.0;
    for (int c = 1; c < corners; ++c) {
      double w = 1.0;
      std::ptrdiff_t off = 0;
      for (int a = 0; a < dim; ++a) {
        const double frac = dt * std::abs(theta[a]) / h;
        if (c & (1 << a)) {
          w *= frac;
          off += (theta[a] > 0 ? 1 : -1) * s[a];
        } else {
          w *= 1.0 - frac;
        }
      }
      if (w > 0.0) {
        d.corners.push_back({off, w});
        moving += w;
      }
    }
    d.moving_weight = moving;
    dirs.push_back(std::move(d));
  }

  const double omega = config.relaxation.value_or(default_relaxation(spec, mask));
  const auto labels = mask.labels();
  SolveResult result = gauss_seidel(
      spec, mask, config, config.tolerance * dt, omega,
      [&](double* p, std::size_t k, double& weight) {
        const double pc = stencil::poisson_candidate(p, s, dim, brownian_cost);
        double ec = std::numeric_limits<double>::infinity();
        for (const Direction& d : dirs) {
          double acc = 0.0;
          bool usable = true;
          for (const Corner& c : d.corners) {
            if (labels[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + c.offset)] == NodeLabel::Exterior) {
              usable = false;
              break;
            }
            acc += c.weight * p[c.offset];
          }
          // Directions whose cell leaves the computational set are dropped.
          if (usable) ec = std::min(ec, (acc + dt) / d.moving_weight);
        }
        weight = pc > ec;
        return std::max(pc, ec);
      },
      "dpp_value_iteration");
  result.scheme = {SchemeTag::Kind::Dpp, 0.0, dt, dim == 1 ? 2 : dpp.directions};
  result.equation_residual = residual(result.solution, spec, mask);
  return result;
}

}  // namespace hjb
