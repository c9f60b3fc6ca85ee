#include "hjb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hjb/error.hpp"
#include "hjb/stencil.hpp"

namespace hjb {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::MissingNeighbor: return "MissingNeighbor";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::WrongRegime: return "WrongRegime";
    case ErrorCode::DegenerateMatching: return "DegenerateMatching";
    case ErrorCode::NoInterface: return "NoInterface";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::EmptyInterface: return "EmptyInterface";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::Validation: return "Validation";
  }
  return "Unknown";
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Half-widths of the axis-aligned bounding box, or lower/upper corners.
void bounding_box(const Domain& domain, int dim, Point& lower, Point& upper) {
  lower = {0, 0, 0};
  upper = {0, 0, 0};
  std::visit(overloaded{
                 [&](const Interval& d) { lower[0] = -d.radius, upper[0] = d.radius; },
                 [&](const Ball& d) {
                   for (int a = 0; a < dim; ++a) lower[a] = -d.radius, upper[a] = d.radius;
                 },
                 [&](const Annulus& d) {
                   for (int a = 0; a < dim; ++a) lower[a] = -d.outer, upper[a] = d.outer;
                 },
                 [&](const Box& d) {
                   for (int a = 0; a < dim; ++a) lower[a] = -0.5 * d.widths[a], upper[a] = 0.5 * d.widths[a];
                 },
                 [&](const CustomPredicate& d) { lower = d.lower, upper = d.upper; },
             },
             domain);
}

}  // namespace

double radius_of(const Point& x, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += x[a] * x[a];
  return std::sqrt(s);
}

bool contains(const Domain& domain, const Point& x, int dim) {
  return std::visit(overloaded{
                        [&](const Interval& d) { return std::abs(x[0]) < d.radius; },
                        [&](const Ball& d) { return radius_of(x, dim) < d.radius; },
                        [&](const Annulus& d) {
                          const double r = radius_of(x, dim);
                          return r > d.inner && r < d.outer;
                        },
                        [&](const Box& d) {
                          for (int a = 0; a < dim; ++a)
                            if (!(std::abs(x[a]) < 0.5 * d.widths[a])) return false;
                          return true;
                        },
                        [&](const CustomPredicate& d) { return d.inside(x); },
                    },
                    domain);
}

double diameter(const Domain& domain, int dim) {
  return std::visit(overloaded{
                        [](const Interval& d) { return 2.0 * d.radius; },
                        [](const Ball& d) { return 2.0 * d.radius; },
                        [](const Annulus& d) { return 2.0 * d.outer; },
                        [&](const Box& d) {
                          double s = 0.0;
                          for (int a = 0; a < dim; ++a) s += d.widths[a] * d.widths[a];
                          return std::sqrt(s);
                        },
                        [&](const CustomPredicate& d) {
                          double s = 0.0;
                          for (int a = 0; a < dim; ++a) s += (d.upper[a] - d.lower[a]) * (d.upper[a] - d.lower[a]);
                          return std::sqrt(s);
                        },
                    },
                    domain);
}

double distance_to_boundary(const Domain& domain, const Point& x, int dim) {
  return std::visit(overloaded{
                        [&](const Interval& d) { return d.radius - std::abs(x[0]); },
                        [&](const Ball& d) { return d.radius - radius_of(x, dim); },
                        [&](const Annulus& d) {
                          const double r = radius_of(x, dim);
                          return std::min(r - d.inner, d.outer - r);
                        },
                        [&](const Box& d) {
                          double m = std::numeric_limits<double>::infinity();
                          for (int a = 0; a < dim; ++a) m = std::min(m, 0.5 * d.widths[a] - std::abs(x[a]));
                          return m;
                        },
                        [](const CustomPredicate&) { return std::numeric_limits<double>::quiet_NaN(); },
                    },
                    domain);
}

bool is_radial(const Domain& domain) {
  return std::holds_alternative<Ball>(domain) || std::holds_alternative<Annulus>(domain) ||
         std::holds_alternative<Interval>(domain);
}

std::string describe(const Domain& domain) {
  std::ostringstream os;
  os.precision(12);
  std::visit(overloaded{
                 [&](const Interval& d) { os << "Interval(R=" << d.radius << ")"; },
                 [&](const Ball& d) { os << "Ball(R=" << d.radius << ")"; },
                 [&](const Annulus& d) { os << "Annulus(" << d.inner << ", " << d.outer << ")"; },
                 [&](const Box& d) { os << "Box(" << d.widths[0] << ", " << d.widths[1] << ", " << d.widths[2] << ")"; },
                 [&](const CustomPredicate&) { os << "CustomPredicate"; },
             },
             domain);
  return os.str();
}

void validate_domain(const Domain& domain, int dim) {
  if (dim < 1 || dim > 3) throw Error(ErrorCode::BadParameter, "dimension must be 1, 2 or 3");
  std::visit(overloaded{
                 [&](const Interval& d) {
                   if (dim != 1) throw Error(ErrorCode::BadParameter, "Interval requires dim = 1");
                   if (!(d.radius > 0)) throw Error(ErrorCode::BadParameter, "Interval radius must be positive");
                 },
                 [](const Ball& d) {
                   if (!(d.radius > 0)) throw Error(ErrorCode::BadParameter, "Ball radius must be positive");
                 },
                 [](const Annulus& d) {
                   if (!(d.inner > 0) || !(d.outer > d.inner))
                     throw Error(ErrorCode::BadParameter, "Annulus requires 0 < inner < outer");
                 },
                 [&](const Box& d) {
                   for (int a = 0; a < dim; ++a)
                     if (!(d.widths[a] > 0)) throw Error(ErrorCode::BadParameter, "Box widths must be positive");
                 },
                 [&](const CustomPredicate& d) {
                   if (!d.inside) throw Error(ErrorCode::BadParameter, "CustomPredicate without predicate");
                   for (int a = 0; a < dim; ++a)
                     if (!(d.upper[a] > d.lower[a])) throw Error(ErrorCode::BadParameter, "empty bounding box");
                 },
             },
             domain);
}

Grid::Grid(int dim, Point origin, Index3 extent, double h)
    : dim_(dim), origin_(origin), extent_(extent), h_(h) {
  if (dim < 1 || dim > 3) throw Error(ErrorCode::BadParameter, "grid dimension must be 1, 2 or 3");
  if (!(h > 0) || !std::isfinite(h)) throw Error(ErrorCode::BadParameter, "grid spacing must be positive");
  for (int a = 0; a < 3; ++a) {
    if (a < dim && extent_[a] < 3) throw Error(ErrorCode::BadParameter, "every axis needs at least 3 nodes");
    if (a >= dim) {
      extent_[a] = 1;
      origin_[a] = 0.0;
    }
  }
  stride_ = {1, extent_[0], static_cast<std::ptrdiff_t>(extent_[0]) * extent_[1]};
  size_ = static_cast<std::size_t>(extent_[0]) * extent_[1] * extent_[2];
}

Grid Grid::covering(const Domain& domain, int dim, double h) {
  validate_domain(domain, dim);
  if (!(h > 0)) throw Error(ErrorCode::BadParameter, "grid spacing must be positive");
  Point lower, upper;
  bounding_box(domain, dim, lower, upper);
  Point origin{0, 0, 0};
  Index3 extent{1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    const long lo = static_cast<long>(std::floor(lower[a] / h + 1e-9)) - 1;
    const long hi = static_cast<long>(std::ceil(upper[a] / h - 1e-9)) + 1;
    origin[a] = static_cast<double>(lo) * h;
    extent[a] = static_cast<int>(hi - lo + 1);
  }
  return Grid(dim, origin, extent, h);
}

Index3 Grid::multi_index(std::size_t node) const noexcept {
  const auto n = static_cast<std::ptrdiff_t>(node);
  return {static_cast<int>(n % extent_[0]), static_cast<int>((n / stride_[1]) % extent_[1]),
          static_cast<int>(n / stride_[2])};
}

Point Grid::coord(const Index3& i) const noexcept {
  Point x{0, 0, 0};
  for (int a = 0; a < dim_; ++a) x[a] = origin_[a] + i[a] * h_;
  return x;
}

Point Grid::coord(std::size_t node) const noexcept { return coord(multi_index(node)); }

bool Grid::on_edge(std::size_t node) const noexcept {
  const Index3 i = multi_index(node);
  for (int a = 0; a < dim_; ++a)
    if (i[a] == 0 || i[a] == extent_[a] - 1) return true;
  return false;
}

DomainMask::DomainMask(Grid grid, Domain domain, std::vector<NodeLabel> labels)
    : grid_(std::move(grid)), domain_(std::move(domain)), labels_(std::move(labels)) {
  const std::size_t nx = static_cast<std::size_t>(grid_.extent(0));
  const std::size_t rows = grid_.size() / nx;
  row_begin_.assign(rows + 1, 0);
  for (std::size_t row = 0; row < rows; ++row) {
    row_begin_[row] = segments_.size();
    const std::size_t base = row * nx;
    std::size_t i = 0;
    while (i < nx) {
      if (labels_[base + i] != NodeLabel::Interior) {
        ++i;
        continue;
      }
      const std::size_t start = i;
      while (i < nx && labels_[base + i] == NodeLabel::Interior) ++i;
      segments_.push_back({base + start, i - start});
    }
  }
  row_begin_[rows] = segments_.size();
  for (std::size_t k = 0; k < labels_.size(); ++k) {
    if (labels_[k] == NodeLabel::Interior) interior_nodes_.push_back(k);
    if (labels_[k] == NodeLabel::Boundary) boundary_nodes_.push_back(k);
  }
  interior_count_ = interior_nodes_.size();
}

DomainMask classify_nodes(const Grid& grid, const Domain& domain) {
  validate_domain(domain, grid.dim());
  std::vector<NodeLabel> labels(grid.size(), NodeLabel::Exterior);
  bool any = false;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!grid.on_edge(k) && contains(domain, grid.coord(k), grid.dim())) {
      labels[k] = NodeLabel::Interior;
      any = true;
    }
  }
  if (!any) throw Error(ErrorCode::EmptyDomain, "domain " + describe(domain) + " has no interior node");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (labels[k] != NodeLabel::Interior) continue;
    for (int a = 0; a < grid.dim(); ++a) {
      const std::ptrdiff_t s = grid.stride(a);
      for (std::size_t nb : {k - s, k + s})
        if (labels[nb] == NodeLabel::Exterior) labels[nb] = NodeLabel::Boundary;
    }
  }
  return DomainMask(grid, domain, std::move(labels));
}

ScalarField sample(const DomainMask& mask, const std::function<double(const Point&)>& f) {
  ScalarField u(mask.grid());
  for (std::size_t k = 0; k < u.size(); ++k)
    if (!mask.exterior(k)) u[k] = f(mask.grid().coord(k));
  return u;
}

namespace {

void require_stencil(const ScalarField& u, const DomainMask& mask, std::size_t node) {
  const Grid& g = mask.grid();
  if (!(u.grid() == g)) throw Error(ErrorCode::BadParameter, "field and mask live on different grids");
  if (node >= g.size() || g.on_edge(node))
    throw Error(ErrorCode::MissingNeighbor, "node has no complete axis stencil");
  for (int a = 0; a < g.dim(); ++a) {
    const std::ptrdiff_t s = g.stride(a);
    if (mask.exterior(node - s) || mask.exterior(node + s))
      throw Error(ErrorCode::MissingNeighbor, "axis neighbour is Exterior");
  }
}

}  // namespace

double discrete_laplacian(const ScalarField& u, const DomainMask& mask, std::size_t node) {
  require_stencil(u, mask, node);
  const Grid& g = mask.grid();
  return stencil::laplacian(u.data() + node, g.strides().data(), g.dim(), g.h() * g.h());
}

double upwind_gradient_norm(const ScalarField& u, const DomainMask& mask, std::size_t node) {
  require_stencil(u, mask, node);
  const Grid& g = mask.grid();
  return stencil::upwind_norm(u.data() + node, g.strides().data(), g.dim(), g.h());
}

double central_gradient_norm(const ScalarField& u, const DomainMask& mask, std::size_t node) {
  require_stencil(u, mask, node);
  const Grid& g = mask.grid();
  return stencil::central_norm(u.data() + node, g.strides().data(), g.dim(), g.h());
}

Point central_gradient(const ScalarField& u, const DomainMask& mask, std::size_t node) {
  require_stencil(u, mask, node);
  const Grid& g = mask.grid();
  Point grad{0, 0, 0};
  for (int a = 0; a < g.dim(); ++a) {
    const std::ptrdiff_t s = g.stride(a);
    grad[a] = (u[node + s] - u[node - s]) / (2.0 * g.h());
  }
  return grad;
}

double multilinear_interpolate(const ScalarField& u, const DomainMask& mask, const Point& x) {
  const Grid& g = mask.grid();
  const int dim = g.dim();
  Index3 base{0, 0, 0};
  Point frac{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    const double s = (x[a] - g.origin()[a]) / g.h();
    const double last = g.extent(a) - 1;
    if (!(s >= 0.0 && s <= last)) throw Error(ErrorCode::OutOfDomain, "point outside the grid");
    double cell = std::floor(s);
    if (cell >= last) cell = last - 1;
    base[a] = static_cast<int>(cell);
    frac[a] = s - cell;
  }
  double value = 0.0;
  for (int corner = 0; corner < (1 << dim); ++corner) {
    double w = 1.0;
    Index3 idx = base;
    for (int a = 0; a < dim; ++a) {
      if (corner & (1 << a)) {
        w *= frac[a];
        idx[a] += 1;
      } else {
        w *= 1.0 - frac[a];
      }
    }
    if (w == 0.0) continue;
    const std::size_t k = g.index(idx);
    if (mask.exterior(k)) throw Error(ErrorCode::OutOfDomain, "interpolation cell touches an Exterior node");
    value += w * u[k];
  }
  return value;
}

double max_abs(const ScalarField& u, const DomainMask& mask) {
  double m = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k)
    if (!mask.exterior(k)) m = std::max(m, std::abs(u[k]));
  return m;
}

}  // namespace hjb
