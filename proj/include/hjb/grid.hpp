#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hjb {

using Point = std::array<double, 3>;
using Index3 = std::array<int, 3>;

// Domain descriptors. All are centred at the origin except CustomPredicate.
struct Interval {
  double radius;
};
struct Ball {
  double radius;
};
struct Annulus {
  double inner;
  double outer;
};
struct Box {
  Point widths;  // full width per axis
};
struct CustomPredicate {
  std::function<bool(const Point&)> inside;
  Point lower;
  Point upper;
};

using Domain = std::variant<Interval, Ball, Annulus, Box, CustomPredicate>;

/// Open-set membership of the first `dim` coordinates of `x`.
bool contains(const Domain& domain, const Point& x, int dim);

double diameter(const Domain& domain, int dim);

/// Euclidean distance from an inside point to the boundary of the domain.
/// Returns NaN for CustomPredicate, where no closed form is available.
double distance_to_boundary(const Domain& domain, const Point& x, int dim);

/// True for Ball, Annulus and Interval descriptors.
bool is_radial(const Domain& domain);

std::string describe(const Domain& domain);

void validate_domain(const Domain& domain, int dim);

double radius_of(const Point& x, int dim);

/// Uniform Cartesian lattice, x(i) = origin + i*h componentwise.
/// Axes beyond `dim` have extent 1.
class Grid {
 public:
  Grid(int dim, Point origin, Index3 extent, double h);

  /// Smallest grid aligned with 0 that holds the domain plus one node of
  /// margin on every side.
  static Grid covering(const Domain& domain, int dim, double h);

  int dim() const noexcept { return dim_; }
  double h() const noexcept { return h_; }
  const Point& origin() const noexcept { return origin_; }
  int extent(int axis) const noexcept { return extent_[axis]; }
  const Index3& extent() const noexcept { return extent_; }
  std::size_t size() const noexcept { return size_; }
  std::ptrdiff_t stride(int axis) const noexcept { return stride_[axis]; }
  const std::array<std::ptrdiff_t, 3>& strides() const noexcept { return stride_; }

  std::size_t index(const Index3& i) const noexcept {
    return static_cast<std::size_t>(i[0] + stride_[1] * i[1] + stride_[2] * i[2]);
  }
  Index3 multi_index(std::size_t node) const noexcept;
  Point coord(std::size_t node) const noexcept;
  Point coord(const Index3& i) const noexcept;

  /// True when the node has no neighbour on some active axis.
  bool on_edge(std::size_t node) const noexcept;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int dim_;
  Point origin_;
  Index3 extent_;
  double h_;
  std::array<std::ptrdiff_t, 3> stride_;
  std::size_t size_;
};

enum class NodeLabel : std::uint8_t { Interior, Boundary, Exterior };

/// Contiguous run of Interior nodes along axis 0.
struct Segment {
  std::size_t start;
  std::size_t length;
};

class DomainMask {
 public:
  DomainMask(Grid grid, Domain domain, std::vector<NodeLabel> labels);

  const Grid& grid() const noexcept { return grid_; }
  const Domain& domain() const noexcept { return domain_; }
  NodeLabel label(std::size_t node) const noexcept { return labels_[node]; }
  bool interior(std::size_t node) const noexcept { return labels_[node] == NodeLabel::Interior; }
  bool exterior(std::size_t node) const noexcept { return labels_[node] == NodeLabel::Exterior; }
  std::span<const NodeLabel> labels() const noexcept { return labels_; }

  std::size_t interior_count() const noexcept { return interior_count_; }
  std::span<const std::size_t> boundary_nodes() const noexcept { return boundary_nodes_; }
  std::span<const std::size_t> interior_nodes() const noexcept { return interior_nodes_; }

  /// Interior segments of row `row`, where row = j + k * extent(1).
  std::span<const Segment> row_segments(std::size_t row) const noexcept {
    return {segments_.data() + row_begin_[row], segments_.data() + row_begin_[row + 1]};
  }
  std::size_t row_count() const noexcept { return row_begin_.size() - 1; }
  std::span<const Segment> segments() const noexcept { return segments_; }

 private:
  Grid grid_;
  Domain domain_;
  std::vector<NodeLabel> labels_;
  std::vector<std::size_t> interior_nodes_;
  std::vector<std::size_t> boundary_nodes_;
  std::vector<Segment> segments_;
  std::vector<std::size_t> row_begin_;
  std::size_t interior_count_ = 0;
};

/// Interior: inside the domain and off the grid edge. Boundary: non-Interior
/// nodes with an axis neighbour that is Interior. Everything else Exterior.
DomainMask classify_nodes(const Grid& grid, const Domain& domain);

/// One real per grid node. Exterior nodes hold NaN unless written.
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double fill = std::numeric_limits<double>::quiet_NaN())
      : grid_(grid), values_(grid.size(), fill) {}

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double& operator[](std::size_t node) noexcept { return values_[node]; }
  double operator[](std::size_t node) const noexcept { return values_[node]; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Samples f at every non-Exterior node.
ScalarField sample(const DomainMask& mask, const std::function<double(const Point&)>& f);

double discrete_laplacian(const ScalarField& u, const DomainMask& mask, std::size_t node);

/// sqrt(sum_i max((u(x)-u(x+h e_i))/h, (u(x)-u(x-h e_i))/h, 0)^2)
double upwind_gradient_norm(const ScalarField& u, const DomainMask& mask, std::size_t node);

double central_gradient_norm(const ScalarField& u, const DomainMask& mask, std::size_t node);
Point central_gradient(const ScalarField& u, const DomainMask& mask, std::size_t node);

double multilinear_interpolate(const ScalarField& u, const DomainMask& mask, const Point& x);

/// Maximum over non-Exterior nodes of |u|.
double max_abs(const ScalarField& u, const DomainMask& mask);

}  // namespace hjb
