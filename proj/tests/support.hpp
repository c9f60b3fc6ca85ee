#pragma once

#include <cmath>

#include "hjb/grid.hpp"
#include "hjb/hjb_solver.hpp"

namespace hjb::test {

inline DomainMask mask_for(const ProblemSpec& spec, double h) {
  return classify_nodes(Grid::covering(spec.domain, spec.dim, h), spec.domain);
}

inline DomainMask mask_for(const Domain& domain, int dim, double h) {
  return classify_nodes(Grid::covering(domain, dim, h), domain);
}

/// Node closest to `x`.
inline std::size_t node_at(const Grid& g, const Point& x) {
  Index3 i{0, 0, 0};
  for (int a = 0; a < g.dim(); ++a) i[a] = static_cast<int>(std::lround((x[a] - g.origin()[a]) / g.h()));
  return g.index(i);
}

}  // namespace hjb::test
