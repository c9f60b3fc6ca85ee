#include "hjb/free_boundary.hpp"

#include <algorithm>
#include <cmath>

#include "hjb/error.hpp"
#include "hjb/fields.hpp"
#include "hjb/stencil.hpp"

namespace hjb {

std::size_t RegionLabeling::count(Region r) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), r));
}

double RegionLabeling::fraction(Region r) const {
  return labels.empty() ? 0.0 : static_cast<double>(count(r)) / static_cast<double>(labels.size());
}

RegionLabeling classify_regions(const ScalarField& u, const DomainMask& mask, double delta) {
  if (!(delta > 0.0 && delta < 0.5)) throw Error(ErrorCode::BadParameter, "delta must lie in (0, 0.5)");
  const ScalarField norm = upwind_norm_field(u, mask);
  RegionLabeling out;
  out.delta = delta;
  out.rule = LabelRule::GradientThreshold;
  for (std::size_t k : mask.interior_nodes()) {
    out.nodes.push_back(k);
    out.labels.push_back(norm[k] > 1.0 + delta ? Region::Brownian : Region::Eikonal);
  }
  return out;
}

RegionLabeling classify_active_branch(const ScalarField& u, const ProblemSpec& spec, const DomainMask& mask) {
  const Grid& g = mask.grid();
  const double hh_r = g.h() * g.h() * spec.rhs;
  RegionLabeling out;
  out.rule = LabelRule::ActiveBranch;
  for (std::size_t k : mask.interior_nodes()) {
    const double* p = u.data() + k;
    const double pc = stencil::poisson_candidate(p, g.strides().data(), g.dim(), hh_r);
    const double ec = stencil::eikonal_candidate(p, g.strides().data(), g.dim(), g.h());
    out.nodes.push_back(k);
    out.labels.push_back(pc > ec ? Region::Brownian : Region::Eikonal);
  }
  return out;
}

InterfaceEstimate extract_interface(const RegionLabeling& labeling, const DomainMask& mask,
                                    std::optional<double> boundary_margin) {
  const Grid& g = mask.grid();
  const double margin = boundary_margin.value_or(4.0 * g.h());
  std::vector<std::int8_t> label(g.size(), -1);
  for (std::size_t i = 0; i < labeling.nodes.size(); ++i) {
    const std::size_t k = labeling.nodes[i];
    const double d = distance_to_boundary(mask.domain(), g.coord(k), g.dim());
    if (std::isnan(d) || d >= margin) label[k] = static_cast<std::int8_t>(labeling.labels[i]);
  }

  InterfaceEstimate est;
  for (std::size_t k : labeling.nodes) {
    if (label[k] < 0) continue;
    const Point x = g.coord(k);
    for (int a = 0; a < g.dim(); ++a) {
      const std::size_t nb = k + static_cast<std::size_t>(g.stride(a));
      if (nb >= g.size() || label[nb] < 0 || label[nb] == label[k]) continue;
      Point mid = x;
      mid[a] += 0.5 * g.h();
      est.cells.push_back(mid);
    }
  }
  if (est.cells.empty()) throw Error(ErrorCode::EmptyInterface, "labeling has a single region");
  if (!is_radial(mask.domain())) return est;

  std::vector<double> radii;
  radii.reserve(est.cells.size());
  for (const Point& c : est.cells) radii.push_back(radius_of(c, g.dim()));
  std::sort(radii.begin(), radii.end());

  double sum = 0.0, lo = INFINITY, hi = -INFINITY;
  std::size_t used = 0;
  std::size_t first = 0;
  for (std::size_t i = 1; i <= radii.size(); ++i) {
    if (i < radii.size() && radii[i] - radii[i - 1] <= 3.0 * g.h()) continue;
    double s = 0.0;
    for (std::size_t j = first; j < i; ++j) s += radii[j];
    const double spread = radii[i - 1] - radii[first];
    const bool sharp = spread <= 4.0 * g.h();
    est.clusters.push_back({s / static_cast<double>(i - first), spread, i - first, sharp});
    if (sharp) {
      sum += s;
      used += i - first;
      lo = std::min(lo, radii[first]);
      hi = std::max(hi, radii[i - 1]);
    }
    first = i;
  }
  if (used == 0) throw Error(ErrorCode::EmptyInterface, "no sharp interface cluster");
  est.rho_hat = sum / static_cast<double>(used);
  est.spread = hi - lo;
  return est;
}

GradientModulusJumps gradient_modulus_diagnostic(const ScalarField& u, const DomainMask& mask, double margin) {
  const Grid& g = mask.grid();
  const ScalarField upwind = upwind_norm_field(u, mask);
  const ScalarField central = central_norm_field(u, mask);

  std::vector<unsigned char> keep(g.size(), 0);
  for (std::size_t k : mask.interior_nodes()) {
    const double d = distance_to_boundary(mask.domain(), g.coord(k), g.dim());
    keep[k] = std::isnan(d) || d >= margin;
  }

  GradientModulusJumps out;
  for (std::size_t k : mask.interior_nodes()) {
    if (!keep[k]) continue;
    const Point gk = central_gradient(u, mask, k);
    for (int a = 0; a < g.dim(); ++a) {
      const std::size_t nb = k + static_cast<std::size_t>(g.stride(a));
      if (nb >= g.size() || !keep[nb]) continue;
      const Point gn = central_gradient(u, mask, nb);
      double vec = 0.0;
      for (int b = 0; b < g.dim(); ++b) vec += (gk[b] - gn[b]) * (gk[b] - gn[b]);
      out.jump_gradnorm = std::max(out.jump_gradnorm, std::abs(upwind[k] - upwind[nb]));
      out.jump_gradnorm_central = std::max(out.jump_gradnorm_central, std::abs(central[k] - central[nb]));
      out.jump_gradvec = std::max(out.jump_gradvec, std::sqrt(vec));
      ++out.pairs;
    }
  }
  return out;
}

double small_gradient_measure(const ScalarField& u, const DomainMask& mask, double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw Error(ErrorCode::BadParameter, "delta must lie in [0, 1)");
  const ScalarField norm = upwind_norm_field(u, mask);
  std::size_t small = 0;
  for (std::size_t k : mask.interior_nodes()) small += norm[k] < 1.0 - delta;
  return static_cast<double>(small) / static_cast<double>(mask.interior_count());
}

}  // namespace hjb
