#include "hjb/fields.hpp"

#include <algorithm>

namespace hjb {
namespace {

ScalarField apply(const ScalarField& u, const DomainMask& mask, kernels::FieldRowFn fn) {
  const Grid& g = mask.grid();
  ScalarField out(g);
  const kernels::RowStencil st{g.strides().data(), g.dim(), g.h()};
  for (const Segment& s : mask.segments()) fn(u.data() + s.start, out.data() + s.start, s.length, st);
  return out;
}

}  // namespace

ScalarField laplacian_field(const ScalarField& u, const DomainMask& mask, const kernels::KernelTable& k) {
  return apply(u, mask, k.laplacian);
}

ScalarField upwind_norm_field(const ScalarField& u, const DomainMask& mask, const kernels::KernelTable& k) {
  return apply(u, mask, k.upwind_norm);
}

ScalarField central_norm_field(const ScalarField& u, const DomainMask& mask, const kernels::KernelTable& k) {
  return apply(u, mask, k.central_norm);
}

void jacobi_update(const ScalarField& u, ScalarField& out, const DomainMask& mask, double rhs,
                   const kernels::KernelTable& k) {
  const Grid& g = mask.grid();
  std::copy(u.values().begin(), u.values().end(), out.values().begin());
  const kernels::RowStencil st{g.strides().data(), g.dim(), g.h()};
  const double hh_r = g.h() * g.h() * rhs;
  for (const Segment& s : mask.segments()) k.local_update(u.data() + s.start, out.data() + s.start, s.length, st, hh_r);
}

}  // namespace hjb
