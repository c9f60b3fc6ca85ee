#pragma once

// Whole-field stencil evaluations over Interior nodes, dispatched to the
// active SIMD kernel table. Non-Interior entries are NaN.

#include "hjb/grid.hpp"
#include "hjb/kernels.hpp"

namespace hjb {

ScalarField laplacian_field(const ScalarField& u, const DomainMask& mask,
                            const kernels::KernelTable& k = kernels::active());
ScalarField upwind_norm_field(const ScalarField& u, const DomainMask& mask,
                              const kernels::KernelTable& k = kernels::active());
ScalarField central_norm_field(const ScalarField& u, const DomainMask& mask,
                               const kernels::KernelTable& k = kernels::active());

/// One Jacobi application of the node update: out = local_update(u) on
/// Interior nodes, u copied elsewhere.
void jacobi_update(const ScalarField& u, ScalarField& out, const DomainMask& mask, double rhs,
                   const kernels::KernelTable& k = kernels::active());

}  // namespace hjb
