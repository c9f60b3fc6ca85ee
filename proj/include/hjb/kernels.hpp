#pragma once

// Row kernels over runs of Interior nodes along axis 0. Each kernel reads the
// run starting at `u` (plus its axis neighbours through `strides`) and writes
// `len` results to `out`. Every ISA variant must agree bitwise with the
// scalar reference.

#include <cstddef>
#include <string_view>
#include <vector>

namespace hjb::kernels {

struct RowStencil {
  const std::ptrdiff_t* strides;
  int dim;
  double h;
};

using UpdateRowFn = void (*)(const double* u, double* out, std::size_t len, RowStencil st, double hh_r);
using FieldRowFn = void (*)(const double* u, double* out, std::size_t len, RowStencil st);

struct KernelTable {
  std::string_view name;
  UpdateRowFn local_update;
  FieldRowFn laplacian;
  FieldRowFn upwind_norm;
  FieldRowFn central_norm;
};

const KernelTable& scalar_table();

/// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_table();

/// Every variant usable on this machine, scalar first.
std::vector<const KernelTable*> available();

/// Best available variant. The environment variable HJB_SIMD=scalar|avx2
/// forces a choice; an unavailable request falls back to scalar.
const KernelTable& active();

}  // namespace hjb::kernels
