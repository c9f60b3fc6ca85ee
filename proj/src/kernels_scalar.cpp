#include "hjb/kernels.hpp"
#include "hjb/stencil.hpp"

namespace hjb::kernels {
namespace {

void local_update_row(const double* u, double* out, std::size_t len, RowStencil st, double hh_r) {
  for (std::size_t i = 0; i < len; ++i)
    out[i] = stencil::local_update(u + i, st.strides, st.dim, st.h, hh_r);
}

void laplacian_row(const double* u, double* out, std::size_t len, RowStencil st) {
  const double hh = st.h * st.h;
  for (std::size_t i = 0; i < len; ++i) out[i] = stencil::laplacian(u + i, st.strides, st.dim, hh);
}

void upwind_norm_row(const double* u, double* out, std::size_t len, RowStencil st) {
  for (std::size_t i = 0; i < len; ++i) out[i] = stencil::upwind_norm(u + i, st.strides, st.dim, st.h);
}

void central_norm_row(const double* u, double* out, std::size_t len, RowStencil st) {
  for (std::size_t i = 0; i < len; ++i) out[i] = stencil::central_norm(u + i, st.strides, st.dim, st.h);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", local_update_row, laplacian_row, upwind_norm_row,
                                 central_norm_row};
  return table;
}

}  // namespace hjb::kernels
