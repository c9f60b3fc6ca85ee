// Compiled with -mavx2. Mirrors stencil.hpp operation for operation so the
// results are bitwise identical to the scalar table.

#include <immintrin.h>

#include "hjb/kernels.hpp"
#include "hjb/stencil.hpp"

namespace hjb::kernels::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256d load(const double* p) { return _mm256_loadu_pd(p); }

// select(mask, a, b) = mask ? a : b
inline __m256d select(__m256d mask, __m256d a, __m256d b) { return _mm256_blendv_pd(b, a, mask); }

inline __m256d eikonal(const __m256d* m, int dim, double h) {
  const __m256d vh = _mm256_set1_pd(h);
  if (dim == 1) return _mm256_add_pd(m[0], vh);
  const double hh = h * h;
  const __m256d two_hh = _mm256_set1_pd(2.0 * hh);
  const __m256d half = _mm256_set1_pd(0.5);
  __m256d s0 = _mm256_min_pd(m[0], m[1]);
  __m256d s1 = _mm256_max_pd(m[0], m[1]);
  __m256d s2 = _mm256_setzero_pd();
  if (dim == 3) {
    s2 = _mm256_max_pd(s1, m[2]);
    s1 = _mm256_min_pd(s1, m[2]);
    const __m256d lo = _mm256_min_pd(s0, s1);
    s1 = _mm256_max_pd(s0, s1);
    s0 = lo;
  }
  const __m256d t1 = _mm256_add_pd(s0, vh);
  const __m256d b = _mm256_sub_pd(s1, s0);
  const __m256d root2 = _mm256_sqrt_pd(_mm256_sub_pd(two_hh, _mm256_mul_pd(b, b)));
  const __m256d t2 = _mm256_add_pd(s0, _mm256_mul_pd(_mm256_add_pd(b, root2), half));
  const __m256d one_axis = _mm256_cmp_pd(t1, s1, _CMP_LE_OQ);
  if (dim == 2) return select(one_axis, t1, t2);
  const __m256d c = _mm256_sub_pd(s2, s0);
  const __m256d sum = _mm256_add_pd(b, c);
  const __m256d sq = _mm256_add_pd(_mm256_mul_pd(b, b), _mm256_mul_pd(c, c));
  const __m256d disc = _mm256_sub_pd(_mm256_mul_pd(sum, sum),
                                     _mm256_mul_pd(_mm256_set1_pd(3.0), _mm256_sub_pd(sq, _mm256_set1_pd(hh))));
  const __m256d t3 =
      _mm256_add_pd(s0, _mm256_div_pd(_mm256_add_pd(sum, _mm256_sqrt_pd(disc)), _mm256_set1_pd(3.0)));
  const __m256d two_axis = _mm256_cmp_pd(t2, s2, _CMP_LE_OQ);
  return select(one_axis, t1, select(two_axis, t2, t3));
}

void local_update_row(const double* u, double* out, std::size_t len, RowStencil st, double hh_r) {
  const std::ptrdiff_t* s = st.strides;
  const int dim = st.dim;
  const __m256d vhhr = _mm256_set1_pd(hh_r);
  const __m256d denom = _mm256_set1_pd(static_cast<double>(2 * dim));
  std::size_t i = 0;
  for (; i + kLanes <= len; i += kLanes) {
    const double* p = u + i;
    __m256d sum = _mm256_setzero_pd();
    __m256d m[3] = {};
    for (int a = 0; a < dim; ++a) {
      const __m256d lo = load(p - s[a]);
      const __m256d hi = load(p + s[a]);
      sum = _mm256_add_pd(sum, _mm256_add_pd(lo, hi));
      m[a] = _mm256_min_pd(lo, hi);
    }
    const __m256d pc = _mm256_div_pd(_mm256_add_pd(sum, vhhr), denom);
    _mm256_storeu_pd(out + i, _mm256_max_pd(pc, eikonal(m, dim, st.h)));
  }
  for (; i < len; ++i) out[i] = stencil::local_update(u + i, s, dim, st.h, hh_r);
}

void laplacian_row(const double* u, double* out, std::size_t len, RowStencil st) {
  const std::ptrdiff_t* s = st.strides;
  const double hh = st.h * st.h;
  const __m256d vhh = _mm256_set1_pd(hh);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + kLanes <= len; i += kLanes) {
    const double* p = u + i;
    const __m256d c2 = _mm256_mul_pd(two, load(p));
    __m256d acc = _mm256_setzero_pd();
    for (int a = 0; a < st.dim; ++a)
      acc = _mm256_add_pd(acc, _mm256_sub_pd(_mm256_add_pd(load(p - s[a]), load(p + s[a])), c2));
    _mm256_storeu_pd(out + i, _mm256_div_pd(acc, vhh));
  }
  for (; i < len; ++i) out[i] = stencil::laplacian(u + i, s, st.dim, hh);
}

void upwind_norm_row(const double* u, double* out, std::size_t len, RowStencil st) {
  const std::ptrdiff_t* s = st.strides;
  const __m256d vh = _mm256_set1_pd(st.h);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= len; i += kLanes) {
    const double* p = u + i;
    const __m256d c = load(p);
    __m256d acc = _mm256_setzero_pd();
    for (int a = 0; a < st.dim; ++a) {
      const __m256d dl = _mm256_div_pd(_mm256_sub_pd(c, load(p - s[a])), vh);
      const __m256d dh = _mm256_div_pd(_mm256_sub_pd(c, load(p + s[a])), vh);
      const __m256d d = _mm256_max_pd(_mm256_max_pd(dl, dh), zero);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(acc));
  }
  for (; i < len; ++i) out[i] = stencil::upwind_norm(u + i, s, st.dim, st.h);
}

void central_norm_row(const double* u, double* out, std::size_t len, RowStencil st) {
  const std::ptrdiff_t* s = st.strides;
  const __m256d two_h = _mm256_set1_pd(2.0 * st.h);
  std::size_t i = 0;
  for (; i + kLanes <= len; i += kLanes) {
    const double* p = u + i;
    __m256d acc = _mm256_setzero_pd();
    for (int a = 0; a < st.dim; ++a) {
      const __m256d d = _mm256_div_pd(_mm256_sub_pd(load(p + s[a]), load(p - s[a])), two_h);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(acc));
  }
  for (; i < len; ++i) out[i] = stencil::central_norm(u + i, s, st.dim, st.h);
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{"avx2", local_update_row, laplacian_row, upwind_norm_row, central_norm_row};
  return t;
}

}  // namespace hjb::kernels::avx2
