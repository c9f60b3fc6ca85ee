#pragma once

// Unchecked node-level stencil primitives. `u` points at the centre node and
// `s[a]` is the linear stride of axis a. Callers guarantee all 2*dim axis
// neighbours exist. The SIMD kernels reproduce these operation sequences
// exactly, so any change here must be mirrored in kernels_avx2.cpp.

#include <cmath>
#include <cstddef>

namespace hjb::stencil {

inline double min2(double a, double b) { return a < b ? a : b; }
inline double max2(double a, double b) { return a > b ? a : b; }

inline double neighbour_sum(const double* u, const std::ptrdiff_t* s, int dim) {
  double sum = 0.0;
  for (int a = 0; a < dim; ++a) sum = sum + (u[-s[a]] + u[s[a]]);
  return sum;
}

/// (sum of axis neighbours + h^2 r) / (2 dim); `hh_r` is h*h*r.
inline double poisson_candidate(const double* u, const std::ptrdiff_t* s, int dim, double hh_r) {
  return (neighbour_sum(u, s, dim) + hh_r) / static_cast<double>(2 * dim);
}

/// Root t >= min m_i of sum_i max(t - m_i, 0)^2 = h^2, m_i the smaller axis-i neighbour.
inline double eikonal_from_minima(double m0, double m1, double m2, int dim, double h) {
  const double hh = h * h;
  if (dim == 1) return m0 + h;
  if (dim == 2) {
    const double s0 = min2(m0, m1);
    const double s1 = max2(m0, m1);
    const double t1 = s0 + h;
    if (t1 <= s1) return t1;
    const double b = s1 - s0;
    return s0 + (b + std::sqrt(2.0 * hh - b * b)) * 0.5;
  }
  // three-element sorting network
  double s0 = min2(m0, m1);
  double s1 = max2(m0, m1);
  const double s2 = max2(s1, m2);
  s1 = min2(s1, m2);
  const double lo = min2(s0, s1);
  s1 = max2(s0, s1);
  s0 = lo;
  const double t1 = s0 + h;
  if (t1 <= s1) return t1;
  const double b = s1 - s0;
  const double t2 = s0 + (b + std::sqrt(2.0 * hh - b * b)) * 0.5;
  if (t2 <= s2) return t2;
  const double c = s2 - s0;
  const double sum = b + c;
  const double sq = b * b + c * c;
  return s0 + (sum + std::sqrt(sum * sum - 3.0 * (sq - hh))) / 3.0;
}

inline double eikonal_candidate(const double* u, const std::ptrdiff_t* s, int dim, double h) {
  double m[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) m[a] = min2(u[-s[a]], u[s[a]]);
  return eikonal_from_minima(m[0], m[1], m[2], dim, h);
}

inline double local_update(const double* u, const std::ptrdiff_t* s, int dim, double h, double hh_r) {
  return max2(poisson_candidate(u, s, dim, hh_r), eikonal_candidate(u, s, dim, h));
}

inline double laplacian(const double* u, const std::ptrdiff_t* s, int dim, double hh) {
  double acc = 0.0;
  const double c = u[0];
  for (int a = 0; a < dim; ++a) acc = acc + ((u[-s[a]] + u[s[a]]) - 2.0 * c);
  return acc / hh;
}

inline double upwind_norm(const double* u, const std::ptrdiff_t* s, int dim, double h) {
  double acc = 0.0;
  const double c = u[0];
  for (int a = 0; a < dim; ++a) {
    const double d = max2(max2((c - u[-s[a]]) / h, (c - u[s[a]]) / h), 0.0);
    acc = acc + d * d;
  }
  return std::sqrt(acc);
}

inline double central_norm(const double* u, const std::ptrdiff_t* s, int dim, double h) {
  double acc = 0.0;
  const double two_h = 2.0 * h;
  for (int a = 0; a < dim; ++a) {
    const double d = (u[s[a]] - u[-s[a]]) / two_h;
    acc = acc + d * d;
  }
  return std::sqrt(acc);
}

}  // namespace hjb::stencil
