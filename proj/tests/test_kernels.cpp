#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <random>

#include "hjb/fields.hpp"
#include "hjb/kernels.hpp"
#include "support.hpp"

using namespace hjb;

namespace {

bool same_bits(const ScalarField& a, const ScalarField& b, const DomainMask& m) {
  for (std::size_t k : m.interior_nodes())
    if (std::memcmp(a.data() + k, b.data() + k, sizeof(double)) != 0) return false;
  return true;
}

ScalarField random_field(const DomainMask& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  ScalarField u(m.grid(), 0.0);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = U(rng);
  // Ties between neighbours exercise the eikonal cascade branches.
  for (std::size_t k = 0; k < u.size(); k += 7) u[k] = 0.25;
  return u;
}

}  // namespace

TEST_CASE("scalar table is always available and listed first") {
  const auto all = kernels::available();
  REQUIRE(!all.empty());
  CHECK(all.front() == &kernels::scalar_table());
  CHECK(kernels::scalar_table().name == "scalar");
}

TEST_CASE("every kernel variant matches the scalar reference bitwise") {
  const std::vector<std::pair<Domain, int>> cases{
      {Interval{1.0}, 1}, {Ball{1.0}, 2}, {Annulus{0.3, 1.0}, 2}, {Ball{0.5}, 3}};
  for (const kernels::KernelTable* k : kernels::available()) {
    for (const auto& [domain, dim] : cases) {
      CAPTURE(k->name);
      CAPTURE(dim);
      const DomainMask m = test::mask_for(domain, dim, dim == 3 ? 0.05 : 0.02);
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        const ScalarField u = random_field(m, seed);
        const auto& s = kernels::scalar_table();
        CHECK(same_bits(laplacian_field(u, m, s), laplacian_field(u, m, *k), m));
        CHECK(same_bits(upwind_norm_field(u, m, s), upwind_norm_field(u, m, *k), m));
        CHECK(same_bits(central_norm_field(u, m, s), central_norm_field(u, m, *k), m));
        ScalarField a(m.grid()), b(m.grid());
        jacobi_update(u, a, m, 1.0, s);
        jacobi_update(u, b, m, 1.0, *k);
        CHECK(same_bits(a, b, m));
      }
    }
  }
}

TEST_CASE("field kernels agree with the node-level functions") {
  const DomainMask m = test::mask_for(Ball{1.0}, 2, 0.05);
  const ScalarField u = random_field(m, 9);
  const ScalarField lap = laplacian_field(u, m);
  const ScalarField up = upwind_norm_field(u, m);
  const ScalarField cn = central_norm_field(u, m);
  for (std::size_t k : m.interior_nodes()) {
    CHECK(lap[k] == discrete_laplacian(u, m, k));
    CHECK(up[k] == upwind_gradient_norm(u, m, k));
    CHECK(cn[k] == central_gradient_norm(u, m, k));
  }
  CHECK(std::isnan(lap[m.boundary_nodes().front()]));
}
