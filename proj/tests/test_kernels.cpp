#include <doctest.h>

#include <random>
#include <vector>

#include "daseinkit/kernels.hpp"

using daseinkit::kernels::cplx;
namespace kernels = daseinkit::kernels;

namespace {

std::vector<cplx> random_vec(std::size_t len, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> v(len);
  for (auto& z : v) z = {g(rng), g(rng)};
  return v;
}

double rel_err(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0, den = 1e-300;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

}  // namespace

TEST_CASE("scalar kernels on hand-checked inputs") {
  const auto& s = kernels::scalar_table();
  // sigma_z * sigma_x = i sigma_y
  const std::vector<cplx> z{1, 0, 0, -1};
  const std::vector<cplx> x{0, 1, 1, 0};
  std::vector<cplx> c(4);
  s.matmul(z.data(), x.data(), c.data(), 2);
  CHECK(c == std::vector<cplx>{0, 1, -1, 0});

  std::vector<cplx> y{1, 2};
  const std::vector<cplx> v{cplx{0, 1}, 3};
  s.axpy(cplx{0, 1}, v.data(), y.data(), 2);
  CHECK(y == std::vector<cplx>{0, cplx{2, 3}});

  CHECK(s.max_abs(v.data(), 2) == doctest::Approx(3));
  CHECK(s.max_abs_diff(v.data(), y.data(), 2) == doctest::Approx(std::abs(cplx{1, -3})));
  CHECK(s.dot(v.data(), v.data(), 2) == cplx{10, 0});
}

TEST_CASE("SIMD kernels match the scalar reference") {
  const kernels::KernelTable* simd = kernels::avx2_table();
  if (simd == nullptr) {
    MESSAGE("AVX2 unavailable; only the scalar table is exercised");
    return;
  }
  const auto& ref = kernels::scalar_table();
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 13u, 16u, 31u}) {
    CAPTURE(n);
    const auto a = random_vec(n * n, rng);
    const auto b = random_vec(n * n, rng);
    std::vector<cplx> c1(n * n), c2(n * n);
    ref.matmul(a.data(), b.data(), c1.data(), n);
    simd->matmul(a.data(), b.data(), c2.data(), n);
    CHECK(rel_err(c2, c1) <= 1e-14);

    auto y1 = b, y2 = b;
    ref.axpy(cplx{0.3, -1.7}, a.data(), y1.data(), a.size());
    simd->axpy(cplx{0.3, -1.7}, a.data(), y2.data(), a.size());
    CHECK(rel_err(y2, y1) <= 1e-15);

    CHECK(simd->max_abs(a.data(), a.size()) == doctest::Approx(ref.max_abs(a.data(), a.size())).epsilon(1e-15));
    CHECK(simd->max_abs_diff(a.data(), b.data(), a.size()) ==
          doctest::Approx(ref.max_abs_diff(a.data(), b.data(), a.size())).epsilon(1e-15));
    const cplx d1 = ref.dot(a.data(), b.data(), a.size());
    const cplx d2 = simd->dot(a.data(), b.data(), a.size());
    CHECK(std::abs(d1 - d2) <= 1e-13 * (1 + std::abs(d1)));
  }
}

TEST_CASE("kernel selection") {
  CHECK(kernels::select("scalar"));
  CHECK(kernels::active().name == "scalar");
  CHECK_FALSE(kernels::select("sse9"));
  if (kernels::avx2_table() != nullptr) {
    CHECK(kernels::select("avx2"));
    CHECK(kernels::active().name == "avx2");
  }
}
