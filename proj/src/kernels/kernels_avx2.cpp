// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "daseinkit/kernels.hpp"

#include <algorithm>
#include <cmath>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace daseinkit::kernels {
namespace {

// Two complex numbers per __m256d: [re0, im0, re1, im1].
inline __m256d cmul_bcast(__m256d ar, __m256d ai, __m256d vb) {
  const __m256d swapped = _mm256_permute_pd(vb, 0x5);
  return _mm256_fmaddsub_pd(ar, vb, _mm256_mul_pd(ai, swapped));
}

void axpy_avx2(cplx alpha, const cplx* x, cplx* y, std::size_t len) {
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  auto* xd = reinterpret_cast<const double*>(x);
  auto* yd = reinterpret_cast<double*>(y);
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    const __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(vy, cmul_bcast(ar, ai, vx)));
  }
  for (; i < len; ++i) y[i] += alpha * x[i];
}

void matmul_avx2(const cplx* a, const cplx* b, cplx* c, std::size_t n) {
  std::fill(c, c + n * n, cplx{});
  for (std::size_t i = 0; i < n; ++i) {
    cplx* crow = c + i * n;
    for (std::size_t k = 0; k < n; ++k) {
      const cplx aik = a[i * n + k];
      if (aik == cplx{}) continue;
      axpy_avx2(aik, b + k * n, crow, n);
    }
  }
}

inline double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
}

double max_abs_avx2(const cplx* a, std::size_t len) {
  auto* ad = reinterpret_cast<const double*>(a);
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    const __m256d v = _mm256_loadu_pd(ad + 2 * i);
    const __m256d sq = _mm256_mul_pd(v, v);
    best = _mm256_max_pd(best, _mm256_hadd_pd(sq, sq));
  }
  double m = std::sqrt(hmax(best));
  for (; i < len; ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

double max_abs_diff_avx2(const cplx* a, const cplx* b, std::size_t len) {
  auto* ad = reinterpret_cast<const double*>(a);
  auto* bd = reinterpret_cast<const double*>(b);
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(ad + 2 * i), _mm256_loadu_pd(bd + 2 * i));
    const __m256d sq = _mm256_mul_pd(d, d);
    best = _mm256_max_pd(best, _mm256_hadd_pd(sq, sq));
  }
  double m = std::sqrt(hmax(best));
  for (; i < len; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

cplx dot_avx2(const cplx* a, const cplx* b, std::size_t len) {
  auto* ad = reinterpret_cast<const double*>(a);
  auto* bd = reinterpret_cast<const double*>(b);
  // re accumulates [ar*br, ai*bi]; im accumulates [ar*bi, ai*br].
  __m256d re = _mm256_setzero_pd();
  __m256d im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    const __m256d va = _mm256_loadu_pd(ad + 2 * i);
    const __m256d vb = _mm256_loadu_pd(bd + 2 * i);
    re = _mm256_fmadd_pd(va, vb, re);
    im = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0x5), im);
  }
  alignas(32) double r[4];
  alignas(32) double m[4];
  _mm256_store_pd(r, re);
  _mm256_store_pd(m, im);
  cplx s{r[0] + r[1] + r[2] + r[3], (m[0] - m[1]) + (m[2] - m[3])};
  for (; i < len; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

const KernelTable* avx2_table() noexcept {
  static const KernelTable table{"avx2", matmul_avx2, axpy_avx2, max_abs_diff_avx2,
                                 max_abs_avx2, dot_avx2};
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return nullptr;
  return &table;
}

}  // namespace daseinkit::kernels

#else

namespace daseinkit::kernels {
const KernelTable* avx2_table() noexcept { return nullptr; }
}  // namespace daseinkit::kernels

#endif
