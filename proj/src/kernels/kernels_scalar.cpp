#include "daseinkit/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace daseinkit::kernels {
namespace {

void matmul_scalar(const cplx* a, const cplx* b, cplx* c, std::size_t n) {
  std::fill(c, c + n * n, cplx{});
  for (std::size_t i = 0; i < n; ++i) {
    cplx* crow = c + i * n;
    for (std::size_t k = 0; k < n; ++k) {
      const cplx aik = a[i * n + k];
      if (aik == cplx{}) continue;
      const cplx* brow = b + k * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

void axpy_scalar(cplx alpha, const cplx* x, cplx* y, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) y[i] += alpha * x[i];
}

double max_abs_diff_scalar(const cplx* a, const cplx* b, std::size_t len) {
  double m = 0.0;
  for (std::size_t i = 0; i < len; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs_scalar(const cplx* a, std::size_t len) {
  double m = 0.0;
  for (std::size_t i = 0; i < len; ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

cplx dot_scalar(const cplx* a, const cplx* b, std::size_t len) {
  cplx s{};
  for (std::size_t i = 0; i < len; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{"scalar", matmul_scalar, axpy_scalar, max_abs_diff_scalar,
                                 max_abs_scalar, dot_scalar};
  return table;
}

}  // namespace daseinkit::kernels
