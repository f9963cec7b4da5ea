#pragma once

// Dense complex inner loops used by the operator algebra.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2+FMA
// variant. The active table is chosen once at startup from the CPU features
// (overridable with DASEINKIT_SIMD=scalar|avx2) and the two are held
// equivalent by tests/test_kernels.cpp.
//
// Matrices are row-major arrays of std::complex<double>, i.e. interleaved
// (re, im) doubles.

#include <complex>
#include <cstddef>
#include <string_view>

namespace daseinkit::kernels {

using cplx = std::complex<double>;

struct KernelTable {
  std::string_view name;
  // c = a * b for n x n matrices. c must not alias a or b.
  void (*matmul)(const cplx* a, const cplx* b, cplx* c, std::size_t n);
  // y += alpha * x over len entries.
  void (*axpy)(cplx alpha, const cplx* x, cplx* y, std::size_t len);
  // max_i |a_i - b_i| (complex modulus).
  double (*max_abs_diff)(const cplx* a, const cplx* b, std::size_t len);
  // max_i |a_i|.
  double (*max_abs)(const cplx* a, std::size_t len);
  // sum_i conj(a_i) * b_i.
  cplx (*dot)(const cplx* a, const cplx* b, std::size_t len);
};

const KernelTable& scalar_table() noexcept;
// Null when the build or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table() noexcept;

// The table every library routine goes through.
const KernelTable& active() noexcept;

// Force a specific table (tests, benchmarking). Returns false if the
// requested variant is unavailable on this machine.
bool select(std::string_view name) noexcept;

}  // namespace daseinkit::kernels
