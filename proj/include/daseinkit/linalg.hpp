#pragma once

// Finite-dimensional Hermitian operator algebra.
//
// All tolerance checks use the max-absolute-entry norm so that thresholds do
// not scale with the dimension.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "daseinkit/error.hpp"

namespace daseinkit {

using cplx = std::complex<double>;

struct Tolerances {
  double herm = 1e-10;   // Hermiticity check
  double num = 1e-10;    // generic numerical equality
  double group = 1e-8;   // relative eigenvalue clustering gap
  double zero = 1e-9;    // "0 is in the spectrum"

  // Throws InvalidParameter unless all are >= 0 and group >= num.
  void validate() const;
};

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> entries);
  static ComplexMatrix diagonal(std::initializer_list<double> entries);
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows);
  // |v><v|
  static ComplexMatrix outer(std::span<const cplx> v);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return data_.size(); }

  cplx& operator()(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }
  const cplx& operator()(std::size_t row, std::size_t col) const { return data_[row * dim_ + col]; }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  ComplexMatrix adjoint() const;
  cplx trace() const;
  double max_abs() const;
  bool is_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx s);

  // y += s * x
  void add_scaled(cplx s, const ComplexMatrix& x);

  bool operator==(const ComplexMatrix&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);

// ||a - b||_max; throws DimMismatch.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
// (M + M^dagger) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& m);

class HermitianOperator {
 public:
  HermitianOperator() = default;
  // Throws NotHermitian when ||M - M^dagger||_max > tau_herm (or entries are
  // non-finite). The stored matrix is the exact Hermitian part of M.
  HermitianOperator(const ComplexMatrix& m, double tau_herm, std::string label = {});

  // For matrices that are Hermitian by construction up to rounding.
  static HermitianOperator symmetrized(const ComplexMatrix& m, std::string label = {});

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return matrix_.dim(); }
  const std::string& label() const noexcept { return label_; }
  HermitianOperator with_label(std::string label) const;

 private:
  ComplexMatrix matrix_;
  std::string label_;
};

struct SpectralDecomposition {
  std::vector<double> eigenvalues;             // ascending, distinct
  std::vector<HermitianOperator> projections;  // same length

  double min() const { return eigenvalues.front(); }
  double max() const { return eigenvalues.back(); }
};

SpectralDecomposition eigendecompose(const HermitianOperator& a, const Tolerances& tol);

// Sum of the spectral projections with eigenvalue <= lambda + tol.zero.
HermitianOperator spectral_family(const HermitianOperator& a, double lambda, const Tolerances& tol);
HermitianOperator spectral_family(const SpectralDecomposition& dec, double lambda,
                                  const Tolerances& tol);

// Raw eigenvalues (ascending, with multiplicity) of the Hermitian part of m.
std::vector<double> eigenvalues(const ComplexMatrix& m);
double min_eigenvalue(const ComplexMatrix& m);
// Minimum eigenvalue of the Hermitian part is >= -tol.
bool is_psd(const ComplexMatrix& m, double tol);
bool is_projection(const ComplexMatrix& m, double tol);
// Rank of a projection, read off its trace.
std::size_t projection_rank(const ComplexMatrix& p);

struct Oscillator {
  HermitianOperator x;
  HermitianOperator p;
  HermitianOperator h;
  std::size_t levels = 0;
  double mass = 1.0;
  double omega = 1.0;
  double hbar = 1.0;
};

// Truncated ladder-operator model on `levels` states. H is assembled from the
// truncated X and P, so it is not the analytic diag(hbar*omega*(n + 1/2)).
Oscillator make_oscillator(std::size_t levels, double mass = 1.0, double omega = 1.0,
                           double hbar = 1.0);

ComplexMatrix op_add(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix op_mul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix op_scale(cplx s, const ComplexMatrix& a);

}  // namespace daseinkit
