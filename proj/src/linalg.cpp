#include "daseinkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "daseinkit/kernels.hpp"
#include "eigen_bridge.hpp"

namespace daseinkit {
namespace {

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::DimMismatch, std::string(what) + ": " + std::to_string(a.dim()) +
                                            " vs " + std::to_string(b.dim()));
  }
}

}  // namespace

void Tolerances::validate() const {
  if (!(herm >= 0 && num >= 0 && group >= 0 && zero >= 0))
    throw Error(ErrorKind::InvalidParameter, "tolerances must be nonnegative");
  if (group < num) throw Error(ErrorKind::InvalidParameter, "tau_group must be >= tau_num");
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> entries) {
  ComplexMatrix m(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<double> entries) {
  return diagonal(std::span<const double>(entries.begin(), entries.size()));
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
  ComplexMatrix m(rows.size());
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != rows.size())
      throw Error(ErrorKind::DimMismatch, "from_rows: matrix must be square");
    std::size_t j = 0;
    for (const cplx& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const cplx> v) {
  ComplexMatrix m(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

cplx ComplexMatrix::trace() const {
  cplx t{};
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const { return kernels::active().max_abs(data_.data(), data_.size()); }

bool ComplexMatrix::is_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_dim(*this, other, "add");
  kernels::active().axpy(1.0, other.data_.data(), data_.data(), data_.size());
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_dim(*this, other, "subtract");
  kernels::active().axpy(-1.0, other.data_.data(), data_.data(), data_.size());
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (cplx& z : data_) z *= s;
  return *this;
}

void ComplexMatrix::add_scaled(cplx s, const ComplexMatrix& x) {
  require_same_dim(*this, x, "add_scaled");
  kernels::active().axpy(s, x.data_.data(), data_.data(), data_.size());
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "multiply");
  ComplexMatrix c(a.dim());
  kernels::active().matmul(a.data().data(), b.data().data(), c.data().data(), a.dim());
  return c;
}

ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "max_abs_diff");
  return kernels::active().max_abs_diff(a.data().data(), b.data().data(), a.size());
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  ComplexMatrix h(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return h;
}

HermitianOperator::HermitianOperator(const ComplexMatrix& m, double tau_herm, std::string label)
    : label_(std::move(label)) {
  if (m.dim() == 0) throw Error(ErrorKind::InvalidParameter, "empty operator '" + label_ + "'");
  if (!m.is_finite()) throw Error(ErrorKind::NotHermitian, "non-finite entries in '" + label_ + "'");
  const double asym = max_abs_diff(m, m.adjoint());
  if (asym > tau_herm) {
    throw Error(ErrorKind::NotHermitian,
                "'" + label_ + "' deviates from its adjoint by " + std::to_string(asym));
  }
  matrix_ = hermitian_part(m);
}

HermitianOperator HermitianOperator::symmetrized(const ComplexMatrix& m, std::string label) {
  HermitianOperator op;
  op.matrix_ = hermitian_part(m);
  op.label_ = std::move(label);
  return op;
}

HermitianOperator HermitianOperator::with_label(std::string label) const {
  HermitianOperator op = *this;
  op.label_ = std::move(label);
  return op;
}

SpectralDecomposition eigendecompose(const HermitianOperator& a, const Tolerances& tol) {
  const ComplexMatrix& m = a.matrix();
  if (max_abs_diff(m, m.adjoint()) > tol.herm)
    throw Error(ErrorKind::NotHermitian, "eigendecompose: '" + a.label() + "'");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(Eigen::MatrixXcd(detail::view(m)));
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::NumericalFailure, "eigensolver did not converge for '" + a.label() + "'");

  const Eigen::VectorXd& w = solver.eigenvalues();  // ascending
  const Eigen::MatrixXcd& v = solver.eigenvectors();
  const auto n = w.size();
  const double gap = tol.group * (w(n - 1) - w(0) + 1.0);

  SpectralDecomposition dec;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i < n && w(i) - w(i - 1) <= gap) continue;
    const Eigen::Index count = i - start;
    const Eigen::MatrixXcd block = v.middleCols(start, count);
    dec.eigenvalues.push_back(w.segment(start, count).mean());
    dec.projections.push_back(
        HermitianOperator::symmetrized(detail::from_eigen(block * block.adjoint())));
    start = i;
  }
  return dec;
}

HermitianOperator spectral_family(const SpectralDecomposition& dec, double lambda,
                                  const Tolerances& tol) {
  const std::size_t dim = dec.projections.front().dim();
  ComplexMatrix sum(dim);
  for (std::size_t i = 0; i < dec.eigenvalues.size(); ++i) {
    if (dec.eigenvalues[i] <= lambda + tol.zero) sum += dec.projections[i].matrix();
  }
  return HermitianOperator::symmetrized(sum);
}

HermitianOperator spectral_family(const HermitianOperator& a, double lambda, const Tolerances& tol) {
  return spectral_family(eigendecompose(a, tol), lambda, tol);
}

std::vector<double> eigenvalues(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      Eigen::MatrixXcd(detail::view(hermitian_part(m))), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::NumericalFailure, "eigenvalue computation did not converge");
  const Eigen::VectorXd& w = solver.eigenvalues();
  return {w.data(), w.data() + w.size()};
}

double min_eigenvalue(const ComplexMatrix& m) { return eigenvalues(m).front(); }

bool is_psd(const ComplexMatrix& m, double tol) { return min_eigenvalue(m) >= -tol; }

bool is_projection(const ComplexMatrix& m, double tol) {
  return max_abs_diff(m, m.adjoint()) <= tol && max_abs_diff(m * m, m) <= tol;
}

std::size_t projection_rank(const ComplexMatrix& p) {
  return static_cast<std::size_t>(std::llround(p.trace().real()));
}

Oscillator make_oscillator(std::size_t levels, double mass, double omega, double hbar) {
  if (levels < 2) throw Error(ErrorKind::InvalidParameter, "oscillator needs at least 2 levels");
  if (!(mass > 0) || !(omega > 0) || !(hbar > 0))
    throw Error(ErrorKind::InvalidParameter, "m, omega and hbar must be positive");

  ComplexMatrix lower(levels);
  for (std::size_t n = 1; n < levels; ++n) lower(n - 1, n) = std::sqrt(static_cast<double>(n));
  const ComplexMatrix raise = lower.adjoint();

  const double x_scale = std::sqrt(hbar / (2.0 * mass * omega));
  const double p_scale = std::sqrt(hbar * mass * omega / 2.0);
  const ComplexMatrix x = x_scale * (lower + raise);
  const ComplexMatrix p = cplx{0.0, p_scale} * (raise - lower);

  ComplexMatrix h = (1.0 / (2.0 * mass)) * (p * p);
  h.add_scaled(0.5 * mass * omega * omega, x * x);

  Oscillator osc;
  osc.x = HermitianOperator(x, 0.0, "X");
  osc.p = HermitianOperator(p, 0.0, "P");
  osc.h = HermitianOperator::symmetrized(h, "H");
  osc.levels = levels;
  osc.mass = mass;
  osc.omega = omega;
  osc.hbar = hbar;
  return osc;
}

ComplexMatrix op_add(const ComplexMatrix& a, const ComplexMatrix& b) { return a + b; }
ComplexMatrix op_mul(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b; }
ComplexMatrix op_scale(cplx s, const ComplexMatrix& a) { return s * a; }

}  // namespace daseinkit
