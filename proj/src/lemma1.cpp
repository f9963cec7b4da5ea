// Projection-lattice closure and the distributivity/commutativity check.

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "daseinkit/interp.hpp"

namespace daseinkit {
namespace {

constexpr double kEigenCut = 1e-6;  // P+Q eigenvalue cut for meet/join
constexpr double kSameProjection = 1e-7;

class Lattice {
 public:
  Lattice(std::size_t dim, const Tolerances& tol, std::size_t cap) : dim_(dim), tol_(tol), cap_(cap) {}

  std::size_t insert(const ComplexMatrix& p) {
    const std::size_t r = projection_rank(p);
    for (std::size_t i = 0; i < elems_.size(); ++i)
      if (ranks_[i] == r && max_abs_diff(elems_[i], p) <= kSameProjection) return i;
    if (elems_.size() >= cap_)
      throw Error(ErrorKind::SizeLimitExceeded, "projection lattice exceeds " + std::to_string(cap_) + " elements");
    elems_.push_back(p);
    ranks_.push_back(r);
    return elems_.size() - 1;
  }

  void close() {
    for (std::size_t i = 0; i < elems_.size(); ++i) {
      comp_.push_back(insert(ComplexMatrix::identity(dim_) - elems_[i]));
      for (std::size_t j = 0; j <= i; ++j) {
        const auto [meet, join] = meet_join(elems_[i], elems_[j]);
        const std::size_t m = insert(meet);
        const std::size_t J = insert(join);
        meet_[key(i, j)] = m;
        join_[key(i, j)] = J;
      }
    }
  }

  std::size_t size() const { return elems_.size(); }
  const ComplexMatrix& at(std::size_t i) const { return elems_[i]; }
  std::size_t meet(std::size_t a, std::size_t b) const { return meet_.at(key(a, b)); }
  std::size_t join(std::size_t a, std::size_t b) const { return join_.at(key(a, b)); }

 private:
  static std::uint64_t key(std::size_t a, std::size_t b) {
    if (a < b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  // Range intersection: eigenvalue-2 eigenspace of P+Q; range span: its support.
  std::pair<ComplexMatrix, ComplexMatrix> meet_join(const ComplexMatrix& p, const ComplexMatrix& q) const {
    const auto dec = eigendecompose(HermitianOperator::symmetrized(p + q), tol_);
    ComplexMatrix meet(dim_), join(dim_);
    for (std::size_t k = 0; k < dec.eigenvalues.size(); ++k) {
      if (dec.eigenvalues[k] >= 2.0 - kEigenCut) meet += dec.projections[k].matrix();
      if (dec.eigenvalues[k] > kEigenCut) join += dec.projections[k].matrix();
    }
    return {meet, join};
  }

  std::size_t dim_;
  Tolerances tol_;
  std::size_t cap_;
  std::vector<ComplexMatrix> elems_;
  std::vector<std::size_t> ranks_;
  std::vector<std::size_t> comp_;
  std::unordered_map<std::uint64_t, std::size_t> meet_, join_;
};

std::vector<std::vector<cplx>> random_basis(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<std::vector<cplx>> cols;
  while (cols.size() < n) {
    std::vector<cplx> v(n);
    for (auto& z : v) z = cplx{g(rng), g(rng)};
    for (const auto& u : cols) {
      cplx d{};
      for (std::size_t i = 0; i < n; ++i) d += std::conj(u[i]) * v[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= d * u[i];
    }
    double norm = 0;
    for (const auto& z : v) norm += std::norm(z);
    norm = std::sqrt(norm);
    if (norm < 1e-6) continue;
    for (auto& z : v) z /= norm;
    cols.push_back(std::move(v));
  }
  return cols;
}

ComplexMatrix span_of(const std::vector<std::vector<cplx>>& basis, std::uint32_t mask) {
  ComplexMatrix p(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (mask & (1u << i)) p += ComplexMatrix::outer(basis[i]);
  return hermitian_part(p);
}

}  // namespace

Lemma1Report verify_lemma1(std::span<const ComplexMatrix> projections, std::size_t dim, const Tolerances& tol,
                           std::size_t max_lattice) {
  if (dim == 0 || dim > 4) throw Error(ErrorKind::InvalidParameter, "lemma 1 check requires 1 <= dim <= 4");
  if (projections.size() > 5) throw Error(ErrorKind::InvalidParameter, "lemma 1 check takes at most 5 generators");
  Lattice lat(dim, tol, max_lattice);
  lat.insert(ComplexMatrix(dim));
  lat.insert(ComplexMatrix::identity(dim));
  for (const auto& p : projections) {
    if (p.dim() != dim) throw Error(ErrorKind::DimMismatch, "lemma 1 generator dimension");
    if (!is_projection(p, tol.num)) throw Error(ErrorKind::NotProjection, "lemma 1 generator is not a projection");
    lat.insert(hermitian_part(p));
  }
  lat.close();

  Lemma1Report r;
  const std::size_t n = lat.size();
  r.lattice_size = n;
  for (std::size_t a = 0; a < n && r.distributive; ++a)
    for (std::size_t b = 0; b < n && r.distributive; ++b)
      for (std::size_t c = b; c < n; ++c) {
        if (lat.meet(a, lat.join(b, c)) != lat.join(lat.meet(a, b), lat.meet(a, c))) {
          r.distributive = false;
          r.distributivity_counterexample = std::array<std::size_t, 3>{a, b, c};
          break;
        }
      }
  for (std::size_t a = 0; a < n && !r.noncommuting_pair; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (commutator(lat.at(a), lat.at(b)).max_abs() > tol.group) {
        r.noncommuting_pair = true;
        r.commutator_witness = std::pair{a, b};
        break;
      }
  r.pass = r.distributive != r.noncommuting_pair;
  return r;
}

std::vector<ComplexMatrix> random_lemma1_generators(std::size_t dim, std::mt19937_64& rng) {
  if (dim < 2 || dim > 4) throw Error(ErrorKind::InvalidParameter, "lemma 1 generators need 2 <= dim <= 4");
  const auto basis = random_basis(dim, rng);
  const std::uint32_t full = (1u << dim) - 1;
  std::uniform_int_distribution<std::uint32_t> any_mask(0, full);
  std::uniform_int_distribution<std::uint32_t> proper_mask(1, full - 1);
  std::vector<ComplexMatrix> out;

  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: {  // commuting family in a shared basis
      const int k = std::uniform_int_distribution<int>(1, 5)(rng);
      for (int i = 0; i < k; ++i) out.push_back(span_of(basis, any_mask(rng)));
      break;
    }
    case 1: {  // two projections in unrelated random bases
      out.push_back(span_of(basis, proper_mask(rng)));
      out.push_back(span_of(random_basis(dim, rng), proper_mask(rng)));
      break;
    }
    default: {  // a basis projection and a rotated one; commute iff the rotation stays inside
      const std::uint32_t mask = proper_mask(rng);
      std::uniform_int_distribution<std::size_t> pick(0, dim - 1);
      const std::size_t i = pick(rng);
      std::size_t j = pick(rng);
      if (j == i) j = (i + 1) % dim;
      const double theta = std::uniform_real_distribution<double>(0.1, 1.4)(rng);
      std::vector<cplx> v(dim);
      for (std::size_t k = 0; k < dim; ++k) v[k] = std::cos(theta) * basis[i][k] + std::sin(theta) * basis[j][k];
      out.push_back(span_of(basis, mask));
      out.push_back(hermitian_part(ComplexMatrix::outer(v)));
      break;
    }
  }
  return out;
}

}  // namespace daseinkit
