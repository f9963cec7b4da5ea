#include "daseinkit/daseinise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace daseinkit {
namespace {

void require_projection(const ComplexMatrix& p, const Context& v, const Tolerances& tol) {
  if (p.dim() != v.dim()) throw Error(ErrorKind::DimMismatch, "daseinisation: dimension");
  if (!is_projection(p, tol.num)) throw Error(ErrorKind::NotProjection, "daseinisation input is not a projection");
}

HermitianOperator sum_atoms(const Context& v, const std::vector<std::size_t>& idx) {
  ComplexMatrix sum(v.dim());
  for (std::size_t i : idx) sum += v.atom(i);
  return HermitianOperator::symmetrized(sum);
}

bool below(const ComplexMatrix& q, const ComplexMatrix& e, double tol) {
  return max_abs_diff(e * q, q) <= tol;
}

}  // namespace

std::vector<std::size_t> outer_atoms(const ComplexMatrix& p, const Context& v, const Tolerances& tol) {
  require_projection(p, v, tol);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < v.size(); ++i)
    if ((v.atom(i) * p).max_abs() > tol.num) idx.push_back(i);
  return idx;
}

std::vector<std::size_t> inner_atoms(const ComplexMatrix& p, const Context& v, const Tolerances& tol) {
  require_projection(p, v, tol);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (below(v.atom(i), p, tol.num)) idx.push_back(i);
  return idx;
}

HermitianOperator outer_projection(const ComplexMatrix& p, const Context& v, const Tolerances& tol) {
  return sum_atoms(v, outer_atoms(p, v, tol));
}

HermitianOperator inner_projection(const ComplexMatrix& p, const Context& v, const Tolerances& tol) {
  return sum_atoms(v, inner_atoms(p, v, tol));
}

DaseinResult outer_selfadjoint(const SpectralDecomposition& dec, const Context& v, const Tolerances& tol) {
  if (dec.projections.front().dim() != v.dim())
    throw Error(ErrorKind::DimMismatch, "outer_selfadjoint: dimension");
  const std::size_t levels = dec.eigenvalues.size();
  std::vector<double> values(v.size(), std::numeric_limits<double>::quiet_NaN());
  std::size_t open = v.size();

  ComplexMatrix family(v.dim());
  for (std::size_t level = 0; level < levels && open > 0; ++level) {
    family += dec.projections[level].matrix();
    const bool top = level + 1 == levels;  // E_A(lambda_max) = I contains every atom
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!std::isnan(values[i])) continue;
      if (top || below(v.atom(i), family, tol.num)) {
        values[i] = dec.eigenvalues[level];
        --open;
      }
    }
  }
  DaseinResult r;
  r.context_id = v.id();
  r.op = HermitianOperator::symmetrized(v.element(values));
  r.atom_values = std::move(values);
  return r;
}

DaseinResult outer_selfadjoint(const HermitianOperator& a, const Context& v, const Tolerances& tol) {
  DaseinResult r = outer_selfadjoint(eigendecompose(a, tol), v, tol);
  r.op = r.op.with_label(a.label());
  return r;
}

DaseinResult inner_selfadjoint(const HermitianOperator& a, const Context& v, const Tolerances& tol) {
  const HermitianOperator neg = HermitianOperator::symmetrized(-1.0 * a.matrix(), a.label());
  DaseinResult r = outer_selfadjoint(neg, v, tol);
  for (double& x : r.atom_values) x = -x;
  r.op = HermitianOperator::symmetrized(v.element(r.atom_values), a.label());
  return r;
}

}  // namespace daseinkit
