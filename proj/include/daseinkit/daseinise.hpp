#pragma once

// Inner and outer daseinisation at a single stage.

#include <string>
#include <vector>

#include "daseinkit/contexts.hpp"
#include "daseinkit/linalg.hpp"

namespace daseinkit {

struct DaseinResult {
  std::string context_id;
  HermitianOperator op;             // member of the context
  std::vector<double> atom_values;  // op = sum_i atom_values[i] * atom_i
};

// Smallest projection of V dominating P: the sum of the atoms Q with
// ||QP||_max > tol.num. Throws NotProjection.
HermitianOperator outer_projection(const ComplexMatrix& p, const Context& v, const Tolerances& tol);

// Largest projection of V below P: the sum of the atoms Q with
// ||PQ - Q||_max <= tol.num. Throws NotProjection.
HermitianOperator inner_projection(const ComplexMatrix& p, const Context& v, const Tolerances& tol);

// Atom indices selected by the two rules above.
std::vector<std::size_t> outer_atoms(const ComplexMatrix& p, const Context& v, const Tolerances& tol);
std::vector<std::size_t> inner_atoms(const ComplexMatrix& p, const Context& v, const Tolerances& tol);

// Each atom Q gets the smallest eigenvalue lambda of A with Q below the inner
// daseinisation of the spectral projection E_A(lambda).
DaseinResult outer_selfadjoint(const HermitianOperator& a, const Context& v, const Tolerances& tol);
DaseinResult outer_selfadjoint(const SpectralDecomposition& dec, const Context& v, const Tolerances& tol);

// -outer_selfadjoint(-A, V)
DaseinResult inner_selfadjoint(const HermitianOperator& a, const Context& v, const Tolerances& tol);

}  // namespace daseinkit
