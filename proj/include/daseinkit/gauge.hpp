#pragma once

// Stage automorphisms: the stage-membership supposition for operator
// products, atom-permutation automorphisms between two stage families, and
// the reflection gauge on stage reals.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "daseinkit/contexts.hpp"
#include "daseinkit/interp.hpp"
#include "daseinkit/linalg.hpp"

namespace daseinkit {

// E_V(M) = sum_Q tr(QMQ)/tr(Q) Q: the trace-preserving conditional
// expectation onto V (the Hilbert-Schmidt projection onto span V).
ComplexMatrix conditional_expectation(const ComplexMatrix& m, const Context& v);

enum class S1Rule { conditional_expectation, user_supplied };

struct S1Stage {
  std::size_t context = 0;
  std::vector<cplx> coefficients;  // per atom
  double max_imag = 0;
  double residual = 0;  // ||candidate - E_V(candidate)||_max
  ComplexMatrix candidate;
  bool holds = false;
};

struct S1Report {
  S1Rule rule = S1Rule::conditional_expectation;
  std::vector<S1Stage> stages;
  bool all_hold = false;
};

// Candidate E_V(M) at each stage; holds iff its coefficients are real
// within tol.num. Throws DimMismatch.
S1Report check_S1(const ComplexMatrix& m, const ContextCategory& cat, const Tolerances& tol);
// User-supplied candidates, one per context: holds iff the residual of the
// projection onto span V is <= tol.num. Throws DimMismatch.
S1Report check_S1(std::span<const ComplexMatrix> supplied, const ContextCategory& cat, const Tolerances& tol);

struct StageAutomorphism {
  std::string context_id;
  std::vector<std::size_t> permutation;  // atom i -> atom permutation[i]
};

// sum_i values[i] Q_{pi(i)}
ComplexMatrix apply_automorphism(const StageAutomorphism& f, const Context& v, std::span<const double> values);

struct S2Report {
  std::vector<std::optional<StageAutomorphism>> per_stage;
  std::vector<double> replay_error;  // NaN where no witness
  bool realizable = false;           // every stage has a witness
};

// Per stage, the lexicographically least permutation carrying f1_V to f2_V
// (matching atom values grouped within tol.group), confirmed by replay
// within 10 tol.num.
S2Report find_S2_automorphism(const StageFamily& f1, const StageFamily& f2, const ContextCategory& cat,
                              const Tolerances& tol);

struct GaugeMap {
  std::string context_id;
  std::vector<double> d;  // stage reals, one per atom

  // x -> 2d - x, atom-wise
  std::vector<double> apply(std::span<const double> x) const;
};

struct TakeutiAtom {
  double l1 = 0;  // Gelfand(delta_V(A^2))
  double l2 = 0;  // Gelfand(delta_V(A)^2)
  double l = 0;   // |l1 - l2|
  double d = 0;   // l/2 + l1
  bool relation1 = false;  // 0 <= l1 <= l2
  bool swaps = false;      // reflection sends l1 -> l2 and l2 -> l1
  double literal_composite = 0;  // -(l1 - d) = l/2
};

struct TakeutiStage {
  std::size_t context = 0;
  std::vector<TakeutiAtom> atoms;
  GaugeMap gauge;
  bool relation1 = false;
  bool swaps_where_relation1 = false;
  bool involutive = false;
};

struct TakeutiReport {
  std::string symbol;
  std::vector<TakeutiStage> stages;
  std::size_t relation1_failures = 0;  // atoms
  std::size_t literal_mismatches = 0;  // atoms where l/2 != l2
  bool swaps_where_relation1 = false;
  bool involutive = false;
};

TakeutiReport takeuti_gauge(const HermitianOperator& a, const ContextCategory& cat, const Tolerances& tol);

using StageMap = std::variant<GaugeMap, StageAutomorphism>;

struct CategoryAutomorphismReport {
  std::size_t stages = 0;
  std::size_t gauge_maps = 0;
  std::size_t permutations = 0;
  bool involutive = false;  // every stage map squares to the identity
};

// One map per context, in category order. Throws InvalidStageMap when a map
// names the wrong context, has the wrong arity, or is not bijective.
CategoryAutomorphismReport assemble_category_automorphism(std::span<const StageMap> maps, const ContextCategory& cat,
                                                          const Tolerances& tol);

}  // namespace daseinkit
