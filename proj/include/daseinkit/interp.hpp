#pragma once

// Stage-wise interpretation of operator expressions and the verification
// routines built on it: commutativity on stages, internal energy spectra,
// the delta_0 reading of the Hamiltonian, and the projection-lattice check.

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "daseinkit/contexts.hpp"
#include "daseinkit/linalg.hpp"

namespace daseinkit {

using Environment = std::map<std::string, HermitianOperator>;

class OperatorExpr {
 public:
  enum class Kind { Symbol, Scale, Add, Mul };

  static OperatorExpr symbol(std::string label);
  static OperatorExpr scale(double factor, OperatorExpr e);
  static OperatorExpr add(OperatorExpr a, OperatorExpr b);
  static OperatorExpr mul(OperatorExpr a, OperatorExpr b);

  Kind kind() const;
  const std::string& label() const;  // Symbol
  double factor() const;             // Scale
  const OperatorExpr& lhs() const;   // Scale (operand), Add, Mul
  const OperatorExpr& rhs() const;   // Add, Mul

  std::set<std::string> symbols() const;
  std::string to_string() const;
  // Ordinary (external) matrix algebra. Throws UnboundSymbol.
  ComplexMatrix evaluate(const Environment& env) const;

 private:
  struct Node;
  explicit OperatorExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// P*P/(2m) + (m omega^2 / 2) X*X
OperatorExpr hamiltonian_expr(double mass, double omega, const std::string& p = "P", const std::string& x = "X");

struct Stage {
  ComplexMatrix op;                 // lies in the stage's algebra
  std::vector<double> atom_values;  // Gelfand transform (real parts)
  double membership_residual = 0;   // ||op - sum_i value_i Q_i||_max
};

// One operator per context, indexed like the category. Not a presheaf in
// general; `is_presheaf_compatible` records whether outer daseinisation of
// each stage into every smaller stage happens to reproduce that stage.
struct StageFamily {
  std::vector<Stage> stages;
  bool is_presheaf_compatible = false;
};

// Symbols become stage-wise outer daseinisations; Scale/Add/Mul act inside
// each abelian stage. Throws UnboundSymbol, DimMismatch.
StageFamily delta_interpret(const OperatorExpr& e, const Environment& env, const ContextCategory& cat,
                            const Tolerances& tol);

// Builds a stage from an operator that should lie in the context.
Stage make_stage(const ComplexMatrix& op, const Context& v);

// Per stage, the sorted distinct atom values.
struct InternalSpectrum {
  std::vector<std::vector<double>> per_stage;
  bool is_presheaf = false;  // diagnostic only: never assumed
};

InternalSpectrum internal_spectrum(const StageFamily& f, const Tolerances& tol);

enum class Delta0Rule { spectra_only, joint_atom };

struct Delta0Stage {
  bool zero_in_spec_p = false;
  bool zero_in_spec_x = false;
  bool joint_zero_atom = false;
  bool zeroed = false;
  double min_spectrum = 0;  // of the (possibly zeroed) stage operator
};

struct Delta0Result {
  StageFamily family;
  std::vector<Delta0Stage> stages;
};

// The delta-interpreted Hamiltonian with stages replaced by zero according
// to `rule`. Throws MissingSymbol unless the expression uses exactly the
// designated P and X symbols and both are bound.
Delta0Result delta0_interpret(const OperatorExpr& h, const Environment& env, const ContextCategory& cat,
                              Delta0Rule rule, const Tolerances& tol, const std::string& p = "P",
                              const std::string& x = "X");

struct Lemma2Stage {
  std::size_t context = 0;
  double commutator = 0;  // ||[delta_V(A), delta_V(B)]||_max
  double product_gap = 0; // ||(AB)_delta - (BA)_delta||_max at V
};

struct Lemma2Report {
  std::string a, b;
  std::vector<Lemma2Stage> stages;
  double max_stage_commutator = 0;
  double external_commutator = 0;  // ||[A, B]||_max
  double threshold = 0;
  bool pass = false;
};

// Stage commutators must be <= 10 tol.num.
Lemma2Report verify_lemma2(const HermitianOperator& a, const HermitianOperator& b, const ContextCategory& cat,
                           const Tolerances& tol);

struct Lemma3Stage {
  std::size_t context = 0;
  Delta0Stage classification;
  double undecorated_min = 0;  // min spectrum of the delta (not delta_0) Hamiltonian
  bool sufficiency_gap = false;  // 0 in both daseinised spectra but not in H_V's
  bool ok = false;               // min internal spectrum <= tol.zero
};

struct Lemma3Report {
  Delta0Rule rule = Delta0Rule::joint_atom;
  std::vector<Lemma3Stage> stages;
  std::vector<std::size_t> violating;    // stages with min > tol.zero
  std::vector<std::size_t> gap_stages;   // stages where the sufficiency step fails
  bool classification_consistent = false;
  bool lemma1_3_pass = false;  // no gap stages
  bool pass = false;           // no violating stages
};

Lemma3Report verify_lemma3(const Environment& env, const ContextCategory& cat, double mass, double omega,
                           Delta0Rule rule, const Tolerances& tol, const std::string& p = "P",
                           const std::string& x = "X");

// Convenience: builds the oscillator itself; `cat` must come from the same model.
Lemma3Report verify_lemma3(const ContextCategory& cat, std::size_t levels, double mass, double omega, double hbar,
                           Delta0Rule rule, const Tolerances& tol);

struct MultiplicativityWitness {
  std::string symbol;
  std::string context_id;
  std::string context_label;
  bool auxiliary = false;  // stage built by merging two atoms of a maximal context
  double gap = 0;          // ||delta_V(A*A) - delta_V(A)^2||_max
};

// Searches every (symbol, stage) pair, then single-merge coarsenings of the
// maximal stages, for a gap above `threshold`.
std::optional<MultiplicativityWitness> find_nonmultiplicativity_witness(const Environment& env,
                                                                        const ContextCategory& cat,
                                                                        const Tolerances& tol, double threshold);

struct Lemma1Report {
  std::size_t lattice_size = 0;
  bool distributive = true;
  std::optional<std::array<std::size_t, 3>> distributivity_counterexample;
  bool noncommuting_pair = false;
  std::optional<std::pair<std::size_t, std::size_t>> commutator_witness;
  bool pass = false;  // non-distributive <=> some pair fails to commute
};

// Closes the projections under meet, join and orthocomplement (capped at
// max_lattice, else SizeLimitExceeded), then checks distributivity on every
// triple and commutativity on every pair. Requires dim <= 4 and at most five
// generators (InvalidParameter).
Lemma1Report verify_lemma1(std::span<const ComplexMatrix> projections, std::size_t dim, const Tolerances& tol,
                           std::size_t max_lattice = 4096);

// A random generator set for the Lemma 1 check whose generated lattice is
// finite: either a commuting family, or at most two arbitrary projections.
std::vector<ComplexMatrix> random_lemma1_generators(std::size_t dim, std::mt19937_64& rng);

}  // namespace daseinkit
