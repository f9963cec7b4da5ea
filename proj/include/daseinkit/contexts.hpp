#pragma once

// The finite generated fragment of the context category: abelian unital
// *-subalgebras of operators, each stored by its atoms (an orthogonal
// resolution of the identity), ordered by inclusion.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "daseinkit/linalg.hpp"

namespace daseinkit {

class Context {
 public:
  // Validates orthogonality, completeness and nonzero atoms, then sorts the
  // atoms canonically (descending rank, then rounded entries) and derives the
  // id from that ordering.
  static Context from_atoms(std::vector<ComplexMatrix> atoms, const Tolerances& tol,
                            std::string label = {});

  const std::string& id() const noexcept { return id_; }
  const std::string& label() const noexcept { return label_; }
  const std::string& canonical_key() const noexcept { return key_; }
  std::span<const ComplexMatrix> atoms() const noexcept { return atoms_; }
  const ComplexMatrix& atom(std::size_t i) const { return atoms_.at(i); }
  std::size_t size() const noexcept { return atoms_.size(); }
  std::size_t dim() const noexcept { return atoms_.front().dim(); }
  std::size_t rank(std::size_t i) const { return ranks_.at(i); }
  bool is_trivial() const noexcept { return atoms_.size() == 1; }

  // sum_i values[i] * atom_i
  ComplexMatrix element(std::span<const double> values) const;
  // The Gelfand transform of a member of the algebra: tr(Q_i M) / tr(Q_i).
  std::vector<cplx> coefficients(const ComplexMatrix& m) const;

  void set_label(std::string label) { label_ = std::move(label); }

 private:
  std::vector<ComplexMatrix> atoms_;
  std::vector<std::size_t> ranks_;
  std::string key_;
  std::string id_;
  std::string label_;
};

Context trivial_context(std::size_t dim, const Tolerances& tol);

// The algebra generated by the spectral projections of A.
Context context_from_operator(const HermitianOperator& a, const Tolerances& tol);

struct IntersectOptions {
  int max_retries = 8;
  std::uint64_t seed = 0;
};

// V1 ∩ V2 as algebras. Throws DegenerateIntersection if atom recovery keeps
// failing, DimMismatch on differing ambient dimensions.
Context intersect(const Context& v1, const Context& v2, const Tolerances& tol,
                  const IntersectOptions& opts = {});

// V1 <= V2: every atom of V1 is a sum of atoms of V2.
bool is_leq(const Context& v1, const Context& v2, const Tolerances& tol);

// Every coarsening of the atom partition of v (all set partitions, atoms
// summed within blocks), including v itself and the trivial context.
std::vector<Context> coarsenings(const Context& v, const Tolerances& tol);

struct CategoryOptions {
  bool full_subcontexts = false;
  std::size_t max_contexts = 5000;
  int max_retries = 8;
  std::uint64_t seed = 0;
};

class ContextCategory {
 public:
  ContextCategory() = default;
  // Contexts are deduplicated by canonical key, sorted by id, and the order
  // relation is computed with is_leq.
  ContextCategory(std::vector<Context> contexts, std::vector<std::string> generators,
                  const Tolerances& tol);

  std::span<const Context> contexts() const noexcept { return contexts_; }
  const Context& context(std::size_t i) const { return contexts_.at(i); }
  std::size_t size() const noexcept { return contexts_.size(); }
  std::size_t dim() const { return contexts_.front().dim(); }
  const std::vector<std::string>& generators() const noexcept { return generators_; }

  std::optional<std::size_t> index_of(const std::string& id) const;
  std::size_t trivial_index() const { return trivial_; }

  bool leq(std::size_t lo, std::size_t hi) const { return leq_[lo * contexts_.size() + hi] != 0; }
  // Indices j with j <= i (including i), ascending.
  const std::vector<std::size_t>& below(std::size_t i) const { return below_.at(i); }
  // All pairs (lo, hi) with lo <= hi and lo != hi.
  std::vector<std::pair<std::size_t, std::size_t>> strict_pairs() const;
  std::vector<std::size_t> maximal() const;

 private:
  std::vector<Context> contexts_;
  std::vector<std::string> generators_;
  std::vector<char> leq_;
  std::vector<std::vector<std::size_t>> below_;
  std::size_t trivial_ = 0;
};

// Generated contexts plus the trivial one, closed under pairwise
// intersection (and optionally under coarsening). Throws SizeLimitExceeded
// past opts.max_contexts.
ContextCategory build_category(std::span<const HermitianOperator> ops, const CategoryOptions& opts,
                               const Tolerances& tol);

}  // namespace daseinkit
