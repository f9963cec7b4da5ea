#pragma once

// The spectral presheaf over a context category, its clopen subobjects (a
// Heyting algebra) and sieve-valued truth values.

#include <cstddef>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "daseinkit/contexts.hpp"

namespace daseinkit {

class SpectralPresheaf {
 public:
  const ContextCategory& category() const noexcept { return *category_; }
  const std::shared_ptr<const ContextCategory>& category_ptr() const noexcept { return category_; }

  // Characters of V: one per atom.
  std::size_t sections(std::size_t ctx) const { return category_->context(ctx).size(); }
  // Image of atom `atom` of `hi` in `lo` (requires lo <= hi).
  std::size_t restrict(std::size_t hi, std::size_t lo, std::size_t atom) const;
  std::size_t triangles_checked() const noexcept { return triangles_; }

 private:
  friend std::shared_ptr<const SpectralPresheaf> build_spectral_presheaf(
      std::shared_ptr<const ContextCategory>, const Tolerances&);

  std::shared_ptr<const ContextCategory> category_;
  // maps_[hi][k] is the atom map hi -> category.below(hi)[k].
  std::vector<std::vector<std::vector<std::size_t>>> maps_;
  std::size_t triangles_ = 0;
};

// Builds the restriction maps and checks functoriality on every triangle.
// Throws RestrictionAmbiguous when an atom has zero or several images.
std::shared_ptr<const SpectralPresheaf> build_spectral_presheaf(
    std::shared_ptr<const ContextCategory> category, const Tolerances& tol);

class ClopenSubobject {
 public:
  ClopenSubobject(std::shared_ptr<const SpectralPresheaf> sigma, bool full);

  const SpectralPresheaf& presheaf() const noexcept { return *sigma_; }
  const std::shared_ptr<const SpectralPresheaf>& presheaf_ptr() const noexcept { return sigma_; }

  bool contains(std::size_t ctx, std::size_t atom) const { return sets_[ctx][atom] != 0; }
  void set(std::size_t ctx, std::size_t atom, bool in) { sets_[ctx][atom] = in ? 1 : 0; }
  std::vector<std::size_t> members(std::size_t ctx) const;

  // q in S(V) and V' <= V imply q|V' in S(V').
  bool is_stable() const;
  // Adds restrictions of members until stable.
  void close_downward();

  bool operator==(const ClopenSubobject& other) const;
  // Componentwise inclusion.
  bool operator<=(const ClopenSubobject& other) const;

 private:
  std::shared_ptr<const SpectralPresheaf> sigma_;
  std::vector<std::vector<char>> sets_;
};

ClopenSubobject total_subobject(std::shared_ptr<const SpectralPresheaf> sigma);
ClopenSubobject empty_subobject(std::shared_ptr<const SpectralPresheaf> sigma);

// S(V) = atoms below the outer daseinisation of P at V. Throws NotProjection.
ClopenSubobject proposition_subobject(const ComplexMatrix& p, std::shared_ptr<const SpectralPresheaf> sigma,
                                      const Tolerances& tol);

// Throw PresheafMismatch if the operands live over different presheaves.
ClopenSubobject heyting_meet(const ClopenSubobject& s, const ClopenSubobject& t);
ClopenSubobject heyting_join(const ClopenSubobject& s, const ClopenSubobject& t);
ClopenSubobject heyting_implies(const ClopenSubobject& s, const ClopenSubobject& t);
ClopenSubobject heyting_not(const ClopenSubobject& s);

// Random stable subobject: random atom sets, then closed downward. `density`
// is the per-atom inclusion probability before closing.
ClopenSubobject random_clopen(std::shared_ptr<const SpectralPresheaf> sigma, std::mt19937_64& rng,
                              double density = 0.25);

struct Sieve {
  std::size_t root = 0;
  std::vector<std::size_t> members;  // ascending context indices, all <= root
};

bool is_sieve(const Sieve& s, const ContextCategory& cat);

// At each root V: {V' <= V : <psi| outer(P, V') |psi> >= 1 - tol.num}.
// Throws NotUnitVector, NotProjection.
std::vector<Sieve> truth_value(const ComplexMatrix& p, std::span<const cplx> psi, const SpectralPresheaf& sigma,
                               const Tolerances& tol);

struct ExcludedMiddleWitness {
  std::string source;                     // how S was built
  ClopenSubobject subobject;
  std::vector<std::size_t> failing_contexts;  // where S v not S misses an atom
};

// Searches proposition subobjects of context atoms for one with
// S v not(S) != total.
std::optional<ExcludedMiddleWitness> find_excluded_middle_failure(std::shared_ptr<const SpectralPresheaf> sigma,
                                                                  const Tolerances& tol);

}  // namespace daseinkit
