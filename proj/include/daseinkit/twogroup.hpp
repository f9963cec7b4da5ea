#pragma once

// Automorphism 2-groups of small finite categories: invertible functors,
// natural isomorphisms between them, their compositions and the interchange
// law, plus the commutativity check forced by interchange on a group.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "daseinkit/contexts.hpp"

namespace daseinkit {

inline constexpr std::size_t kNoMorphism = static_cast<std::size_t>(-1);

struct Morphism {
  std::string id;
  std::size_t src = 0;
  std::size_t dst = 0;
};

class FiniteCategory {
 public:
  // `morphisms` must contain an identity for every object (listed in
  // `identities`); `compose[g][f]` is g o f, or kNoMorphism when dst(f) !=
  // src(g). Validates totality, identity laws and associativity
  // (InvalidParameter).
  FiniteCategory(std::vector<std::string> objects, std::vector<Morphism> morphisms,
                 std::vector<std::size_t> identities, std::vector<std::vector<std::size_t>> compose);

  // One morphism lo -> hi for each lo <= hi.
  static FiniteCategory from_poset(const ContextCategory& cat);
  static FiniteCategory from_poset(std::vector<std::string> objects, const std::vector<std::vector<bool>>& leq);
  static FiniteCategory discrete(std::size_t n);

  std::size_t objects() const noexcept { return objects_.size(); }
  std::size_t morphisms() const noexcept { return morphisms_.size(); }
  const std::string& object_name(std::size_t i) const { return objects_.at(i); }
  const Morphism& morphism(std::size_t i) const { return morphisms_.at(i); }
  std::size_t identity(std::size_t obj) const { return identities_.at(obj); }
  std::size_t compose(std::size_t g, std::size_t f) const { return compose_[g][f]; }
  const std::vector<std::size_t>& hom(std::size_t a, std::size_t b) const { return hom_[a * objects_.size() + b]; }
  // Two-sided inverse, if f is an isomorphism.
  std::optional<std::size_t> inverse(std::size_t f) const;

 private:
  std::vector<std::string> objects_;
  std::vector<Morphism> morphisms_;
  std::vector<std::size_t> identities_;
  std::vector<std::vector<std::size_t>> compose_;
  std::vector<std::vector<std::size_t>> hom_;
};

class FiniteGroup;
FiniteCategory one_object_category(const FiniteGroup& g);

// An invertible functor C -> C.
struct Functor {
  std::vector<std::size_t> objects;
  std::vector<std::size_t> morphisms;
  bool operator==(const Functor&) const = default;
};

Functor identity_functor(const FiniteCategory& c);
// (g o f)(x) = g(f(x))
Functor compose_functors(const Functor& g, const Functor& f);
// Identities, composition, bijectivity.
bool is_automorphism(const FiniteCategory& c, const Functor& f);

// A natural isomorphism source => target.
struct TwoCell {
  Functor source;
  Functor target;
  std::vector<std::size_t> components;  // per object: source(x) -> target(x)
};

bool is_natural_isomorphism(const FiniteCategory& c, const TwoCell& t);
TwoCell identity_cell(const FiniteCategory& c, const Functor& f);

struct AutTwoGroup {
  std::vector<Functor> automorphisms;  // lexicographic by object map, then morphism map
  std::vector<TwoCell> two_cells;
};

// Exhaustive enumeration. Throws SizeLimitExceeded past `limit` objects or
// 64 morphisms.
AutTwoGroup aut_2group(const FiniteCategory& c, std::size_t limit = 8);

// beta . alpha (alpha first). Throws NotComposable.
TwoCell compose_vertical(const FiniteCategory& c, const TwoCell& alpha, const TwoCell& beta);
// beta * alpha : beta.source o alpha.source => beta.target o alpha.target.
TwoCell compose_horizontal(const FiniteCategory& c, const TwoCell& alpha, const TwoCell& beta);

// (delta .v gamma) *h (beta .v alpha) == (delta *h beta) .v (gamma *h alpha).
// Throws NotComposable unless alpha;beta and gamma;delta compose vertically.
bool check_interchange(const FiniteCategory& c, const TwoCell& alpha, const TwoCell& beta, const TwoCell& gamma,
                       const TwoCell& delta);

struct InterchangeSummary {
  std::size_t quadruples = 0;
  std::size_t failures = 0;
};

// Every quadruple of 2-cells with alpha;beta and gamma;delta vertically composable.
InterchangeSummary check_interchange_exhaustive(const FiniteCategory& c, const AutTwoGroup& aut);

class FiniteGroup {
 public:
  // Checks closure, associativity, identity and inverses (InvalidParameter).
  FiniteGroup(std::string name, std::vector<std::string> elements, std::vector<std::vector<std::size_t>> table);

  const std::string& name() const noexcept { return name_; }
  std::size_t order() const noexcept { return elements_.size(); }
  const std::string& element(std::size_t i) const { return elements_.at(i); }
  std::size_t mul(std::size_t a, std::size_t b) const { return table_[a][b]; }
  std::size_t identity() const noexcept { return identity_; }
  bool is_abelian() const;

 private:
  std::string name_;
  std::vector<std::string> elements_;
  std::vector<std::vector<std::size_t>> table_;
  std::size_t identity_ = 0;
};

FiniteGroup cyclic_product(const std::vector<std::size_t>& moduli);  // Z_m1 x Z_m2 x ...
FiniteGroup dihedral(std::size_t n);                                 // order 2n
FiniteGroup dicyclic(std::size_t n);                                 // order 4n
FiniteGroup alternating4();

struct CatalogEntry {
  FiniteGroup group;
  bool abelian;  // known from the construction
};

// One representative of every isomorphism class of order <= 12.
std::vector<CatalogEntry> small_group_catalog();

struct EckmannHiltonResult {
  bool consistent = true;  // interchange of the group law with itself holds
  std::size_t quadruples_checked = 0;
  std::optional<std::array<std::size_t, 2>> witness;  // a, b with ab != ba
};

// Searches (ab)(cd) vs (ac)(bd) over all quadruples. Throws
// InvalidParameter for groups larger than 64.
EckmannHiltonResult eckmann_hilton_check(const FiniteGroup& g);

}  // namespace daseinkit
