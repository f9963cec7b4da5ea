#include <doctest.h>

#include <memory>
#include <random>

#include "daseinkit/daseinise.hpp"
#include "daseinkit/sheaf.hpp"
#include "test_support.hpp"

using namespace daseinkit;
using namespace testing;

namespace {

std::shared_ptr<const ContextCategory> qubit_category() {
  const std::vector<HermitianOperator> ops{herm(sigma_z(), "Z"), herm(sigma_x(), "X")};
  return std::make_shared<const ContextCategory>(build_category(ops, {}, kTol));
}

std::size_t index_by_label(const ContextCategory& cat, const std::string& label) {
  for (std::size_t i = 0; i < cat.size(); ++i)
    if (cat.context(i).label() == label) return i;
  FAIL("no context labelled " << label);
  return 0;
}

// The atom of `ctx` equal to `p`.
std::size_t atom_index(const Context& ctx, const ComplexMatrix& p) {
  for (std::size_t a = 0; a < ctx.size(); ++a)
    if (max_diff(ctx.atom(a), p) <= 1e-12) return a;
  FAIL("atom not found");
  return 0;
}

std::shared_ptr<const ContextCategory> oscillator_category(std::size_t n, bool full) {
  const auto osc = make_oscillator(n);
  const std::vector<HermitianOperator> ops{osc.x, osc.p, osc.h};
  CategoryOptions opts;
  opts.full_subcontexts = full;
  return std::make_shared<const ContextCategory>(build_category(ops, opts, kTol));
}

}  // namespace

TEST_CASE("spectral presheaf on small categories") {
  const std::vector<HermitianOperator> none{herm(ComplexMatrix::identity(2))};
  const auto t = build_spectral_presheaf(std::make_shared<const ContextCategory>(build_category(none, {}, kTol)), kTol);
  REQUIRE(t->category().size() == 1);
  CHECK(t->sections(0) == 1);
  CHECK(t->restrict(0, 0, 0) == 0);

  const std::vector<HermitianOperator> one{herm(sigma_z(), "Z")};
  const auto s = build_spectral_presheaf(std::make_shared<const ContextCategory>(build_category(one, {}, kTol)), kTol);
  const auto& cat = s->category();
  const std::size_t z = index_by_label(cat, "Z");
  CHECK(s->restrict(z, cat.trivial_index(), 0) == 0);
  CHECK(s->restrict(z, cat.trivial_index(), 1) == 0);
  CHECK(s->restrict(z, z, 1) == 1);
}

TEST_CASE("restriction triangles commute on the oscillator coarsening category") {
  const auto sigma = build_spectral_presheaf(oscillator_category(3, true), kTol);
  const auto& cat = sigma->category();
  // Independent recomputation: an atom's image is the coarse atom containing it.
  std::size_t triangles = 0;
  for (std::size_t hi = 0; hi < cat.size(); ++hi)
    for (std::size_t mid : cat.below(hi))
      for (std::size_t lo : cat.below(mid)) {
        ++triangles;
        for (std::size_t a = 0; a < cat.context(hi).size(); ++a) {
          const std::size_t direct = sigma->restrict(hi, lo, a);
          CHECK(direct == sigma->restrict(mid, lo, sigma->restrict(hi, mid, a)));
          const auto& q = cat.context(hi).atom(a);
          CHECK(max_diff(cat.context(lo).atom(direct) * q, q) <= 1e-12);
        }
      }
  CHECK(triangles == sigma->triangles_checked());
}

TEST_CASE("proposition subobjects over the qubit category") {
  const auto sigma = build_spectral_presheaf(qubit_category(), kTol);
  const auto& cat = sigma->category();
  const std::size_t z = index_by_label(cat, "Z"), x = index_by_label(cat, "X"), t = cat.trivial_index();

  CHECK(proposition_subobject(ComplexMatrix::identity(2), sigma, kTol) == total_subobject(sigma));
  CHECK(proposition_subobject(ComplexMatrix(2), sigma, kTol) == empty_subobject(sigma));

  const auto s0 = proposition_subobject(ket0(), sigma, kTol);
  CHECK(s0.members(z) == std::vector<std::size_t>{atom_index(cat.context(z), ket0())});
  CHECK(s0.members(x).size() == 2);
  CHECK(s0.members(t).size() == 1);
  CHECK(s0.is_stable());

  const auto s1 = proposition_subobject(ket1(), sigma, kTol);
  const auto m = heyting_meet(s0, s1);
  CHECK(m.members(z).empty());
  CHECK(m.members(x).size() == 2);
  CHECK(m.members(t).size() == 1);
}

TEST_CASE("Heyting operations: unit laws and excluded middle") {
  const auto sigma = build_spectral_presheaf(qubit_category(), kTol);
  const auto& cat = sigma->category();
  const auto total = total_subobject(sigma);
  const auto empty = empty_subobject(sigma);
  const auto s = proposition_subobject(ket0(), sigma, kTol);

  CHECK(heyting_meet(s, total) == s);
  CHECK(heyting_join(s, empty) == s);
  CHECK(heyting_implies(s, s) == total);
  CHECK(heyting_implies(total, s) == s);

  // not(S) is empty: every character restricts to the trivial context where
  // S holds. S v not(S) = S, which misses |1> at the sigma_z stage.
  const auto lem = heyting_join(s, heyting_not(s));
  CHECK_FALSE(lem == total);
  const std::size_t z = index_by_label(cat, "Z");
  CHECK(lem.members(z).size() == 1);
  CHECK(lem.members(index_by_label(cat, "X")).size() == 2);

  const auto witness = find_excluded_middle_failure(sigma, kTol);
  REQUIRE(witness.has_value());
  CHECK_FALSE(witness->failing_contexts.empty());
}

TEST_CASE("Heyting operations reject subobjects from different presheaves") {
  const auto a = build_spectral_presheaf(qubit_category(), kTol);
  const auto b = build_spectral_presheaf(qubit_category(), kTol);
  try {
    heyting_meet(total_subobject(a), total_subobject(b));
    FAIL("expected PresheafMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PresheafMismatch);
  }
  CHECK_THROWS_AS(heyting_implies(total_subobject(a), empty_subobject(b)), Error);
}

TEST_CASE("property: Heyting algebra laws on random clopen subobjects") {
  for (const auto& cat : {qubit_category(), oscillator_category(3, true), oscillator_category(4, false)}) {
    const auto sigma = build_spectral_presheaf(cat, kTol);
    std::mt19937_64 rng(1234);
    std::vector<ClopenSubobject> pool;
    for (int i = 0; i < 200; ++i) pool.push_back(random_clopen(sigma, rng, 0.1 + 0.3 * (i % 3)));
    const auto total = total_subobject(sigma), empty = empty_subobject(sigma);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int i = 0; i < 200; ++i) {
      const auto& s = pool[i];
      const auto& t = pool[pick(rng)];
      const auto& u = pool[pick(rng)];
      CHECK(s.is_stable());
      CHECK(heyting_meet(s, t) == heyting_meet(t, s));
      CHECK(heyting_join(s, t) == heyting_join(t, s));
      CHECK(heyting_meet(s, heyting_join(s, t)) == s);
      CHECK(heyting_join(s, heyting_meet(s, t)) == s);
      CHECK(heyting_meet(s, heyting_meet(t, u)) == heyting_meet(heyting_meet(s, t), u));
      CHECK(heyting_meet(s, heyting_join(t, u)) == heyting_join(heyting_meet(s, t), heyting_meet(s, u)));
      CHECK(heyting_meet(s, total) == s);
      CHECK(heyting_join(s, empty) == s);
      const auto imp = heyting_implies(s, t);
      CHECK(imp.is_stable());
      // U <= (S => T) iff U ^ S <= T
      CHECK((u <= imp) == (heyting_meet(u, s) <= t));
      CHECK(heyting_meet(s, imp) <= t);
      CHECK(heyting_meet(s, heyting_not(s)) == empty);
    }
  }
}

TEST_CASE("truth values are sieves") {
  const auto sigma = build_spectral_presheaf(qubit_category(), kTol);
  const auto& cat = sigma->category();
  const std::vector<cplx> zero{1, 0};
  const auto z = index_by_label(cat, "Z");

  const auto all = truth_value(ComplexMatrix::identity(2), zero, *sigma, kTol);
  for (const auto& s : all) CHECK(s.members == cat.below(s.root));

  const auto none = truth_value(ComplexMatrix(2), zero, *sigma, kTol);
  for (const auto& s : none) CHECK(s.members.empty());

  const auto tv = truth_value(ket0(), zero, *sigma, kTol);
  CHECK(tv[z].members == cat.below(z));
  for (const auto& s : tv) CHECK(is_sieve(s, cat));

  const std::vector<cplx> bad{1, 1};
  try {
    truth_value(ket0(), bad, *sigma, kTol);
    FAIL("expected NotUnitVector");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotUnitVector);
  }
}

TEST_CASE("property: truth values on the oscillator category are downward closed") {
  const auto sigma = build_spectral_presheaf(oscillator_category(3, true), kTol);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    auto cols = random_unitary_columns(3, rng);
    const std::vector<cplx> psi = cols[0];
    cols.resize(1 + trial % 2);
    const auto p = trial % 5 == 0 ? sigma->category().context(trial % sigma->category().size()).atom(0) : projector_onto(cols);
    for (const auto& s : truth_value(p, psi, *sigma, kTol)) CHECK(is_sieve(s, sigma->category()));
  }
}
