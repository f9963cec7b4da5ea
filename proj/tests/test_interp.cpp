#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "daseinkit/daseinise.hpp"
#include "daseinkit/interp.hpp"
#include "test_support.hpp"

using namespace daseinkit;
using namespace testing;

namespace {

ContextCategory oscillator_category(std::size_t n) {
  const auto osc = make_oscillator(n);
  const std::vector<HermitianOperator> ops{osc.x, osc.p, osc.h};
  return build_category(ops, {}, kTol);
}

Environment oscillator_env(std::size_t n) {
  const auto osc = make_oscillator(n);
  return {{"P", osc.p}, {"X", osc.x}};
}

}  // namespace

TEST_CASE("OperatorExpr structure and external evaluation") {
  const auto A = OperatorExpr::symbol("A");
  const auto B = OperatorExpr::symbol("B");
  const auto e = OperatorExpr::add(OperatorExpr::scale(2.0, A), OperatorExpr::mul(A, B));
  CHECK(e.symbols() == std::set<std::string>{"A", "B"});
  CHECK(e.to_string() == "(2*A + (A B))");
  const Environment env{{"A", herm(sigma_z(), "A")}, {"B", herm(sigma_x(), "B")}};
  const ComplexMatrix expected = 2.0 * sigma_z() + sigma_z() * sigma_x();
  CHECK(max_diff(e.evaluate(env), expected) == 0.0);
  const Environment partial{{"A", herm(sigma_z())}};
  CHECK_THROWS_AS(e.evaluate(partial), Error);
}

TEST_CASE("delta_interpret examples") {
  const std::vector<HermitianOperator> ops{herm(sigma_z(), "Z")};
  const auto cat = build_category(ops, {}, kTol);
  const std::size_t vz = cat.trivial_index() == 0 ? 1 : 0;
  const Environment env{{"X", herm(sigma_x(), "X")}, {"P", herm(sigma_z(), "P")}};
  const auto X = OperatorExpr::symbol("X");
  const auto P = OperatorExpr::symbol("P");

  SUBCASE("products in both orders agree; at V_z both equal sigma_z") {
    const auto xp = delta_interpret(OperatorExpr::mul(X, P), env, cat, kTol);
    const auto px = delta_interpret(OperatorExpr::mul(P, X), env, cat, kTol);
    for (std::size_t c = 0; c < cat.size(); ++c) CHECK(max_diff(xp.stages[c].op, px.stages[c].op) <= 1e-12);
    CHECK(max_diff(xp.stages[vz].op, sigma_z()) <= 1e-12);
  }
  SUBCASE("A - A vanishes at every stage") {
    const auto f = delta_interpret(OperatorExpr::add(X, OperatorExpr::scale(-1, X)), env, cat, kTol);
    for (const auto& s : f.stages) CHECK(s.op.max_abs() == 0.0);
  }
  SUBCASE("symbol already in every context is a fixed point") {
    const Environment id{{"I", herm(ComplexMatrix::diagonal({3.0, 3.0}))}};
    const auto f = delta_interpret(OperatorExpr::symbol("I"), id, cat, kTol);
    for (const auto& s : f.stages) CHECK(max_diff(s.op, ComplexMatrix::diagonal({3.0, 3.0})) <= 1e-12);
    CHECK(f.is_presheaf_compatible);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(delta_interpret(OperatorExpr::symbol("nope"), env, cat, kTol), Error);
    const Environment wrong{{"W", herm(ComplexMatrix::identity(3))}};
    try {
      delta_interpret(OperatorExpr::symbol("W"), wrong, cat, kTol);
      FAIL("expected DimMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DimMismatch);
    }
  }
}

TEST_CASE("internal_spectrum") {
  const auto cat = oscillator_category(3);
  const auto env = oscillator_env(3);
  const auto h = delta_interpret(hamiltonian_expr(1, 1), env, cat, kTol);
  const auto spec = internal_spectrum(h, kTol);
  const auto& triv = spec.per_stage[cat.trivial_index()];
  REQUIRE(triv.size() == 1);
  const auto roots = x_eigenpairs(3, false).values;
  const double lmax = roots.back();
  CHECK(lmax == doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
  CHECK(triv[0] == doctest::Approx((lmax * lmax + lmax * lmax) / 2).epsilon(1e-12));
  CHECK(triv[0] == doctest::Approx(1.5).epsilon(1e-12));

  const std::vector<HermitianOperator> ops{herm(sigma_z(), "Z")};
  const auto qcat = build_category(ops, {}, kTol);
  const Environment z{{"Z", herm(sigma_z())}};
  const auto fz = internal_spectrum(delta_interpret(OperatorExpr::symbol("Z"), z, qcat, kTol), kTol);
  const std::size_t vz = qcat.trivial_index() == 0 ? 1 : 0;
  REQUIRE(fz.per_stage[vz].size() == 2);
  CHECK(fz.per_stage[vz][0] == doctest::Approx(-1));
  CHECK(fz.per_stage[vz][1] == doctest::Approx(1));

  StageFamily zero;
  for (std::size_t c = 0; c < qcat.size(); ++c) zero.stages.push_back(make_stage(ComplexMatrix(2), qcat.context(c)));
  for (const auto& s : internal_spectrum(zero, kTol).per_stage) CHECK(s == std::vector<double>{0.0});
}

TEST_CASE("delta0 classification matches the eigenvector-overlap oracle") {
  for (std::size_t n : {3u, 5u}) {
    const auto cat = oscillator_category(n);
    const auto env = oscillator_env(n);
    const auto ex = x_eigenpairs(n, false);
    const auto ep = x_eigenpairs(n, true);
    // The oracle's momentum eigenvectors must really be eigenvectors of P.
    for (std::size_t k = 0; k < n; ++k) {
      const auto& v = ep.vectors[k];
      for (std::size_t i = 0; i < n; ++i) {
        cplx s{};
        for (std::size_t j = 0; j < n; ++j) s += env.at("P").matrix()(i, j) * v[j];
        REQUIRE(std::abs(s - ep.values[k] * v[i]) < 1e-10);
      }
    }
    for (auto rule : {Delta0Rule::joint_atom, Delta0Rule::spectra_only}) {
      const auto d0 = delta0_interpret(hamiltonian_expr(1, 1), env, cat, rule, kTol);
      for (std::size_t c = 0; c < cat.size(); ++c) {
        const Context& v = cat.context(c);
        bool zp = false, zx = false, joint = false;
        for (std::size_t a = 0; a < v.size(); ++a) {
          const double vp = oracle_outer_value(ep, v.atom(a));
          const double vx = oracle_outer_value(ex, v.atom(a));
          zp |= std::abs(vp) <= 1e-9;
          zx |= std::abs(vx) <= 1e-9;
          joint |= std::abs(vp) <= 1e-9 && std::abs(vx) <= 1e-9;
        }
        const auto& cls = d0.stages[c];
        CHECK(cls.zero_in_spec_p == zp);
        CHECK(cls.zero_in_spec_x == zx);
        CHECK(cls.joint_zero_atom == joint);
        CHECK(cls.zeroed == (rule == Delta0Rule::joint_atom ? !joint : !(zp && zx)));
        if (cls.zeroed) CHECK(d0.family.stages[c].op.max_abs() == 0.0);
      }
      // Trivial context: both daseinised values are lambda_max > 0.
      CHECK(d0.stages[cat.trivial_index()].zeroed);
    }
  }
}

TEST_CASE("delta0 requires exactly P and X") {
  const auto cat = oscillator_category(3);
  auto env = oscillator_env(3);
  const auto P = OperatorExpr::symbol("P");
  CHECK_THROWS_AS(delta0_interpret(OperatorExpr::mul(P, P), env, cat, Delta0Rule::joint_atom, kTol), Error);
  env.erase("X");
  try {
    delta0_interpret(hamiltonian_expr(1, 1), env, cat, Delta0Rule::joint_atom, kTol);
    FAIL("expected MissingSymbol");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingSymbol);
  }
}

TEST_CASE("verify_lemma2") {
  const std::vector<HermitianOperator> ops{herm(sigma_z(), "Z"), herm(sigma_x(), "X")};
  const auto cat = build_category(ops, {}, kTol);
  const auto r = verify_lemma2(herm(sigma_z(), "Z"), herm(sigma_x(), "X"), cat, kTol);
  CHECK(r.pass);
  CHECK(r.max_stage_commutator == 0.0);
  CHECK(r.external_commutator == doctest::Approx(2.0));

  const auto same = verify_lemma2(herm(sigma_y(), "Y"), herm(sigma_y(), "Y"), cat, kTol);
  CHECK(same.pass);
  CHECK(same.max_stage_commutator == 0.0);

  const auto ocat = oscillator_category(5);
  const auto osc = make_oscillator(5);
  const auto o = verify_lemma2(osc.x, osc.p, ocat, kTol);
  CHECK(o.pass);
  CHECK(o.max_stage_commutator <= 10 * kTol.num);
  CHECK(o.stages.size() == ocat.size());
  // [X, P] = i hbar I away from the truncation corner.
  const ComplexMatrix c = commutator(osc.x.matrix(), osc.p.matrix());
  for (std::size_t i = 0; i + 1 < 5; ++i) CHECK(std::abs(c(i, i) - cplx{0, 1}) < 1e-12);
}

TEST_CASE("verify_lemma3") {
  SUBCASE("N=3 joint_atom passes with exact zero minima") {
    const auto cat = oscillator_category(3);
    const auto r = verify_lemma3(cat, 3, 1, 1, 1, Delta0Rule::joint_atom, kTol);
    CHECK(r.pass);
    CHECK(r.classification_consistent);
    for (const auto& s : r.stages) CHECK(s.classification.min_spectrum == 0.0);
  }
  SUBCASE("N=2: every stage zeroed") {
    const auto cat = oscillator_category(2);
    for (auto rule : {Delta0Rule::joint_atom, Delta0Rule::spectra_only}) {
      const auto r = verify_lemma3(cat, 2, 1, 1, 1, rule, kTol);
      CHECK(r.pass);
      for (const auto& s : r.stages) CHECK(s.classification.zeroed);
    }
  }
  SUBCASE("N=8: rules agree where no gap stage exists") {
    const auto cat = oscillator_category(8);
    const auto a = verify_lemma3(cat, 8, 1, 1, 1, Delta0Rule::joint_atom, kTol);
    const auto b = verify_lemma3(cat, 8, 1, 1, 1, Delta0Rule::spectra_only, kTol);
    CHECK(a.pass);
    CHECK(a.classification_consistent);
    CHECK(b.classification_consistent);
    // spectra_only violations are exactly the sufficiency-gap stages.
    CHECK(b.violating == b.gap_stages);
    CHECK(a.gap_stages == b.gap_stages);
  }
  SUBCASE("spectra_only fails on disjoint zero atoms") {
    const std::vector<HermitianOperator> ops{herm(ComplexMatrix::diagonal({0, 1}), "P"),
                                             herm(ComplexMatrix::diagonal({1, 0}), "X")};
    const auto cat = build_category(ops, {}, kTol);
    const Environment env{{"P", ops[0]}, {"X", ops[1]}};
    const auto lit = verify_lemma3(env, cat, 1, 1, Delta0Rule::spectra_only, kTol);
    CHECK_FALSE(lit.pass);
    CHECK_FALSE(lit.lemma1_3_pass);
    REQUIRE(lit.violating.size() == 1);
    CHECK(lit.stages[lit.violating[0]].undecorated_min == doctest::Approx(0.5));
    const auto rep = verify_lemma3(env, cat, 1, 1, Delta0Rule::joint_atom, kTol);
    CHECK(rep.pass);
  }
}

TEST_CASE("non-multiplicativity witness") {
  const auto cat = oscillator_category(5);
  const auto env = oscillator_env(5);
  const auto w = find_nonmultiplicativity_witness(env, cat, kTol, 100 * kTol.num);
  REQUIRE(w.has_value());
  CHECK(w->gap > 100 * kTol.num);

  // Independent recomputation of the N=3 merged-stage gap: merge the atoms
  // of X's eigenbasis for -sqrt(3/2) and 0.
  const auto ex = x_eigenpairs(3, false);
  const Context v = Context::from_atoms(
      {ComplexMatrix::outer(ex.vectors[0]) + ComplexMatrix::outer(ex.vectors[1]), ComplexMatrix::outer(ex.vectors[2])},
      kTol);
  const auto x = make_oscillator(3).x;
  const auto d = outer_selfadjoint(x, v, kTol).op.matrix();
  const auto dsq = outer_selfadjoint(HermitianOperator::symmetrized(x.matrix() * x.matrix()), v, kTol).op.matrix();
  // Merged atom Q: delta(X) = 0 there, delta(X^2) = 3/2, so the gap is 1.5 Q.
  const ComplexMatrix q = ComplexMatrix::outer(ex.vectors[0]) + ComplexMatrix::outer(ex.vectors[1]);
  CHECK(max_diff(dsq, d * d) == doctest::Approx(1.5 * q.max_abs()).epsilon(1e-9));
}

TEST_CASE("stage-wise commutativity on random expressions") {
  std::mt19937_64 rng(11);
  const auto cat = oscillator_category(4);
  Environment env;
  for (const char* s : {"A", "B", "C"}) env.emplace(s, HermitianOperator::symmetrized(random_hermitian(4, rng), s));
  std::uniform_int_distribution<int> pick(0, 2);
  auto sym = [&] { return OperatorExpr::symbol(std::string(1, static_cast<char>('A' + pick(rng)))); };
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = OperatorExpr::add(sym(), OperatorExpr::scale(0.5, sym()));
    const auto b = OperatorExpr::mul(sym(), sym());
    const auto ab = delta_interpret(OperatorExpr::mul(a, b), env, cat, kTol);
    const auto ba = delta_interpret(OperatorExpr::mul(b, a), env, cat, kTol);
    for (std::size_t c = 0; c < cat.size(); ++c) {
      CHECK(max_diff(ab.stages[c].op, ba.stages[c].op) <= 10 * kTol.num);
      CHECK(ab.stages[c].membership_residual <= 10 * kTol.num);
    }
  }
}

TEST_CASE("verify_lemma1 examples") {
  SUBCASE("commuting diagonal projections") {
    const std::vector<ComplexMatrix> g{ComplexMatrix::diagonal({1, 0, 0}), ComplexMatrix::diagonal({1, 1, 0})};
    const auto r = verify_lemma1(g, 3, kTol);
    CHECK(r.distributive);
    CHECK_FALSE(r.noncommuting_pair);
    CHECK(r.pass);
    CHECK(r.lattice_size == 8);  // Boolean algebra on three atoms
  }
  SUBCASE("|0><0| and |+><+|") {
    const std::vector<ComplexMatrix> g{ket0(), ketplus()};
    const auto r = verify_lemma1(g, 2, kTol);
    CHECK_FALSE(r.distributive);
    CHECK(r.noncommuting_pair);
    CHECK(r.pass);
    CHECK(r.lattice_size == 6);  // 0, I, and four lines
  }
  SUBCASE("{0, I}") {
    const std::vector<ComplexMatrix> g{ComplexMatrix(2), ComplexMatrix::identity(2)};
    const auto r = verify_lemma1(g, 2, kTol);
    CHECK(r.distributive);
    CHECK(r.pass);
    CHECK(r.lattice_size == 2);
  }
  SUBCASE("preconditions") {
    const std::vector<ComplexMatrix> big{ComplexMatrix::identity(5)};
    CHECK_THROWS_AS(verify_lemma1(big, 5, kTol), Error);
    const std::vector<ComplexMatrix> bad{sigma_x()};
    CHECK_THROWS_AS(verify_lemma1(bad, 2, kTol), Error);
    const std::vector<ComplexMatrix> g{ket0(), ketplus()};
    try {
      verify_lemma1(g, 2, kTol, 4);
      FAIL("expected SizeLimitExceeded");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SizeLimitExceeded);
    }
  }
}

TEST_CASE("verify_lemma1 on random generator sets") {
  std::mt19937_64 rng(2024);
  int noncommuting = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t dim = 2 + static_cast<std::size_t>(trial % 3);
    const auto gens = random_lemma1_generators(dim, rng);
    const auto r = verify_lemma1(gens, dim, kTol);
    CHECK(r.pass);
    noncommuting += r.noncommuting_pair ? 1 : 0;
  }
  // Both sides of the equivalence get exercised.
  CHECK(noncommuting > 10);
  CHECK(noncommuting < 110);
}
