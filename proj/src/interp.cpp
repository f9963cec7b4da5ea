#include "daseinkit/interp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "daseinkit/daseinise.hpp"
#include "daseinkit/parallel.hpp"

namespace daseinkit {

struct OperatorExpr::Node {
  Kind kind = Kind::Symbol;
  std::string label;
  double factor = 1.0;
  std::optional<OperatorExpr> a, b;
};

OperatorExpr OperatorExpr::symbol(std::string label) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Symbol;
  n->label = std::move(label);
  return OperatorExpr(std::move(n));
}

OperatorExpr OperatorExpr::scale(double factor, OperatorExpr e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Scale;
  n->factor = factor;
  n->a = std::move(e);
  return OperatorExpr(std::move(n));
}

OperatorExpr OperatorExpr::add(OperatorExpr a, OperatorExpr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Add;
  n->a = std::move(a);
  n->b = std::move(b);
  return OperatorExpr(std::move(n));
}

OperatorExpr OperatorExpr::mul(OperatorExpr a, OperatorExpr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Mul;
  n->a = std::move(a);
  n->b = std::move(b);
  return OperatorExpr(std::move(n));
}

OperatorExpr::Kind OperatorExpr::kind() const { return node_->kind; }
const std::string& OperatorExpr::label() const { return node_->label; }
double OperatorExpr::factor() const { return node_->factor; }
const OperatorExpr& OperatorExpr::lhs() const { return *node_->a; }
const OperatorExpr& OperatorExpr::rhs() const { return *node_->b; }

std::set<std::string> OperatorExpr::symbols() const {
  switch (kind()) {
    case Kind::Symbol:
      return {label()};
    case Kind::Scale:
      return lhs().symbols();
    default: {
      auto s = lhs().symbols();
      s.merge(rhs().symbols());
      return s;
    }
  }
}

std::string OperatorExpr::to_string() const {
  switch (kind()) {
    case Kind::Symbol:
      return label();
    case Kind::Scale: {
      std::ostringstream os;
      os.precision(17);
      os << factor();
      return os.str() + "*" + lhs().to_string();
    }
    case Kind::Add:
      return "(" + lhs().to_string() + " + " + rhs().to_string() + ")";
    case Kind::Mul:
      return "(" + lhs().to_string() + " " + rhs().to_string() + ")";
  }
  return {};
}

ComplexMatrix OperatorExpr::evaluate(const Environment& env) const {
  switch (kind()) {
    case Kind::Symbol: {
      const auto it = env.find(label());
      if (it == env.end()) throw Error(ErrorKind::UnboundSymbol, "unbound symbol '" + label() + "'");
      return it->second.matrix();
    }
    case Kind::Scale:
      return op_scale(factor(), lhs().evaluate(env));
    case Kind::Add:
      return op_add(lhs().evaluate(env), rhs().evaluate(env));
    case Kind::Mul:
      return op_mul(lhs().evaluate(env), rhs().evaluate(env));
  }
  return {};
}

OperatorExpr hamiltonian_expr(double mass, double omega, const std::string& p, const std::string& x) {
  const auto P = OperatorExpr::symbol(p);
  const auto X = OperatorExpr::symbol(x);
  return OperatorExpr::add(OperatorExpr::scale(1.0 / (2.0 * mass), OperatorExpr::mul(P, P)),
                           OperatorExpr::scale(0.5 * mass * omega * omega, OperatorExpr::mul(X, X)));
}

namespace {

// Clusters of nearly equal values, as (mean, member indices), ascending.
std::vector<std::pair<double, std::vector<std::size_t>>> cluster_values(std::span<const double> values,
                                                                        const Tolerances& tol) {
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double range = values[order.back()] - values[order.front()];
  const double gap = tol.group * (range + 1.0);

  std::vector<std::pair<double, std::vector<std::size_t>>> out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    if (k == 0 || values[i] - values[order[k - 1]] > gap) out.push_back({0.0, {}});
    out.back().second.push_back(i);
  }
  for (auto& [mean, idx] : out) {
    double s = 0;
    for (std::size_t i : idx) s += values[i];
    mean = s / static_cast<double>(idx.size());
  }
  return out;
}

// Spectral decomposition of a stage operator, read off its atom values.
SpectralDecomposition stage_decomposition(const Stage& s, const Context& v, const Tolerances& tol) {
  SpectralDecomposition dec;
  for (const auto& [mean, idx] : cluster_values(s.atom_values, tol)) {
    ComplexMatrix proj(v.dim());
    for (std::size_t i : idx) proj += v.atom(i);
    dec.eigenvalues.push_back(mean);
    dec.projections.push_back(HermitianOperator::symmetrized(proj));
  }
  return dec;
}

double min_abs(std::span<const double> v) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v) m = std::min(m, std::abs(x));
  return m;
}

double min_value(std::span<const double> v) { return *std::min_element(v.begin(), v.end()); }

void require_bound(const OperatorExpr& e, const Environment& env, std::size_t dim) {
  for (const auto& s : e.symbols()) {
    const auto it = env.find(s);
    if (it == env.end()) throw Error(ErrorKind::UnboundSymbol, "unbound symbol '" + s + "'");
    if (it->second.dim() != dim)
      throw Error(ErrorKind::DimMismatch, "symbol '" + s + "' has dimension " + std::to_string(it->second.dim()) +
                                              ", category has " + std::to_string(dim));
  }
}

ComplexMatrix interpret_at(const OperatorExpr& e, const std::map<std::string, SpectralDecomposition>& decs,
                           const Context& v, const Tolerances& tol) {
  switch (e.kind()) {
    case OperatorExpr::Kind::Symbol:
      return outer_selfadjoint(decs.at(e.label()), v, tol).op.matrix();
    case OperatorExpr::Kind::Scale:
      return op_scale(e.factor(), interpret_at(e.lhs(), decs, v, tol));
    case OperatorExpr::Kind::Add:
      return op_add(interpret_at(e.lhs(), decs, v, tol), interpret_at(e.rhs(), decs, v, tol));
    case OperatorExpr::Kind::Mul:
      return op_mul(interpret_at(e.lhs(), decs, v, tol), interpret_at(e.rhs(), decs, v, tol));
  }
  return {};
}

bool check_presheaf_compatible(const StageFamily& f, const ContextCategory& cat, const Tolerances& tol) {
  for (std::size_t hi = 0; hi < cat.size(); ++hi) {
    const SpectralDecomposition dec = stage_decomposition(f.stages[hi], cat.context(hi), tol);
    for (std::size_t lo : cat.below(hi)) {
      if (lo == hi) continue;
      const auto r = outer_selfadjoint(dec, cat.context(lo), tol);
      if (max_abs_diff(r.op.matrix(), f.stages[lo].op) > 10 * tol.num) return false;
    }
  }
  return true;
}

}  // namespace

Stage make_stage(const ComplexMatrix& op, const Context& v) {
  Stage s;
  s.op = op;
  for (const cplx& c : v.coefficients(op)) s.atom_values.push_back(c.real());
  s.membership_residual = max_abs_diff(op, v.element(s.atom_values));
  return s;
}

StageFamily delta_interpret(const OperatorExpr& e, const Environment& env, const ContextCategory& cat,
                            const Tolerances& tol) {
  require_bound(e, env, cat.dim());
  std::map<std::string, SpectralDecomposition> decs;
  for (const auto& s : e.symbols()) decs.emplace(s, eigendecompose(env.at(s), tol));

  StageFamily f;
  f.stages.resize(cat.size());
  parallel_for(cat.size(), [&](std::size_t c) {
    const Context& v = cat.context(c);
    f.stages[c] = make_stage(interpret_at(e, decs, v, tol), v);
  });
  for (std::size_t c = 0; c < cat.size(); ++c) {
    if (f.stages[c].membership_residual > 10 * tol.num)
      throw Error(ErrorKind::NumericalFailure, "stage operator at " + cat.context(c).id() + " leaves its context");
  }
  f.is_presheaf_compatible = check_presheaf_compatible(f, cat, tol);
  return f;
}

InternalSpectrum internal_spectrum(const StageFamily& f, const Tolerances& tol) {
  InternalSpectrum s;
  for (const Stage& st : f.stages) {
    std::vector<double> values;
    for (const auto& [mean, idx] : cluster_values(st.atom_values, tol)) values.push_back(mean);
    s.per_stage.push_back(std::move(values));
  }
  s.is_presheaf = f.is_presheaf_compatible;
  return s;
}

Delta0Result delta0_interpret(const OperatorExpr& h, const Environment& env, const ContextCategory& cat,
                              Delta0Rule rule, const Tolerances& tol, const std::string& p, const std::string& x) {
  const auto syms = h.symbols();
  if (syms != std::set<std::string>{p, x})
    throw Error(ErrorKind::MissingSymbol, "Hamiltonian must use exactly the symbols '" + p + "' and '" + x + "'");
  for (const auto& s : {p, x})
    if (!env.contains(s)) throw Error(ErrorKind::MissingSymbol, "symbol '" + s + "' is not bound");

  Delta0Result out;
  out.family = delta_interpret(h, env, cat, tol);
  const StageFamily dp = delta_interpret(OperatorExpr::symbol(p), env, cat, tol);
  const StageFamily dx = delta_interpret(OperatorExpr::symbol(x), env, cat, tol);

  out.stages.resize(cat.size());
  for (std::size_t c = 0; c < cat.size(); ++c) {
    const auto& vp = dp.stages[c].atom_values;
    const auto& vx = dx.stages[c].atom_values;
    Delta0Stage& cls = out.stages[c];
    cls.zero_in_spec_p = min_abs(vp) <= tol.zero;
    cls.zero_in_spec_x = min_abs(vx) <= tol.zero;
    for (std::size_t a = 0; a < vp.size(); ++a)
      if (std::abs(vp[a]) <= tol.zero && std::abs(vx[a]) <= tol.zero) cls.joint_zero_atom = true;
    cls.zeroed = rule == Delta0Rule::spectra_only ? !(cls.zero_in_spec_p && cls.zero_in_spec_x) : !cls.joint_zero_atom;
    if (cls.zeroed) out.family.stages[c] = make_stage(ComplexMatrix(cat.dim()), cat.context(c));
    cls.min_spectrum = min_value(out.family.stages[c].atom_values);
  }
  out.family.is_presheaf_compatible = check_presheaf_compatible(out.family, cat, tol);
  return out;
}

Lemma2Report verify_lemma2(const HermitianOperator& a, const HermitianOperator& b, const ContextCategory& cat,
                           const Tolerances& tol) {
  Lemma2Report r;
  r.a = a.label().empty() ? "A" : a.label();
  r.b = b.label().empty() ? "B" : b.label();
  if (r.a == r.b) r.b += "'";
  r.threshold = 10 * tol.num;
  r.external_commutator = commutator(a.matrix(), b.matrix()).max_abs();

  const Environment env{{r.a, a}, {r.b, b}};
  const auto A = OperatorExpr::symbol(r.a);
  const auto B = OperatorExpr::symbol(r.b);
  const StageFamily fa = delta_interpret(A, env, cat, tol);
  const StageFamily fb = delta_interpret(B, env, cat, tol);
  const StageFamily ab = delta_interpret(OperatorExpr::mul(A, B), env, cat, tol);
  const StageFamily ba = delta_interpret(OperatorExpr::mul(B, A), env, cat, tol);

  r.pass = true;
  for (std::size_t c = 0; c < cat.size(); ++c) {
    Lemma2Stage s;
    s.context = c;
    s.commutator = commutator(fa.stages[c].op, fb.stages[c].op).max_abs();
    s.product_gap = max_abs_diff(ab.stages[c].op, ba.stages[c].op);
    r.max_stage_commutator = std::max({r.max_stage_commutator, s.commutator, s.product_gap});
    if (s.commutator > r.threshold || s.product_gap > r.threshold) r.pass = false;
    r.stages.push_back(s);
  }
  return r;
}

Lemma3Report verify_lemma3(const Environment& env, const ContextCategory& cat, double mass, double omega,
                           Delta0Rule rule, const Tolerances& tol, const std::string& p, const std::string& x) {
  const OperatorExpr h = hamiltonian_expr(mass, omega, p, x);
  const Delta0Result d0 = delta0_interpret(h, env, cat, rule, tol, p, x);
  const StageFamily plain = delta_interpret(h, env, cat, tol);

  Lemma3Report r;
  r.rule = rule;
  r.classification_consistent = true;
  for (std::size_t c = 0; c < cat.size(); ++c) {
    Lemma3Stage s;
    s.context = c;
    s.classification = d0.stages[c];
    const auto& vals = plain.stages[c].atom_values;
    s.undecorated_min = min_value(vals);
    const auto& cls = s.classification;
    s.sufficiency_gap = cls.zero_in_spec_p && cls.zero_in_spec_x && min_abs(vals) > tol.zero;
    s.ok = cls.min_spectrum <= tol.zero;

    if (cls.joint_zero_atom && !(cls.zero_in_spec_p && cls.zero_in_spec_x)) r.classification_consistent = false;
    if (cls.zeroed && d0.family.stages[c].op.max_abs() != 0.0) r.classification_consistent = false;
    if (!cls.zeroed && cls.joint_zero_atom && !s.ok) r.classification_consistent = false;

    if (!s.ok) r.violating.push_back(c);
    if (s.sufficiency_gap) r.gap_stages.push_back(c);
    r.stages.push_back(s);
  }
  r.pass = r.violating.empty();
  r.lemma1_3_pass = r.gap_stages.empty();
  return r;
}

Lemma3Report verify_lemma3(const ContextCategory& cat, std::size_t levels, double mass, double omega, double hbar,
                           Delta0Rule rule, const Tolerances& tol) {
  const Oscillator osc = make_oscillator(levels, mass, omega, hbar);
  const Environment env{{"P", osc.p}, {"X", osc.x}};
  return verify_lemma3(env, cat, mass, omega, rule, tol);
}

std::optional<MultiplicativityWitness> find_nonmultiplicativity_witness(const Environment& env,
                                                                        const ContextCategory& cat,
                                                                        const Tolerances& tol, double threshold) {
  struct Pair {
    std::string symbol;
    SpectralDecomposition a, sq;
  };
  std::vector<Pair> pairs;
  for (const auto& [name, op] : env) {
    const auto square = HermitianOperator::symmetrized(op.matrix() * op.matrix());
    pairs.push_back({name, eigendecompose(op, tol), eigendecompose(square, tol)});
  }
  auto gap_at = [&](const Pair& pr, const Context& v) {
    const ComplexMatrix d = outer_selfadjoint(pr.a, v, tol).op.matrix();
    return max_abs_diff(outer_selfadjoint(pr.sq, v, tol).op.matrix(), d * d);
  };

  for (const Pair& pr : pairs) {
    for (std::size_t c = 0; c < cat.size(); ++c) {
      const double g = gap_at(pr, cat.context(c));
      if (g > threshold) return MultiplicativityWitness{pr.symbol, cat.context(c).id(), cat.context(c).label(), false, g};
    }
  }
  // Merging two atoms of a maximal context gives a stage where a spectral
  // projection of A may be split while one of A*A is not.
  for (std::size_t m : cat.maximal()) {
    const Context& v = cat.context(m);
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = i + 1; j < v.size(); ++j) {
        std::vector<ComplexMatrix> atoms;
        for (std::size_t k = 0; k < v.size(); ++k)
          if (k != i && k != j) atoms.push_back(v.atom(k));
        atoms.push_back(v.atom(i) + v.atom(j));
        const Context merged = Context::from_atoms(std::move(atoms), tol,
                                                   v.label() + "/merge(" + std::to_string(i) + "," +
                                                       std::to_string(j) + ")");
        for (const Pair& pr : pairs) {
          const double g = gap_at(pr, merged);
          if (g > threshold) return MultiplicativityWitness{pr.symbol, merged.id(), merged.label(), true, g};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace daseinkit
