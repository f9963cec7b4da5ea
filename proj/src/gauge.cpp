#include "daseinkit/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "daseinkit/daseinise.hpp"
#include "daseinkit/parallel.hpp"

namespace daseinkit {
namespace {

S1Stage s1_stage(std::size_t c, const ComplexMatrix& candidate, const Context& v) {
  S1Stage s;
  s.context = c;
  s.coefficients = v.coefficients(candidate);
  for (const cplx& z : s.coefficients) s.max_imag = std::max(s.max_imag, std::abs(z.imag()));
  s.residual = max_abs_diff(candidate, conditional_expectation(candidate, v));
  s.candidate = candidate;
  return s;
}

}  // namespace

ComplexMatrix conditional_expectation(const ComplexMatrix& m, const Context& v) {
  if (m.dim() != v.dim()) throw Error(ErrorKind::DimMismatch, "conditional_expectation: dimension");
  ComplexMatrix out(v.dim());
  const auto coeffs = v.coefficients(m);
  for (std::size_t i = 0; i < v.size(); ++i) out.add_scaled(coeffs[i], v.atom(i));
  return out;
}

S1Report check_S1(const ComplexMatrix& m, const ContextCategory& cat, const Tolerances& tol) {
  if (m.dim() != cat.dim()) throw Error(ErrorKind::DimMismatch, "check_S1: operator dimension");
  S1Report r;
  r.rule = S1Rule::conditional_expectation;
  r.stages.resize(cat.size());
  parallel_for(cat.size(), [&](std::size_t c) {
    const Context& v = cat.context(c);
    S1Stage s = s1_stage(c, conditional_expectation(m, v), v);
    s.holds = s.max_imag <= tol.num;
    r.stages[c] = std::move(s);
  });
  r.all_hold = std::all_of(r.stages.begin(), r.stages.end(), [](const S1Stage& s) { return s.holds; });
  return r;
}

S1Report check_S1(std::span<const ComplexMatrix> supplied, const ContextCategory& cat, const Tolerances& tol) {
  if (supplied.size() != cat.size()) throw Error(ErrorKind::DimMismatch, "check_S1: one candidate per context");
  S1Report r;
  r.rule = S1Rule::user_supplied;
  for (std::size_t c = 0; c < cat.size(); ++c) {
    if (supplied[c].dim() != cat.dim()) throw Error(ErrorKind::DimMismatch, "check_S1: candidate dimension");
    S1Stage s = s1_stage(c, supplied[c], cat.context(c));
    s.holds = s.residual <= tol.num;
    r.stages.push_back(std::move(s));
  }
  r.all_hold = std::all_of(r.stages.begin(), r.stages.end(), [](const S1Stage& s) { return s.holds; });
  return r;
}

ComplexMatrix apply_automorphism(const StageAutomorphism& f, const Context& v, std::span<const double> values) {
  ComplexMatrix out(v.dim());
  for (std::size_t i = 0; i < values.size(); ++i) out.add_scaled(values[i], v.atom(f.permutation.at(i)));
  return out;
}

S2Report find_S2_automorphism(const StageFamily& f1, const StageFamily& f2, const ContextCategory& cat,
                              const Tolerances& tol) {
  if (f1.stages.size() != cat.size() || f2.stages.size() != cat.size())
    throw Error(ErrorKind::DimMismatch, "find_S2_automorphism: families must cover the category");
  S2Report r;
  r.per_stage.resize(cat.size());
  r.replay_error.assign(cat.size(), std::numeric_limits<double>::quiet_NaN());

  for (std::size_t c = 0; c < cat.size(); ++c) {
    const Context& v = cat.context(c);
    const auto& a = f1.stages[c].atom_values;
    const auto& b = f2.stages[c].atom_values;

    // Cluster labels over the pooled values so "equal" is the same relation
    // on both sides.
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<std::size_t> order(pooled.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
    const double gap = tol.group * (pooled[order.back()] - pooled[order.front()] + 1.0);
    std::vector<std::size_t> label(pooled.size());
    std::size_t current = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k > 0 && pooled[order[k]] - pooled[order[k - 1]] > gap) ++current;
      label[order[k]] = current;
    }

    // Greedy smallest free partner in the same cluster: lexicographically
    // least, and complete whenever the cluster counts agree.
    StageAutomorphism f{v.id(), std::vector<std::size_t>(a.size())};
    std::vector<char> used(b.size(), 0);
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i) {
      ok = false;
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (!used[j] && label[a.size() + j] == label[i]) {
          used[j] = 1;
          f.permutation[i] = j;
          ok = true;
          break;
        }
      }
    }
    if (!ok) continue;
    const double err = max_abs_diff(apply_automorphism(f, v, a), f2.stages[c].op);
    if (err > 10 * tol.num) continue;
    r.replay_error[c] = err;
    r.per_stage[c] = std::move(f);
  }
  r.realizable = std::all_of(r.per_stage.begin(), r.per_stage.end(), [](const auto& s) { return s.has_value(); });
  return r;
}

std::vector<double> GaugeMap::apply(std::span<const double> x) const {
  if (x.size() != d.size()) throw Error(ErrorKind::DimMismatch, "gauge map arity");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = 2 * d[i] - x[i];
  return out;
}

TakeutiReport takeuti_gauge(const HermitianOperator& a, const ContextCategory& cat, const Tolerances& tol) {
  const SpectralDecomposition dec = eigendecompose(a, tol);
  const SpectralDecomposition dec_sq =
      eigendecompose(HermitianOperator::symmetrized(a.matrix() * a.matrix()), tol);
  const double eq = 10 * tol.num;

  TakeutiReport r;
  r.symbol = a.label();
  r.stages.resize(cat.size());
  parallel_for(cat.size(), [&](std::size_t c) {
    const Context& v = cat.context(c);
    const auto da = outer_selfadjoint(dec, v, tol);
    const auto dsq = outer_selfadjoint(dec_sq, v, tol);
    const ComplexMatrix da2 = da.op.matrix() * da.op.matrix();
    const auto g2 = v.coefficients(da2);

    TakeutiStage s;
    s.context = c;
    s.gauge.context_id = v.id();
    for (std::size_t i = 0; i < v.size(); ++i) {
      TakeutiAtom t;
      t.l1 = dsq.atom_values[i];
      t.l2 = g2[i].real();
      t.l = std::abs(t.l1 - t.l2);
      t.d = 0.5 * t.l + t.l1;
      t.relation1 = t.l1 >= -tol.num && t.l1 <= t.l2 + tol.num;
      const double r1 = 2 * t.d - t.l1, r2 = 2 * t.d - t.l2;
      t.swaps = std::abs(r1 - t.l2) <= eq && std::abs(r2 - t.l1) <= eq;
      t.literal_composite = -(t.l1 - t.d);
      s.gauge.d.push_back(t.d);
      s.atoms.push_back(t);
    }
    s.relation1 = std::all_of(s.atoms.begin(), s.atoms.end(), [](const TakeutiAtom& t) { return t.relation1; });
    s.swaps_where_relation1 =
        std::all_of(s.atoms.begin(), s.atoms.end(), [](const TakeutiAtom& t) { return !t.relation1 || t.swaps; });
    std::vector<double> l1s;
    for (const auto& t : s.atoms) l1s.push_back(t.l1);
    const auto back = s.gauge.apply(s.gauge.apply(l1s));
    s.involutive = true;
    for (std::size_t i = 0; i < l1s.size(); ++i)
      if (std::abs(back[i] - l1s[i]) > eq) s.involutive = false;
    r.stages[c] = std::move(s);
  });

  r.swaps_where_relation1 = true;
  r.involutive = true;
  for (const auto& s : r.stages) {
    for (const auto& t : s.atoms) {
      if (!t.relation1) ++r.relation1_failures;
      if (std::abs(t.literal_composite - t.l2) > eq) ++r.literal_mismatches;
    }
    r.swaps_where_relation1 = r.swaps_where_relation1 && s.swaps_where_relation1;
    r.involutive = r.involutive && s.involutive;
  }
  return r;
}

CategoryAutomorphismReport assemble_category_automorphism(std::span<const StageMap> maps, const ContextCategory& cat,
                                                          const Tolerances& tol) {
  if (maps.size() != cat.size())
    throw Error(ErrorKind::InvalidStageMap, "expected one stage map per context (" + std::to_string(cat.size()) +
                                                "), got " + std::to_string(maps.size()));
  CategoryAutomorphismReport r;
  r.stages = maps.size();
  r.involutive = true;
  for (std::size_t c = 0; c < cat.size(); ++c) {
    const Context& v = cat.context(c);
    if (const auto* g = std::get_if<GaugeMap>(&maps[c])) {
      if (g->context_id != v.id()) throw Error(ErrorKind::InvalidStageMap, "gauge map names " + g->context_id);
      if (g->d.size() != v.size()) throw Error(ErrorKind::InvalidStageMap, "gauge map arity at " + v.id());
      for (double x : g->d)
        if (!std::isfinite(x)) throw Error(ErrorKind::InvalidStageMap, "gauge map at " + v.id() + " is not finite");
      // Reflections are bijective; check that they are involutions on a probe.
      std::vector<double> probe(v.size());
      for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = static_cast<double>(i) + 0.5;
      const auto back = g->apply(g->apply(probe));
      for (std::size_t i = 0; i < probe.size(); ++i)
        if (std::abs(back[i] - probe[i]) > 10 * tol.num * (1 + std::abs(g->d[i]))) r.involutive = false;
      ++r.gauge_maps;
    } else {
      const auto& f = std::get<StageAutomorphism>(maps[c]);
      if (f.context_id != v.id()) throw Error(ErrorKind::InvalidStageMap, "stage map names " + f.context_id);
      if (f.permutation.size() != v.size()) throw Error(ErrorKind::InvalidStageMap, "stage map arity at " + v.id());
      std::vector<char> hit(v.size(), 0);
      for (std::size_t j : f.permutation) {
        if (j >= v.size() || hit[j]) throw Error(ErrorKind::InvalidStageMap, "stage map at " + v.id() + " is not bijective");
        hit[j] = 1;
      }
      for (std::size_t i = 0; i < v.size(); ++i)
        if (f.permutation[f.permutation[i]] != i) r.involutive = false;
      ++r.permutations;
    }
  }
  return r;
}

}  // namespace daseinkit
