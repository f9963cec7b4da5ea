#include "daseinkit/sheaf.hpp"

#include <algorithm>
#include <cmath>

#include "daseinkit/daseinise.hpp"

namespace daseinkit {
namespace {

void require_same(const ClopenSubobject& s, const ClopenSubobject& t) {
  if (s.presheaf_ptr() != t.presheaf_ptr())
    throw Error(ErrorKind::PresheafMismatch, "subobjects live over different presheaves");
}

}  // namespace

std::size_t SpectralPresheaf::restrict(std::size_t hi, std::size_t lo, std::size_t atom) const {
  const auto& below = category_->below(hi);
  const auto it = std::lower_bound(below.begin(), below.end(), lo);
  if (it == below.end() || *it != lo)
    throw Error(ErrorKind::InvalidParameter, "restrict: contexts are not ordered");
  return maps_[hi][static_cast<std::size_t>(it - below.begin())].at(atom);
}

std::shared_ptr<const SpectralPresheaf> build_spectral_presheaf(std::shared_ptr<const ContextCategory> category,
                                                                const Tolerances& tol) {
  auto sigma = std::make_shared<SpectralPresheaf>();
  sigma->category_ = std::move(category);
  const ContextCategory& cat = *sigma->category_;
  const std::size_t n = cat.size();

  sigma->maps_.resize(n);
  for (std::size_t hi = 0; hi < n; ++hi) {
    const Context& fine = cat.context(hi);
    for (std::size_t lo : cat.below(hi)) {
      const Context& coarse = cat.context(lo);
      std::vector<std::size_t> map(fine.size());
      for (std::size_t a = 0; a < fine.size(); ++a) {
        std::size_t hits = 0;
        for (std::size_t b = 0; b < coarse.size(); ++b) {
          if (max_abs_diff(coarse.atom(b) * fine.atom(a), fine.atom(a)) <= tol.num) {
            map[a] = b;
            ++hits;
          }
        }
        if (hits != 1) {
          throw Error(ErrorKind::RestrictionAmbiguous,
                      "atom " + std::to_string(a) + " of " + fine.id() + " has " + std::to_string(hits) +
                          " images in " + coarse.id());
        }
      }
      if (lo == hi) {
        for (std::size_t a = 0; a < map.size(); ++a)
          if (map[a] != a) throw Error(ErrorKind::RestrictionAmbiguous, "identity restriction is not the identity");
      }
      sigma->maps_[hi].push_back(std::move(map));
    }
  }

  // Functoriality: hi -> lo equals hi -> mid -> lo for every lo <= mid <= hi.
  for (std::size_t hi = 0; hi < n; ++hi) {
    for (std::size_t mid : cat.below(hi)) {
      for (std::size_t lo : cat.below(mid)) {
        for (std::size_t a = 0; a < cat.context(hi).size(); ++a) {
          if (sigma->restrict(hi, lo, a) != sigma->restrict(mid, lo, sigma->restrict(hi, mid, a)))
            throw Error(ErrorKind::RestrictionAmbiguous, "restriction triangle does not commute");
        }
        ++sigma->triangles_;
      }
    }
  }
  return sigma;
}

ClopenSubobject::ClopenSubobject(std::shared_ptr<const SpectralPresheaf> sigma, bool full)
    : sigma_(std::move(sigma)) {
  const ContextCategory& cat = sigma_->category();
  sets_.resize(cat.size());
  for (std::size_t c = 0; c < cat.size(); ++c) sets_[c].assign(cat.context(c).size(), full ? 1 : 0);
}

std::vector<std::size_t> ClopenSubobject::members(std::size_t ctx) const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < sets_[ctx].size(); ++a)
    if (sets_[ctx][a]) out.push_back(a);
  return out;
}

bool ClopenSubobject::is_stable() const {
  const ContextCategory& cat = sigma_->category();
  for (std::size_t hi = 0; hi < cat.size(); ++hi)
    for (std::size_t a = 0; a < sets_[hi].size(); ++a) {
      if (!sets_[hi][a]) continue;
      for (std::size_t lo : cat.below(hi))
        if (!sets_[lo][sigma_->restrict(hi, lo, a)]) return false;
    }
  return true;
}

void ClopenSubobject::close_downward() {
  const ContextCategory& cat = sigma_->category();
  for (std::size_t hi = 0; hi < cat.size(); ++hi)
    for (std::size_t a = 0; a < sets_[hi].size(); ++a) {
      if (!sets_[hi][a]) continue;
      for (std::size_t lo : cat.below(hi)) sets_[lo][sigma_->restrict(hi, lo, a)] = 1;
    }
}

bool ClopenSubobject::operator==(const ClopenSubobject& other) const {
  return sigma_ == other.sigma_ && sets_ == other.sets_;
}

bool ClopenSubobject::operator<=(const ClopenSubobject& other) const {
  require_same(*this, other);
  for (std::size_t c = 0; c < sets_.size(); ++c)
    for (std::size_t a = 0; a < sets_[c].size(); ++a)
      if (sets_[c][a] && !other.sets_[c][a]) return false;
  return true;
}

ClopenSubobject total_subobject(std::shared_ptr<const SpectralPresheaf> sigma) {
  return ClopenSubobject(std::move(sigma), true);
}

ClopenSubobject empty_subobject(std::shared_ptr<const SpectralPresheaf> sigma) {
  return ClopenSubobject(std::move(sigma), false);
}

ClopenSubobject proposition_subobject(const ComplexMatrix& p, std::shared_ptr<const SpectralPresheaf> sigma,
                                      const Tolerances& tol) {
  ClopenSubobject s(sigma, false);
  const ContextCategory& cat = sigma->category();
  for (std::size_t c = 0; c < cat.size(); ++c) {
    const Context& v = cat.context(c);
    const ComplexMatrix outer = outer_projection(p, v, tol).matrix();
    for (std::size_t a = 0; a < v.size(); ++a)
      s.set(c, a, max_abs_diff(outer * v.atom(a), v.atom(a)) <= tol.num);
  }
  if (!s.is_stable())
    throw Error(ErrorKind::NumericalFailure, "proposition subobject is not stable under restriction");
  return s;
}

ClopenSubobject heyting_meet(const ClopenSubobject& s, const ClopenSubobject& t) {
  require_same(s, t);
  ClopenSubobject r = s;
  const ContextCategory& cat = s.presheaf().category();
  for (std::size_t c = 0; c < cat.size(); ++c)
    for (std::size_t a = 0; a < cat.context(c).size(); ++a) r.set(c, a, s.contains(c, a) && t.contains(c, a));
  return r;
}

ClopenSubobject heyting_join(const ClopenSubobject& s, const ClopenSubobject& t) {
  require_same(s, t);
  ClopenSubobject r = s;
  const ContextCategory& cat = s.presheaf().category();
  for (std::size_t c = 0; c < cat.size(); ++c)
    for (std::size_t a = 0; a < cat.context(c).size(); ++a) r.set(c, a, s.contains(c, a) || t.contains(c, a));
  return r;
}

ClopenSubobject heyting_implies(const ClopenSubobject& s, const ClopenSubobject& t) {
  require_same(s, t);
  const SpectralPresheaf& sigma = s.presheaf();
  const ContextCategory& cat = sigma.category();
  ClopenSubobject r(s.presheaf_ptr(), false);
  for (std::size_t hi = 0; hi < cat.size(); ++hi) {
    for (std::size_t a = 0; a < cat.context(hi).size(); ++a) {
      bool holds = true;
      for (std::size_t lo : cat.below(hi)) {
        const std::size_t q = sigma.restrict(hi, lo, a);
        if (s.contains(lo, q) && !t.contains(lo, q)) {
          holds = false;
          break;
        }
      }
      r.set(hi, a, holds);
    }
  }
  return r;
}

ClopenSubobject heyting_not(const ClopenSubobject& s) {
  return heyting_implies(s, empty_subobject(s.presheaf_ptr()));
}

ClopenSubobject random_clopen(std::shared_ptr<const SpectralPresheaf> sigma, std::mt19937_64& rng, double density) {
  ClopenSubobject s(sigma, false);
  std::bernoulli_distribution pick(density);
  const ContextCategory& cat = sigma->category();
  for (std::size_t c = 0; c < cat.size(); ++c)
    for (std::size_t a = 0; a < cat.context(c).size(); ++a) s.set(c, a, pick(rng));
  s.close_downward();
  return s;
}

bool is_sieve(const Sieve& s, const ContextCategory& cat) {
  for (std::size_t m : s.members) {
    if (!cat.leq(m, s.root)) return false;
    for (std::size_t lower : cat.below(m))
      if (!std::binary_search(s.members.begin(), s.members.end(), lower)) return false;
  }
  return true;
}

std::vector<Sieve> truth_value(const ComplexMatrix& p, std::span<const cplx> psi, const SpectralPresheaf& sigma,
                               const Tolerances& tol) {
  const ContextCategory& cat = sigma.category();
  if (psi.size() != cat.dim()) throw Error(ErrorKind::DimMismatch, "truth_value: state dimension");
  double norm2 = 0.0;
  for (const cplx& z : psi) norm2 += std::norm(z);
  if (std::abs(norm2 - 1.0) > tol.num) throw Error(ErrorKind::NotUnitVector, "state is not normalised");

  std::vector<char> true_at(cat.size());
  for (std::size_t c = 0; c < cat.size(); ++c) {
    const ComplexMatrix outer = outer_projection(p, cat.context(c), tol).matrix();
    cplx expectation{};
    for (std::size_t i = 0; i < psi.size(); ++i)
      for (std::size_t j = 0; j < psi.size(); ++j) expectation += std::conj(psi[i]) * outer(i, j) * psi[j];
    true_at[c] = expectation.real() >= 1.0 - tol.num;
  }

  std::vector<Sieve> out;
  for (std::size_t root = 0; root < cat.size(); ++root) {
    Sieve s{root, {}};
    for (std::size_t lo : cat.below(root))
      if (true_at[lo]) s.members.push_back(lo);
    if (!is_sieve(s, cat))
      throw Error(ErrorKind::NumericalFailure, "truth value at " + cat.context(root).id() + " is not a sieve");
    out.push_back(std::move(s));
  }
  return out;
}

std::optional<ExcludedMiddleWitness> find_excluded_middle_failure(std::shared_ptr<const SpectralPresheaf> sigma,
                                                                  const Tolerances& tol) {
  const ContextCategory& cat = sigma->category();
  const ClopenSubobject total = total_subobject(sigma);
  for (std::size_t c = 0; c < cat.size(); ++c) {
    const Context& v = cat.context(c);
    for (std::size_t a = 0; a < v.size(); ++a) {
      ClopenSubobject s = proposition_subobject(v.atom(a), sigma, tol);
      const ClopenSubobject lem = heyting_join(s, heyting_not(s));
      if (lem == total) continue;
      std::vector<std::size_t> failing;
      for (std::size_t k = 0; k < cat.size(); ++k)
        if (lem.members(k).size() != cat.context(k).size()) failing.push_back(k);
      return ExcludedMiddleWitness{"atom " + std::to_string(a) + " of " + v.id(), std::move(s), std::move(failing)};
    }
  }
  return std::nullopt;
}

}  // namespace daseinkit
