#include "daseinkit/contexts.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <tuple>

#include <Eigen/Dense>

#include "daseinkit/hash.hpp"
#include "daseinkit/kernels.hpp"

namespace daseinkit {
namespace {

// Entries rounded to 8 decimals; the canonical ordering and the ids are
// computed from these so that benign noise does not change them.
std::vector<long long> rounded_entries(const ComplexMatrix& m) {
  std::vector<long long> out;
  out.reserve(2 * m.size());
  for (const cplx& z : m.data()) {
    out.push_back(std::llround(z.real() * 1e8));
    out.push_back(std::llround(z.imag() * 1e8));
  }
  return out;
}

std::string key_fragment(const std::vector<long long>& r) {
  std::string s;
  for (long long v : r) {
    s += std::to_string(v);
    s += ',';
  }
  return s;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// tr(A B) for Hermitian A.
cplx trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  return kernels::active().dot(a.data().data(), b.data().data(), a.size());
}

}  // namespace

Context Context::from_atoms(std::vector<ComplexMatrix> atoms, const Tolerances& tol,
                            std::string label) {
  if (atoms.empty()) throw Error(ErrorKind::InvalidParameter, "context needs at least one atom");
  const std::size_t dim = atoms.front().dim();
  ComplexMatrix sum(dim);
  for (const ComplexMatrix& q : atoms) {
    if (q.dim() != dim) throw Error(ErrorKind::DimMismatch, "context atoms differ in dimension");
    if (!is_projection(q, tol.num)) throw Error(ErrorKind::NotProjection, "context atom is not a projection");
    if (q.max_abs() <= tol.num) throw Error(ErrorKind::InvalidParameter, "context atom is zero");
    sum += q;
  }
  if (max_abs_diff(sum, ComplexMatrix::identity(dim)) > tol.num)
    throw Error(ErrorKind::InvalidParameter, "context atoms do not sum to the identity");
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      if ((atoms[i] * atoms[j]).max_abs() > tol.num)
        throw Error(ErrorKind::InvalidParameter, "context atoms are not orthogonal");

  struct Keyed {
    std::size_t rank;
    std::vector<long long> rounded;
    ComplexMatrix atom;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(atoms.size());
  for (ComplexMatrix& q : atoms) {
    const std::size_t r = projection_rank(q);
    keyed.push_back({r, rounded_entries(q), std::move(q)});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.rank != b.rank) return a.rank > b.rank;
    return a.rounded < b.rounded;
  });

  Context ctx;
  ctx.key_ = "dim=" + std::to_string(dim) + ";";
  for (Keyed& k : keyed) {
    ctx.key_ += "r" + std::to_string(k.rank) + ":" + key_fragment(k.rounded) + ";";
    ctx.ranks_.push_back(k.rank);
    ctx.atoms_.push_back(std::move(k.atom));
  }
  ctx.id_ = "ctx-" + sha256_hex(ctx.key_).substr(0, 12);
  ctx.label_ = std::move(label);
  return ctx;
}

ComplexMatrix Context::element(std::span<const double> values) const {
  if (values.size() != atoms_.size())
    throw Error(ErrorKind::DimMismatch, "element: expected one value per atom");
  ComplexMatrix m(dim());
  for (std::size_t i = 0; i < atoms_.size(); ++i) m.add_scaled(values[i], atoms_[i]);
  return m;
}

std::vector<cplx> Context::coefficients(const ComplexMatrix& m) const {
  if (m.dim() != dim()) throw Error(ErrorKind::DimMismatch, "coefficients: dimension");
  std::vector<cplx> out;
  out.reserve(atoms_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    out.push_back(trace_product(atoms_[i], m) / static_cast<double>(ranks_[i]));
  return out;
}

Context trivial_context(std::size_t dim, const Tolerances& tol) {
  return Context::from_atoms({ComplexMatrix::identity(dim)}, tol, "trivial");
}

Context context_from_operator(const HermitianOperator& a, const Tolerances& tol) {
  SpectralDecomposition dec = eigendecompose(a, tol);
  std::vector<ComplexMatrix> atoms;
  atoms.reserve(dec.projections.size());
  for (const HermitianOperator& p : dec.projections) atoms.push_back(p.matrix());
  return Context::from_atoms(std::move(atoms), tol, a.label());
}

bool is_leq(const Context& v1, const Context& v2, const Tolerances& tol) {
  if (v1.dim() != v2.dim()) throw Error(ErrorKind::DimMismatch, "is_leq: ambient dimension");
  if (v1.size() > v2.size()) return false;
  for (const ComplexMatrix& coarse : v1.atoms()) {
    ComplexMatrix sum(v1.dim());
    for (const ComplexMatrix& fine : v2.atoms())
      if (max_abs_diff(coarse * fine, fine) <= tol.num) sum += fine;
    if (max_abs_diff(sum, coarse) > tol.num) return false;
  }
  return true;
}

Context intersect(const Context& v1, const Context& v2, const Tolerances& tol,
                  const IntersectOptions& opts) {
  if (v1.dim() != v2.dim()) throw Error(ErrorKind::DimMismatch, "intersect: ambient dimension");
  if (is_leq(v1, v2, tol)) return v1;
  if (is_leq(v2, v1, tol)) return v2;

  const auto k1 = static_cast<Eigen::Index>(v1.size());
  const auto k2 = static_cast<Eigen::Index>(v2.size());

  // Gram matrix between the Hilbert-Schmidt-orthonormal bases Q_i/sqrt(r_i)
  // of the two algebras. Singular values equal to one mark the shared
  // directions; the left singular vectors give them in V1's atom coordinates.
  Eigen::MatrixXd gram(k1, k2);
  for (Eigen::Index i = 0; i < k1; ++i)
    for (Eigen::Index j = 0; j < k2; ++j)
      gram(i, j) = trace_product(v1.atom(i), v2.atom(j)).real() /
                   std::sqrt(static_cast<double>(v1.rank(i) * v2.rank(j)));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram, Eigen::ComputeFullU);
  const Eigen::VectorXd& sigma = svd.singularValues();
  Eigen::Index shared = 0;
  while (shared < sigma.size() && sigma(shared) >= 1.0 - tol.group) ++shared;
  if (shared == 0)
    throw Error(ErrorKind::DegenerateIntersection, "no shared direction (the identity is always shared)");

  const std::string label = "(" + v1.label() + "&" + v2.label() + ")";
  std::mt19937_64 rng(opts.seed ^ fnv1a(v1.id() + "|" + v2.id()));
  std::uniform_real_distribution<double> coef(-1.0, 1.0);

  for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
    // A generic Hermitian element of the intersection, as values on V1's
    // atoms. Its level sets are the atoms of V1 ∩ V2.
    Eigen::VectorXd c(shared);
    for (Eigen::Index l = 0; l < shared; ++l) c(l) = coef(rng);
    Eigen::VectorXd values = svd.matrixU().leftCols(shared) * c;
    for (Eigen::Index i = 0; i < k1; ++i) values(i) /= std::sqrt(static_cast<double>(v1.rank(i)));

    std::vector<std::size_t> order(static_cast<std::size_t>(k1));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values(a) < values(b); });
    const double gap = tol.group * (values.maxCoeff() - values.minCoeff() + 1.0);

    std::vector<ComplexMatrix> atoms;
    ComplexMatrix block = v1.atom(order[0]);
    for (std::size_t n = 1; n < order.size(); ++n) {
      if (values(order[n]) - values(order[n - 1]) > gap) {
        atoms.push_back(std::move(block));
        block = v1.atom(order[n]);
      } else {
        block += v1.atom(order[n]);
      }
    }
    atoms.push_back(std::move(block));
    if (static_cast<Eigen::Index>(atoms.size()) != shared) continue;  // eigenvalue collision

    Context candidate = Context::from_atoms(std::move(atoms), tol, label);
    if (is_leq(candidate, v2, tol)) return candidate;
  }
  throw Error(ErrorKind::DegenerateIntersection,
              "could not recover atoms of " + v1.id() + " ∩ " + v2.id());
}

std::vector<Context> coarsenings(const Context& v, const Tolerances& tol) {
  const std::size_t k = v.size();
  std::vector<Context> out;
  // Restricted growth strings enumerate the set partitions of the atoms.
  std::vector<std::size_t> rgs(k, 0);
  auto next = [&]() {
    for (std::size_t i = k; i-- > 1;) {
      const std::size_t prefix_max = *std::max_element(rgs.begin(), rgs.begin() + static_cast<std::ptrdiff_t>(i));
      if (rgs[i] <= prefix_max) {
        ++rgs[i];
        std::fill(rgs.begin() + static_cast<std::ptrdiff_t>(i) + 1, rgs.end(), 0);
        return true;
      }
    }
    return false;
  };
  do {
    const std::size_t blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
    std::vector<ComplexMatrix> atoms(blocks, ComplexMatrix(v.dim()));
    std::string tag;
    for (std::size_t i = 0; i < k; ++i) {
      atoms[rgs[i]] += v.atom(i);
      tag += std::to_string(rgs[i]);
    }
    out.push_back(Context::from_atoms(std::move(atoms), tol, v.label() + "/" + tag));
  } while (next());
  return out;
}

ContextCategory::ContextCategory(std::vector<Context> contexts, std::vector<std::string> generators,
                                 const Tolerances& tol)
    : generators_(std::move(generators)) {
  std::map<std::string, Context> unique;
  for (Context& c : contexts) unique.try_emplace(c.canonical_key(), std::move(c));
  for (auto& [key, c] : unique) contexts_.push_back(std::move(c));
  if (contexts_.empty()) throw Error(ErrorKind::InvalidParameter, "empty context category");
  std::sort(contexts_.begin(), contexts_.end(),
            [](const Context& a, const Context& b) { return a.id() < b.id(); });

  const std::size_t n = contexts_.size();
  const auto trivial = std::find_if(contexts_.begin(), contexts_.end(),
                                    [](const Context& c) { return c.is_trivial(); });
  if (trivial == contexts_.end())
    throw Error(ErrorKind::InvalidParameter, "context category must contain the trivial context");
  trivial_ = static_cast<std::size_t>(trivial - contexts_.begin());

  leq_.assign(n * n, 0);
  below_.assign(n, {});
  for (std::size_t lo = 0; lo < n; ++lo)
    for (std::size_t hi = 0; hi < n; ++hi)
      if (lo == hi || is_leq(contexts_[lo], contexts_[hi], tol)) leq_[lo * n + hi] = 1;
  for (std::size_t hi = 0; hi < n; ++hi)
    for (std::size_t lo = 0; lo < n; ++lo)
      if (leq(lo, hi)) below_[hi].push_back(lo);
}

std::optional<std::size_t> ContextCategory::index_of(const std::string& id) const {
  const auto it = std::lower_bound(contexts_.begin(), contexts_.end(), id,
                                   [](const Context& c, const std::string& key) { return c.id() < key; });
  if (it == contexts_.end() || it->id() != id) return std::nullopt;
  return static_cast<std::size_t>(it - contexts_.begin());
}

std::vector<std::pair<std::size_t, std::size_t>> ContextCategory::strict_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t hi = 0; hi < size(); ++hi)
    for (std::size_t lo : below_[hi])
      if (lo != hi) out.emplace_back(lo, hi);
  return out;
}

std::vector<std::size_t> ContextCategory::maximal() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    bool top = true;
    for (std::size_t j = 0; j < size() && top; ++j)
      if (j != i && leq(i, j)) top = false;
    if (top) out.push_back(i);
  }
  return out;
}

ContextCategory build_category(std::span<const HermitianOperator> ops, const CategoryOptions& opts,
                               const Tolerances& tol) {
  if (ops.empty()) throw Error(ErrorKind::InvalidParameter, "build_category: no operators");
  const std::size_t dim = ops.front().dim();
  std::vector<std::string> generators;
  for (const HermitianOperator& op : ops) {
    if (op.dim() != dim) throw Error(ErrorKind::DimMismatch, "build_category: operators differ in dimension");
    generators.push_back(op.label());
  }

  std::vector<Context> found;
  std::map<std::string, std::size_t> seen;
  auto add = [&](Context c) {
    if (seen.contains(c.canonical_key())) return;
    if (found.size() >= opts.max_contexts)
      throw Error(ErrorKind::SizeLimitExceeded,
                  "context category exceeds max_contexts=" + std::to_string(opts.max_contexts));
    seen.emplace(c.canonical_key(), found.size());
    found.push_back(std::move(c));
  };
  auto add_with_coarsenings = [&](Context c) {
    if (opts.full_subcontexts && !seen.contains(c.canonical_key())) {
      for (Context& sub : coarsenings(c, tol)) add(std::move(sub));
    }
    add(std::move(c));
  };

  for (const HermitianOperator& op : ops) add_with_coarsenings(context_from_operator(op, tol));
  add(trivial_context(dim, tol));

  const IntersectOptions iopts{opts.max_retries, opts.seed};
  for (std::size_t i = 0; i < found.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (is_leq(found[i], found[j], tol) || is_leq(found[j], found[i], tol)) continue;
      add_with_coarsenings(intersect(found[j], found[i], tol, iopts));
    }
  }
  return ContextCategory(std::move(found), std::move(generators), tol);
}

}  // namespace daseinkit
