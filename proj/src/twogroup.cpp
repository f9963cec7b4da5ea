#include "daseinkit/twogroup.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <tuple>

#include "daseinkit/error.hpp"

namespace daseinkit {
namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidParameter, what); }

}  // namespace

FiniteCategory::FiniteCategory(std::vector<std::string> objects, std::vector<Morphism> morphisms,
                               std::vector<std::size_t> identities, std::vector<std::vector<std::size_t>> compose)
    : objects_(std::move(objects)),
      morphisms_(std::move(morphisms)),
      identities_(std::move(identities)),
      compose_(std::move(compose)) {
  const std::size_t n = objects_.size(), m = morphisms_.size();
  if (n == 0) invalid("category has no objects");
  if (identities_.size() != n) invalid("one identity per object required");
  if (compose_.size() != m) invalid("composition table has wrong size");
  for (const auto& row : compose_)
    if (row.size() != m) invalid("composition table has wrong size");
  for (const auto& f : morphisms_)
    if (f.src >= n || f.dst >= n) invalid("morphism '" + f.id + "' has an unknown endpoint");

  hom_.assign(n * n, {});
  for (std::size_t f = 0; f < m; ++f) hom_[morphisms_[f].src * n + morphisms_[f].dst].push_back(f);

  for (std::size_t g = 0; g < m; ++g)
    for (std::size_t f = 0; f < m; ++f) {
      const std::size_t h = compose_[g][f];
      if (morphisms_[f].dst != morphisms_[g].src) {
        if (h != kNoMorphism) invalid("composite defined for non-composable pair");
        continue;
      }
      if (h >= m) invalid("composite of '" + morphisms_[g].id + "' and '" + morphisms_[f].id + "' is missing");
      if (morphisms_[h].src != morphisms_[f].src || morphisms_[h].dst != morphisms_[g].dst)
        invalid("composite of '" + morphisms_[g].id + "' and '" + morphisms_[f].id + "' has wrong endpoints");
    }
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t id = identities_[x];
    if (id >= m || morphisms_[id].src != x || morphisms_[id].dst != x) invalid("bad identity for " + objects_[x]);
  }
  for (std::size_t f = 0; f < m; ++f) {
    if (compose_[identities_[morphisms_[f].dst]][f] != f || compose_[f][identities_[morphisms_[f].src]] != f)
      invalid("identity law fails at '" + morphisms_[f].id + "'");
  }
  for (std::size_t f = 0; f < m; ++f)
    for (std::size_t g = 0; g < m; ++g) {
      if (morphisms_[f].dst != morphisms_[g].src) continue;
      for (std::size_t h = 0; h < m; ++h) {
        if (morphisms_[g].dst != morphisms_[h].src) continue;
        if (compose_[h][compose_[g][f]] != compose_[compose_[h][g]][f])
          invalid("composition is not associative");
      }
    }
}

FiniteCategory FiniteCategory::from_poset(std::vector<std::string> objects, const std::vector<std::vector<bool>>& leq) {
  const std::size_t n = objects.size();
  std::vector<Morphism> mors;
  std::vector<std::size_t> ids(n);
  std::vector<std::size_t> arrow(n * n, kNoMorphism);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (!leq[a][b]) continue;
      arrow[a * n + b] = mors.size();
      if (a == b) ids[a] = mors.size();
      mors.push_back({a == b ? "id_" + objects[a] : objects[a] + "<=" + objects[b], a, b});
    }
  std::vector<std::vector<std::size_t>> comp(mors.size(), std::vector<std::size_t>(mors.size(), kNoMorphism));
  for (std::size_t g = 0; g < mors.size(); ++g)
    for (std::size_t f = 0; f < mors.size(); ++f)
      if (mors[f].dst == mors[g].src) comp[g][f] = arrow[mors[f].src * n + mors[g].dst];
  return FiniteCategory(std::move(objects), std::move(mors), std::move(ids), std::move(comp));
}

FiniteCategory FiniteCategory::from_poset(const ContextCategory& cat) {
  std::vector<std::string> names;
  std::vector<std::vector<bool>> leq(cat.size(), std::vector<bool>(cat.size()));
  for (std::size_t i = 0; i < cat.size(); ++i) {
    names.push_back(cat.context(i).id());
    for (std::size_t j = 0; j < cat.size(); ++j) leq[i][j] = cat.leq(i, j);
  }
  return from_poset(std::move(names), leq);
}

FiniteCategory FiniteCategory::discrete(std::size_t n) {
  std::vector<std::string> names;
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back("o" + std::to_string(i));
    leq[i][i] = true;
  }
  return from_poset(std::move(names), leq);
}

FiniteCategory one_object_category(const FiniteGroup& g) {
  std::vector<Morphism> mors;
  std::vector<std::vector<std::size_t>> comp(g.order(), std::vector<std::size_t>(g.order()));
  for (std::size_t a = 0; a < g.order(); ++a) {
    mors.push_back({g.element(a), 0, 0});
    for (std::size_t b = 0; b < g.order(); ++b) comp[a][b] = g.mul(a, b);
  }
  return FiniteCategory({"*"}, std::move(mors), {g.identity()}, std::move(comp));
}

std::optional<std::size_t> FiniteCategory::inverse(std::size_t f) const {
  const auto& mf = morphisms_.at(f);
  for (std::size_t g : hom(mf.dst, mf.src))
    if (compose_[g][f] == identities_[mf.src] && compose_[f][g] == identities_[mf.dst]) return g;
  return std::nullopt;
}

Functor identity_functor(const FiniteCategory& c) {
  Functor f;
  f.objects.resize(c.objects());
  f.morphisms.resize(c.morphisms());
  std::iota(f.objects.begin(), f.objects.end(), 0);
  std::iota(f.morphisms.begin(), f.morphisms.end(), 0);
  return f;
}

Functor compose_functors(const Functor& g, const Functor& f) {
  Functor h;
  for (std::size_t x : f.objects) h.objects.push_back(g.objects.at(x));
  for (std::size_t m : f.morphisms) h.morphisms.push_back(g.morphisms.at(m));
  return h;
}

bool is_automorphism(const FiniteCategory& c, const Functor& f) {
  if (f.objects.size() != c.objects() || f.morphisms.size() != c.morphisms()) return false;
  std::vector<char> seen_o(c.objects()), seen_m(c.morphisms());
  for (std::size_t x : f.objects) {
    if (x >= c.objects() || seen_o[x]) return false;
    seen_o[x] = 1;
  }
  for (std::size_t m : f.morphisms) {
    if (m >= c.morphisms() || seen_m[m]) return false;
    seen_m[m] = 1;
  }
  for (std::size_t m = 0; m < c.morphisms(); ++m) {
    const auto& mm = c.morphism(m);
    const auto& im = c.morphism(f.morphisms[m]);
    if (im.src != f.objects[mm.src] || im.dst != f.objects[mm.dst]) return false;
  }
  for (std::size_t x = 0; x < c.objects(); ++x)
    if (f.morphisms[c.identity(x)] != c.identity(f.objects[x])) return false;
  for (std::size_t g = 0; g < c.morphisms(); ++g)
    for (std::size_t h = 0; h < c.morphisms(); ++h) {
      const std::size_t gh = c.compose(g, h);
      if (gh != kNoMorphism && f.morphisms[gh] != c.compose(f.morphisms[g], f.morphisms[h])) return false;
    }
  return true;
}

bool is_natural_isomorphism(const FiniteCategory& c, const TwoCell& t) {
  if (t.components.size() != c.objects()) return false;
  for (std::size_t x = 0; x < c.objects(); ++x) {
    const std::size_t a = t.components[x];
    if (a >= c.morphisms()) return false;
    if (c.morphism(a).src != t.source.objects[x] || c.morphism(a).dst != t.target.objects[x]) return false;
    if (!c.inverse(a)) return false;
  }
  for (std::size_t f = 0; f < c.morphisms(); ++f) {
    const auto& m = c.morphism(f);
    if (c.compose(t.target.morphisms[f], t.components[m.src]) != c.compose(t.components[m.dst], t.source.morphisms[f]))
      return false;
  }
  return true;
}

TwoCell identity_cell(const FiniteCategory& c, const Functor& f) {
  TwoCell t{f, f, {}};
  for (std::size_t x = 0; x < c.objects(); ++x) t.components.push_back(c.identity(f.objects[x]));
  return t;
}

AutTwoGroup aut_2group(const FiniteCategory& c, std::size_t limit) {
  const std::size_t n = c.objects(), m = c.morphisms();
  if (n > limit) throw Error(ErrorKind::SizeLimitExceeded, "category has " + std::to_string(n) + " objects (limit " + std::to_string(limit) + ")");
  if (m > 64) throw Error(ErrorKind::SizeLimitExceeded, "category has " + std::to_string(m) + " morphisms (limit 64)");

  // Composition triples (g, f, g o f), grouped by the largest index involved
  // so each is checked as soon as all three images are known.
  std::vector<std::vector<std::array<std::size_t, 3>>> triples(m);
  for (std::size_t g = 0; g < m; ++g)
    for (std::size_t f = 0; f < m; ++f) {
      const std::size_t h = c.compose(g, f);
      if (h != kNoMorphism) triples[std::max({g, f, h})].push_back({g, f, h});
    }

  AutTwoGroup out;
  Functor cur;
  cur.objects.assign(n, 0);
  cur.morphisms.assign(m, kNoMorphism);
  std::vector<char> used_o(n), used_m(m);

  std::function<void(std::size_t)> assign_morphism = [&](std::size_t k) {
    if (k == m) {
      out.automorphisms.push_back(cur);
      return;
    }
    const auto& mk = c.morphism(k);
    auto consistent = [&] {
      for (const auto& [g, f, h] : triples[k])
        if (cur.morphisms[h] != c.compose(cur.morphisms[g], cur.morphisms[f])) return false;
      return true;
    };
    if (k == c.identity(mk.src)) {
      const std::size_t img = c.identity(cur.objects[mk.src]);
      if (used_m[img]) return;
      cur.morphisms[k] = img;
      used_m[img] = 1;
      if (consistent()) assign_morphism(k + 1);
      used_m[img] = 0;
      cur.morphisms[k] = kNoMorphism;
      return;
    }
    for (std::size_t img : c.hom(cur.objects[mk.src], cur.objects[mk.dst])) {
      if (used_m[img]) continue;
      bool is_id = false;
      for (std::size_t x = 0; x < n; ++x) is_id = is_id || c.identity(x) == img;
      if (is_id) continue;
      cur.morphisms[k] = img;
      used_m[img] = 1;
      if (consistent()) assign_morphism(k + 1);
      used_m[img] = 0;
      cur.morphisms[k] = kNoMorphism;
    }
  };

  std::function<void(std::size_t)> assign_object = [&](std::size_t x) {
    if (x == n) {
      assign_morphism(0);
      return;
    }
    for (std::size_t y = 0; y < n; ++y) {
      if (used_o[y]) continue;
      cur.objects[x] = y;
      bool ok = true;
      for (std::size_t a = 0; a <= x && ok; ++a) {
        ok = c.hom(a, x).size() == c.hom(cur.objects[a], y).size() &&
             c.hom(x, a).size() == c.hom(y, cur.objects[a]).size();
      }
      if (!ok) continue;
      used_o[y] = 1;
      assign_object(x + 1);
      used_o[y] = 0;
    }
  };
  assign_object(0);

  // Natural isomorphisms between every ordered pair of automorphisms.
  std::vector<std::vector<std::size_t>> arrows_from(n);  // morphisms grouped by the larger endpoint
  for (std::size_t f = 0; f < m; ++f) arrows_from[std::max(c.morphism(f).src, c.morphism(f).dst)].push_back(f);
  for (const Functor& src : out.automorphisms) {
    for (const Functor& dst : out.automorphisms) {
      TwoCell t{src, dst, std::vector<std::size_t>(n, kNoMorphism)};
      std::function<void(std::size_t)> assign = [&](std::size_t x) {
        if (x == n) {
          out.two_cells.push_back(t);
          return;
        }
        for (std::size_t a : c.hom(src.objects[x], dst.objects[x])) {
          if (!c.inverse(a)) continue;
          t.components[x] = a;
          bool ok = true;
          for (std::size_t f : arrows_from[x]) {
            const auto& mf = c.morphism(f);
            if (c.compose(dst.morphisms[f], t.components[mf.src]) != c.compose(t.components[mf.dst], src.morphisms[f])) {
              ok = false;
              break;
            }
          }
          if (ok) assign(x + 1);
        }
        t.components[x] = kNoMorphism;
      };
      assign(0);
    }
  }
  return out;
}

TwoCell compose_vertical(const FiniteCategory& c, const TwoCell& alpha, const TwoCell& beta) {
  if (!(alpha.target == beta.source)) throw Error(ErrorKind::NotComposable, "vertical composite: target of the first cell is not the source of the second");
  if (alpha.components.size() != c.objects() || beta.components.size() != c.objects())
    throw Error(ErrorKind::NotComposable, "2-cell over a different category");
  TwoCell t{alpha.source, beta.target, {}};
  for (std::size_t x = 0; x < c.objects(); ++x) t.components.push_back(c.compose(beta.components[x], alpha.components[x]));
  return t;
}

TwoCell compose_horizontal(const FiniteCategory& c, const TwoCell& alpha, const TwoCell& beta) {
  if (alpha.components.size() != c.objects() || beta.components.size() != c.objects() ||
      alpha.source.objects.size() != c.objects() || beta.source.objects.size() != c.objects())
    throw Error(ErrorKind::NotComposable, "2-cell over a different category");
  TwoCell t{compose_functors(beta.source, alpha.source), compose_functors(beta.target, alpha.target), {}};
  for (std::size_t x = 0; x < c.objects(); ++x) {
    // beta_{G x} o H(alpha_x)
    t.components.push_back(
        c.compose(beta.components[alpha.target.objects[x]], beta.source.morphisms[alpha.components[x]]));
  }
  return t;
}

bool check_interchange(const FiniteCategory& c, const TwoCell& alpha, const TwoCell& beta, const TwoCell& gamma,
                       const TwoCell& delta) {
  const TwoCell lhs = compose_horizontal(c, compose_vertical(c, alpha, beta), compose_vertical(c, gamma, delta));
  const TwoCell rhs = compose_vertical(c, compose_horizontal(c, alpha, gamma), compose_horizontal(c, beta, delta));
  return lhs.source == rhs.source && lhs.target == rhs.target && lhs.components == rhs.components;
}

InterchangeSummary check_interchange_exhaustive(const FiniteCategory& c, const AutTwoGroup& aut) {
  // Index every cell, then tabulate composites so the quadruple loop is
  // integer lookups. A composite outside the enumerated set counts as a failure.
  using Key = std::tuple<std::vector<std::size_t>, std::vector<std::size_t>, std::vector<std::size_t>,
                         std::vector<std::size_t>, std::vector<std::size_t>>;
  auto key_of = [](const TwoCell& t) {
    return Key{t.source.objects, t.source.morphisms, t.target.objects, t.target.morphisms, t.components};
  };
  const auto& cells = aut.two_cells;
  const std::size_t k = cells.size();
  std::map<Key, std::size_t> index;
  for (std::size_t i = 0; i < k; ++i) index.emplace(key_of(cells[i]), i);
  auto lookup = [&](const TwoCell& t) {
    const auto it = index.find(key_of(t));
    return it == index.end() ? kNoMorphism : it->second;
  };

  std::vector<std::size_t> horiz(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) horiz[i * k + j] = lookup(compose_horizontal(c, cells[i], cells[j]));
  std::vector<std::size_t> vert(k * k, kNoMorphism);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (cells[i].target == cells[j].source) {
        vert[i * k + j] = lookup(compose_vertical(c, cells[i], cells[j]));
        pairs.emplace_back(i, j);
      }

  InterchangeSummary s;
  for (const auto& [a, b] : pairs)
    for (const auto& [g, d] : pairs) {
      ++s.quadruples;
      const std::size_t ab = vert[a * k + b], gd = vert[g * k + d];
      const std::size_t ag = horiz[a * k + g], bd = horiz[b * k + d];
      if (ab == kNoMorphism || gd == kNoMorphism || ag == kNoMorphism || bd == kNoMorphism) {
        ++s.failures;
        continue;
      }
      const std::size_t lhs = horiz[ab * k + gd];
      const std::size_t rhs = vert[ag * k + bd];
      if (lhs == kNoMorphism || lhs != rhs) ++s.failures;
    }
  return s;
}

FiniteGroup::FiniteGroup(std::string name, std::vector<std::string> elements, std::vector<std::vector<std::size_t>> table)
    : name_(std::move(name)), elements_(std::move(elements)), table_(std::move(table)) {
  const std::size_t n = elements_.size();
  if (n == 0) invalid("group has no elements");
  if (table_.size() != n) invalid("multiplication table has wrong size");
  for (const auto& row : table_) {
    if (row.size() != n) invalid("multiplication table has wrong size");
    for (std::size_t x : row)
      if (x >= n) invalid("multiplication table is not closed");
  }
  std::optional<std::size_t> e;
  for (std::size_t i = 0; i < n && !e; ++i) {
    bool unit = true;
    for (std::size_t x = 0; x < n && unit; ++x) unit = table_[i][x] == x && table_[x][i] == x;
    if (unit) e = i;
  }
  if (!e) invalid("group has no identity");
  identity_ = *e;
  for (std::size_t a = 0; a < n; ++a) {
    bool has = false;
    for (std::size_t b = 0; b < n && !has; ++b) has = table_[a][b] == identity_ && table_[b][a] == identity_;
    if (!has) invalid("element '" + elements_[a] + "' has no inverse");
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        if (table_[table_[a][b]][c] != table_[a][table_[b][c]]) invalid("multiplication is not associative");
}

bool FiniteGroup::is_abelian() const {
  for (std::size_t a = 0; a < order(); ++a)
    for (std::size_t b = 0; b < a; ++b)
      if (table_[a][b] != table_[b][a]) return false;
  return true;
}

FiniteGroup cyclic_product(const std::vector<std::size_t>& moduli) {
  std::size_t n = 1;
  for (std::size_t q : moduli) n *= q;
  auto digits = [&](std::size_t i) {
    std::vector<std::size_t> d;
    for (std::size_t q : moduli) {
      d.push_back(i % q);
      i /= q;
    }
    return d;
  };
  auto encode = [&](const std::vector<std::size_t>& d) {
    std::size_t i = 0, scale = 1;
    for (std::size_t k = 0; k < moduli.size(); ++k) {
      i += d[k] * scale;
      scale *= moduli[k];
    }
    return i;
  };
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> table(n, std::vector<std::size_t>(n));
  for (std::size_t a = 0; a < n; ++a) {
    const auto da = digits(a);
    std::string s = "(";
    for (std::size_t k = 0; k < da.size(); ++k) s += (k ? "," : "") + std::to_string(da[k]);
    names.push_back(s + ")");
    for (std::size_t b = 0; b < n; ++b) {
      auto db = digits(b);
      for (std::size_t k = 0; k < db.size(); ++k) db[k] = (da[k] + db[k]) % moduli[k];
      table[a][b] = encode(db);
    }
  }
  std::string name;
  for (std::size_t k = 0; k < moduli.size(); ++k) name += (k ? "xZ" : "Z") + std::to_string(moduli[k]);
  return FiniteGroup(name, std::move(names), std::move(table));
}

FiniteGroup dihedral(std::size_t n) {
  // r^i s^j, i < n, j < 2, with s r = r^-1 s.
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> table(2 * n, std::vector<std::size_t>(2 * n));
  for (std::size_t a = 0; a < 2 * n; ++a) {
    const std::size_t i1 = a % n, j1 = a / n;
    names.push_back("r" + std::to_string(i1) + (j1 ? "s" : ""));
    for (std::size_t b = 0; b < 2 * n; ++b) {
      const std::size_t i2 = b % n, j2 = b / n;
      const std::size_t i = j1 ? (i1 + n - i2) % n : (i1 + i2) % n;
      table[a][b] = i + n * (j1 ^ j2);
    }
  }
  return FiniteGroup("D" + std::to_string(n), std::move(names), std::move(table));
}

FiniteGroup dicyclic(std::size_t n) {
  // a^i x^j, i < 2n, j < 2, with x a = a^-1 x and x^2 = a^n.
  const std::size_t m = 2 * n;
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> table(2 * m, std::vector<std::size_t>(2 * m));
  for (std::size_t a = 0; a < 2 * m; ++a) {
    const std::size_t i1 = a % m, j1 = a / m;
    names.push_back("a" + std::to_string(i1) + (j1 ? "x" : ""));
    for (std::size_t b = 0; b < 2 * m; ++b) {
      const std::size_t i2 = b % m, j2 = b / m;
      std::size_t i, j;
      if (!j1) {
        i = (i1 + i2) % m;
        j = j2;
      } else if (!j2) {
        i = (i1 + m - i2) % m;
        j = 1;
      } else {
        i = (i1 + m - i2 + n) % m;
        j = 0;
      }
      table[a][b] = i + m * j;
    }
  }
  return FiniteGroup("Dic" + std::to_string(n), std::move(names), std::move(table));
}

FiniteGroup alternating4() {
  std::vector<std::array<std::size_t, 4>> perms;
  std::array<std::size_t, 4> p{0, 1, 2, 3};
  do {
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) inversions += p[i] > p[j];
    if (inversions % 2 == 0) perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> table(perms.size(), std::vector<std::size_t>(perms.size()));
  for (std::size_t a = 0; a < perms.size(); ++a) {
    std::string s;
    for (std::size_t v : perms[a]) s += std::to_string(v);
    names.push_back(s);
    for (std::size_t b = 0; b < perms.size(); ++b) {
      std::array<std::size_t, 4> q{};
      for (std::size_t i = 0; i < 4; ++i) q[i] = perms[a][perms[b][i]];  // a after b
      table[a][b] = static_cast<std::size_t>(std::find(perms.begin(), perms.end(), q) - perms.begin());
    }
  }
  return FiniteGroup("A4", std::move(names), std::move(table));
}

std::vector<CatalogEntry> small_group_catalog() {
  std::vector<CatalogEntry> out;
  for (const auto& moduli : std::vector<std::vector<std::size_t>>{
           {1}, {2}, {3}, {4}, {2, 2}, {5}, {6}, {7}, {8}, {4, 2}, {2, 2, 2}, {9}, {3, 3}, {10}, {11}, {12}, {6, 2}})
    out.push_back({cyclic_product(moduli), true});
  for (std::size_t n : {3u, 4u, 5u, 6u}) out.push_back({dihedral(n), false});
  out.push_back({dicyclic(2), false});  // quaternion group
  out.push_back({dicyclic(3), false});
  out.push_back({alternating4(), false});
  return out;
}

EckmannHiltonResult eckmann_hilton_check(const FiniteGroup& g) {
  if (g.order() > 64) throw Error(ErrorKind::InvalidParameter, "eckmann_hilton_check: group order exceeds 64");
  EckmannHiltonResult r;
  const std::size_t n = g.order();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) {
          ++r.quadruples_checked;
          if (g.mul(g.mul(a, b), g.mul(c, d)) != g.mul(g.mul(a, c), g.mul(b, d))) {
            // abcd != acbd cancels to bc != cb.
            r.consistent = false;
            r.witness = std::array<std::size_t, 2>{b, c};
            return r;
          }
        }
  return r;
}

}  // namespace daseinkit
