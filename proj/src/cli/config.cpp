#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "daseinkit/cli.hpp"
#include "daseinkit/hash.hpp"

namespace daseinkit::cli {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& pointer, const std::string& what) {
  throw Error(ErrorKind::SchemaError, (pointer.empty() ? "/" : pointer) + ": " + what);
}

void only_keys(const json& j, const std::string& pointer, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) schema(pointer, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.contains(key)) schema(pointer + "/" + key, "unknown key");
}

double number_at(const json& j, const std::string& key, const std::string& pointer, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) schema(pointer + "/" + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) schema(pointer + "/" + key, "expected a finite number");
  return x;
}

std::uint64_t uint_at(const json& j, const std::string& key, const std::string& pointer, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    schema(pointer + "/" + key, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

double positive(double x, const std::string& pointer) {
  if (!(x > 0)) schema(pointer, "must be positive");
  return x;
}

double entry(const json& v, const std::string& pointer) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      schema(pointer, "not a decimal number: '" + s + "'");
    }
    if (used != s.size()) schema(pointer, "not a decimal number: '" + s + "'");
    return x;
  }
  schema(pointer, "expected a number or decimal string");
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json matrix_to_json(const ComplexMatrix& m) {
  json re = json::array(), im = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json rr = json::array(), ir = json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) {
      rr.push_back(format_double(m(i, j).real()));
      ir.push_back(format_double(m(i, j).imag()));
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const json& j, std::size_t dim, const std::string& pointer) {
  only_keys(j, pointer, {"re", "im"});
  if (!j.contains("re")) schema(pointer + "/re", "missing");
  ComplexMatrix m(dim);
  for (const char* part : {"re", "im"}) {
    if (!j.contains(part)) continue;
    const std::string p = pointer + "/" + part;
    const json& rows = j.at(part);
    if (!rows.is_array() || rows.size() != dim) schema(p, "expected " + std::to_string(dim) + " rows");
    for (std::size_t r = 0; r < dim; ++r) {
      const json& row = rows[r];
      const std::string rp = p + "/" + std::to_string(r);
      if (!row.is_array() || row.size() != dim) schema(rp, "expected " + std::to_string(dim) + " entries");
      for (std::size_t c = 0; c < dim; ++c) {
        const double x = entry(row[c], rp + "/" + std::to_string(c));
        if (!std::isfinite(x)) schema(rp + "/" + std::to_string(c), "non-finite entry");
        if (part[0] == 'r') m(r, c).real(x);
        else m(r, c).imag(x);
      }
    }
  }
  return m;
}

std::string rule_name(Delta0Rule r) { return r == Delta0Rule::joint_atom ? "joint_atom" : "spectra_only"; }

FiniteCategory category_from_json(const json& j, const std::string& pointer) {
  only_keys(j, pointer, {"name", "objects", "homs", "composition"});
  if (!j.contains("objects") || !j.at("objects").is_array() || j.at("objects").empty())
    schema(pointer + "/objects", "expected a non-empty array of names");
  std::vector<std::string> objects;
  std::map<std::string, std::size_t> obj_index;
  for (std::size_t i = 0; i < j.at("objects").size(); ++i) {
    const json& o = j.at("objects")[i];
    if (!o.is_string()) schema(pointer + "/objects/" + std::to_string(i), "expected a string");
    if (!obj_index.emplace(o.get<std::string>(), i).second)
      schema(pointer + "/objects/" + std::to_string(i), "duplicate object");
    objects.push_back(o.get<std::string>());
  }

  std::vector<Morphism> mors;
  std::map<std::string, std::size_t> mor_index;
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    ids.push_back(mors.size());
    mor_index["id_" + objects[i]] = mors.size();
    mors.push_back({"id_" + objects[i], i, i});
  }
  const json homs = j.value("homs", json::array());
  if (!homs.is_array()) schema(pointer + "/homs", "expected an array");
  for (std::size_t i = 0; i < homs.size(); ++i) {
    const std::string p = pointer + "/homs/" + std::to_string(i);
    only_keys(homs[i], p, {"id", "src", "dst"});
    for (const char* k : {"id", "src", "dst"})
      if (!homs[i].contains(k) || !homs[i].at(k).is_string()) schema(p + "/" + k, "expected a string");
    const std::string id = homs[i].at("id").get<std::string>();
    const auto s = obj_index.find(homs[i].at("src").get<std::string>());
    const auto d = obj_index.find(homs[i].at("dst").get<std::string>());
    if (s == obj_index.end()) schema(p + "/src", "unknown object");
    if (d == obj_index.end()) schema(p + "/dst", "unknown object");
    if (!mor_index.emplace(id, mors.size()).second) schema(p + "/id", "duplicate morphism id");
    mors.push_back({id, s->second, d->second});
  }

  const std::size_t m = mors.size();
  std::vector<std::vector<std::size_t>> comp(m, std::vector<std::size_t>(m, kNoMorphism));
  for (std::size_t f = 0; f < m; ++f) {
    comp[ids[mors[f].dst]][f] = f;
    comp[f][ids[mors[f].src]] = f;
  }
  const json table = j.value("composition", json::array());
  if (!table.is_array()) schema(pointer + "/composition", "expected an array");
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::string p = pointer + "/composition/" + std::to_string(i);
    const json& row = table[i];
    if (!row.is_array() || row.size() != 3) schema(p, "expected [g, f, g o f]");
    std::array<std::size_t, 3> idx{};
    for (std::size_t k = 0; k < 3; ++k) {
      if (!row[k].is_string()) schema(p + "/" + std::to_string(k), "expected a morphism id");
      const auto it = mor_index.find(row[k].get<std::string>());
      if (it == mor_index.end()) schema(p + "/" + std::to_string(k), "unknown morphism");
      idx[k] = it->second;
    }
    if (mors[idx[1]].dst != mors[idx[0]].src) schema(p, "morphisms are not composable");
    comp[idx[0]][idx[1]] = idx[2];
  }
  try {
    return FiniteCategory(std::move(objects), std::move(mors), std::move(ids), std::move(comp));
  } catch (const Error& e) {
    schema(pointer, e.what());
  }
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  only_keys(root, "", {"system", "tolerances", "category", "delta0_rule", "seed", "pair", "lemma1_trials", "twogroup"});
  RunConfig cfg;
  json norm;

  if (root.contains("tolerances")) {
    const json& t = root.at("tolerances");
    only_keys(t, "/tolerances", {"herm", "num", "group", "zero"});
    cfg.tol.herm = number_at(t, "herm", "/tolerances", cfg.tol.herm);
    cfg.tol.num = number_at(t, "num", "/tolerances", cfg.tol.num);
    cfg.tol.group = number_at(t, "group", "/tolerances", cfg.tol.group);
    cfg.tol.zero = number_at(t, "zero", "/tolerances", cfg.tol.zero);
  }
  try {
    cfg.tol.validate();
  } catch (const Error& e) {
    schema("/tolerances", e.what());
  }
  norm["tolerances"] = {{"herm", cfg.tol.herm}, {"num", cfg.tol.num}, {"group", cfg.tol.group}, {"zero", cfg.tol.zero}};

  if (!root.contains("system")) schema("/system", "missing");
  const json& sys = root.at("system");
  if (!sys.is_object()) schema("/system", "expected an object");
  SystemConfig& sc = cfg.system;
  if (sys.contains("builtin")) {
    only_keys(sys, "/system", {"builtin", "N", "m", "omega", "hbar"});
    if (sys.at("builtin") != "oscillator") schema("/system/builtin", "only \"oscillator\" is built in");
    if (!sys.contains("N")) schema("/system/N", "missing");
    sc.oscillator = true;
    sc.levels = uint_at(sys, "N", "/system", 0);
    if (sc.levels < 2 || sc.levels > 64) schema("/system/N", "must be in [2, 64]");
    sc.mass = positive(number_at(sys, "m", "/system", 1.0), "/system/m");
    sc.omega = positive(number_at(sys, "omega", "/system", 1.0), "/system/omega");
    sc.hbar = positive(number_at(sys, "hbar", "/system", 1.0), "/system/hbar");
    sc.dim = sc.levels;
    const Oscillator osc = make_oscillator(sc.levels, sc.mass, sc.omega, sc.hbar);
    sc.operators = {osc.h, osc.p, osc.x};
    norm["system"] = {{"builtin", "oscillator"}, {"N", sc.levels}, {"m", sc.mass}, {"omega", sc.omega}, {"hbar", sc.hbar}};
  } else {
    only_keys(sys, "/system", {"dim", "operators", "m", "omega"});
    if (!sys.contains("dim")) schema("/system/dim", "missing (or give \"builtin\")");
    sc.dim = uint_at(sys, "dim", "/system", 0);
    if (sc.dim < 1 || sc.dim > 64) schema("/system/dim", "must be in [1, 64]");
    sc.mass = positive(number_at(sys, "m", "/system", 1.0), "/system/m");
    sc.omega = positive(number_at(sys, "omega", "/system", 1.0), "/system/omega");
    if (!sys.contains("operators") || !sys.at("operators").is_object() || sys.at("operators").empty())
      schema("/system/operators", "expected a non-empty object of labelled matrices");
    json ops = json::object();
    for (const auto& [label, mj] : sys.at("operators").items()) {
      const std::string p = "/system/operators/" + label;
      if (label.empty() || !std::all_of(label.begin(), label.end(), [](unsigned char ch) { return std::isalnum(ch) || ch == '_'; }))
        schema(p, "operator labels must be non-empty and use only letters, digits and '_'");
      const ComplexMatrix m = matrix_from_json(mj, sc.dim, p);
      try {
        sc.operators.emplace_back(m, cfg.tol.herm, label);
      } catch (const Error& e) {
        schema(p, "operator '" + label + "' is not Hermitian (" + e.what() + ")");
      }
      ops[label] = matrix_to_json(m);
    }
    norm["system"] = {{"dim", sc.dim}, {"m", sc.mass}, {"omega", sc.omega}, {"operators", ops}};
  }
  std::sort(sc.operators.begin(), sc.operators.end(),
            [](const HermitianOperator& a, const HermitianOperator& b) { return a.label() < b.label(); });

  if (root.contains("category")) {
    const json& c = root.at("category");
    only_keys(c, "/category", {"full_subcontexts", "max_contexts"});
    if (c.contains("full_subcontexts")) {
      if (!c.at("full_subcontexts").is_boolean()) schema("/category/full_subcontexts", "expected a boolean");
      cfg.full_subcontexts = c.at("full_subcontexts").get<bool>();
    }
    cfg.max_contexts = uint_at(c, "max_contexts", "/category", cfg.max_contexts);
    if (cfg.max_contexts == 0) schema("/category/max_contexts", "must be positive");
  }

  if (root.contains("delta0_rule")) {
    const json& r = root.at("delta0_rule");
    if (r == "joint_atom") cfg.rule = Delta0Rule::joint_atom;
    else if (r == "spectra_only") cfg.rule = Delta0Rule::spectra_only;
    else schema("/delta0_rule", "expected \"joint_atom\" or \"spectra_only\"");
  }
  cfg.seed = uint_at(root, "seed", "", 0);
  cfg.lemma1_trials = uint_at(root, "lemma1_trials", "", 100);

  auto has_op = [&](const std::string& l) {
    return std::any_of(sc.operators.begin(), sc.operators.end(), [&](const auto& o) { return o.label() == l; });
  };
  if (root.contains("pair")) {
    const json& p = root.at("pair");
    if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
      schema("/pair", "expected two operator labels");
    for (std::size_t i = 0; i < 2; ++i) {
      cfg.pair[i] = p[i].get<std::string>();
      if (!has_op(cfg.pair[i])) schema("/pair/" + std::to_string(i), "unknown operator '" + cfg.pair[i] + "'");
    }
  } else if (sc.oscillator) {
    cfg.pair = {"X", "P"};
  } else {
    cfg.pair = {sc.operators[0].label(), sc.operators[sc.operators.size() > 1 ? 1 : 0].label()};
  }

  if (root.contains("twogroup")) {
    const json& t = root.at("twogroup");
    only_keys(t, "/twogroup", {"categories"});
    if (t.contains("categories")) {
      if (!t.at("categories").is_array()) schema("/twogroup/categories", "expected an array");
      for (std::size_t i = 0; i < t.at("categories").size(); ++i)
        category_from_json(t.at("categories")[i], "/twogroup/categories/" + std::to_string(i));
      cfg.twogroup_categories = t.at("categories");
    }
  }
  cfg.normalized = std::move(norm);
  apply_overrides(cfg, std::nullopt, std::nullopt);
  return cfg;
}

void apply_overrides(RunConfig& cfg, std::optional<Delta0Rule> rule, std::optional<bool> full_subcontexts) {
  if (rule) cfg.rule = *rule;
  if (full_subcontexts) cfg.full_subcontexts = *full_subcontexts;
  json& n = cfg.normalized;
  n["category"] = {{"full_subcontexts", cfg.full_subcontexts}, {"max_contexts", cfg.max_contexts}};
  n["delta0_rule"] = rule_name(cfg.rule);
  n["seed"] = cfg.seed;
  n["pair"] = {cfg.pair[0], cfg.pair[1]};
  n["lemma1_trials"] = cfg.lemma1_trials;
  n["twogroup"] = {{"categories", cfg.twogroup_categories}};
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_hash(const RunConfig& cfg) { return sha256_hex(cfg.normalized.dump()); }

std::optional<Subcommand> parse_subcommand(const std::string& s) {
  static const std::map<std::string, Subcommand> names{
      {"contexts", Subcommand::contexts}, {"daseinise", Subcommand::daseinise},     {"spectrum", Subcommand::spectrum},
      {"verify", Subcommand::verify},     {"gauge-check", Subcommand::gauge_check}, {"twogroup", Subcommand::twogroup},
      {"all", Subcommand::all}};
  const auto it = names.find(s);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

}  // namespace daseinkit::cli
