#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "daseinkit/daseinise.hpp"
#include "daseinkit/parallel.hpp"
#include "internal.hpp"

namespace daseinkit::cli {

using nlohmann::json;

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidParameter, "cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorKind::InvalidParameter, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::InvalidParameter, "cannot rename onto '" + path.string() + "': " + ec.message());
}

namespace detail {

json contexts_document(const ContextCategory& cat, const std::string& config_hash) {
  json contexts = json::array();
  for (const Context& c : cat.contexts()) {
    json atoms = json::array(), ranks = json::array();
    for (std::size_t i = 0; i < c.size(); ++i) {
      atoms.push_back(matrix_to_json(c.atom(i)));
      ranks.push_back(c.rank(i));
    }
    contexts.push_back({{"id", c.id()}, {"label", c.label()}, {"ranks", ranks}, {"atoms", atoms}});
  }
  json order = json::array();
  for (const auto& [lo, hi] : cat.strict_pairs()) order.push_back({cat.context(lo).id(), cat.context(hi).id()});
  return {{"tool", {{"name", "daseinkit"}, {"version", kVersion}}},
          {"config_hash", config_hash},
          {"dim", cat.dim()},
          {"generators", cat.generators()},
          {"trivial", cat.context(cat.trivial_index()).id()},
          {"contexts", contexts},
          {"order", order}};
}

std::optional<ContextCategory> load_cached_category(const std::filesystem::path& path, const RunConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    const json doc = json::parse(ss.str());
    if (doc.at("config_hash") != config_hash(cfg)) return std::nullopt;
    const std::size_t dim = doc.at("dim").get<std::size_t>();
    if (dim != cfg.system.dim) return std::nullopt;
    std::vector<Context> contexts;
    std::vector<std::string> ids;
    for (const json& c : doc.at("contexts")) {
      std::vector<ComplexMatrix> atoms;
      for (const json& a : c.at("atoms")) atoms.push_back(matrix_from_json(a, dim, "/contexts"));
      contexts.push_back(Context::from_atoms(std::move(atoms), cfg.tol, c.at("label").get<std::string>()));
      ids.push_back(c.at("id").get<std::string>());
    }
    ContextCategory cat(std::move(contexts), doc.at("generators").get<std::vector<std::string>>(), cfg.tol);
    if (cat.size() != ids.size()) return std::nullopt;
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (cat.context(i).id() != ids[i]) return std::nullopt;
    return cat;
  } catch (const std::exception&) {
    return std::nullopt;  // stale or damaged cache: rebuild
  }
}

std::string daseinisation_csv(const ContextCategory& cat, const RunConfig& cfg) {
  const auto& ops = cfg.system.operators;
  std::vector<SpectralDecomposition> decs;
  for (const auto& op : ops) decs.push_back(eigendecompose(op, cfg.tol));
  std::vector<std::string> blocks(cat.size());
  parallel_for(cat.size(), [&](std::size_t c) {
    std::string out;
    const Context& v = cat.context(c);
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const DaseinResult r = outer_selfadjoint(decs[k], v, cfg.tol);
      for (std::size_t i = 0; i < r.atom_values.size(); ++i)
        out += v.id() + "," + ops[k].label() + "," + std::to_string(i) + "," + format_double(r.atom_values[i]) + "\n";
    }
    blocks[c] = std::move(out);
  });
  std::string csv = "context_id,operator_label,atom_index,atom_value\n";
  for (const auto& b : blocks) csv += b;
  return csv;
}

}  // namespace detail
}  // namespace daseinkit::cli
