#pragma once

// Configuration, artifacts and orchestration behind the daseinkit binary.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "daseinkit/contexts.hpp"
#include "daseinkit/interp.hpp"
#include "daseinkit/linalg.hpp"
#include "daseinkit/twogroup.hpp"

namespace daseinkit::cli {

inline constexpr const char* kVersion = "0.1.0";

struct SystemConfig {
  bool oscillator = false;
  std::size_t levels = 0;  // oscillator N
  double mass = 1.0, omega = 1.0, hbar = 1.0;
  std::size_t dim = 0;
  std::vector<HermitianOperator> operators;  // sorted by label
};

struct RunConfig {
  SystemConfig system;
  Tolerances tol;
  bool full_subcontexts = false;
  std::size_t max_contexts = 5000;
  Delta0Rule rule = Delta0Rule::joint_atom;
  std::uint64_t seed = 0;
  std::array<std::string, 2> pair;   // operators for the commutator and product checks
  std::size_t lemma1_trials = 100;
  nlohmann::json twogroup_categories = nlohmann::json::array();
  nlohmann::json normalized;  // the config with every default filled in
};

// Throws ParseError for malformed JSON, SchemaError (message carries a JSON
// pointer) for schema violations, including non-Hermitian operators.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Applies --rule / --full-subcontexts and re-normalises.
void apply_overrides(RunConfig& cfg, std::optional<Delta0Rule> rule, std::optional<bool> full_subcontexts);

// SHA-256 of the canonical (sorted-key, compact) normalised config.
std::string config_hash(const RunConfig& cfg);

std::string format_double(double x);  // 17 significant digits
nlohmann::json matrix_to_json(const ComplexMatrix& m);
// Accepts {re, im} with rows of numbers or decimal strings; im optional.
ComplexMatrix matrix_from_json(const nlohmann::json& j, std::size_t dim, const std::string& pointer);

std::string rule_name(Delta0Rule r);

// {objects: [names], homs: [{id, src, dst}], composition: [[g, f, g o f], ...]}
// with identities "id_<object>" added implicitly and their composites
// implied. Throws SchemaError at `pointer`.
FiniteCategory category_from_json(const nlohmann::json& j, const std::string& pointer);

enum class Subcommand { contexts, daseinise, spectrum, verify, gauge_check, twogroup, all };
std::optional<Subcommand> parse_subcommand(const std::string& s);

// Runs the subcommand, writing contexts.json, daseinisation.csv (where
// applicable) and report.json into out_dir. Returns 0 when every executed
// check passes, 2 when one fails. Errors propagate as exceptions.
int run(Subcommand cmd, const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

// Writes via a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace daseinkit::cli
