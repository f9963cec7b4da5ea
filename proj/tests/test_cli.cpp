#include <doctest.h>

#include <cstring>
#include <functional>
#include <fstream>
#include <random>
#include <sstream>

#include "daseinkit/cli.hpp"
#include "test_support.hpp"

using namespace daseinkit;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("daseinkit_test_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no exception");
  return ErrorKind::InvalidParameter;
}

const char* kQubit = R"({"system": {"dim": 2, "operators": {
  "Z": {"re": [[1, 0], [0, -1]]},
  "X": {"re": [["0", "1"], ["1", "0"]], "im": [[0, 0], [0, 0]]}}}})";

// diag(0,1) and diag(1,0): zero lies in both spectra but P^2 + X^2 = I.
const char* kGap = R"({"system": {"dim": 2, "operators": {
  "P": {"re": [[0, 0], [0, 1]]}, "X": {"re": [[1, 0], [0, 0]]}}}, "delta0_rule": "spectra_only"})";

}  // namespace

TEST_CASE("config defaults") {
  const auto cfg = cli::parse_config(R"({"system": {"builtin": "oscillator", "N": 3}})");
  CHECK(cfg.tol.herm == 1e-10);
  CHECK(cfg.tol.num == 1e-10);
  CHECK(cfg.tol.group == 1e-8);
  CHECK(cfg.tol.zero == 1e-9);
  CHECK(cfg.rule == Delta0Rule::joint_atom);
  CHECK(cfg.seed == 0);
  CHECK_FALSE(cfg.full_subcontexts);
  CHECK(cfg.pair == std::array<std::string, 2>{"X", "P"});
  REQUIRE(cfg.system.operators.size() == 3);
  CHECK(cfg.system.operators[0].label() == "H");
  CHECK(cfg.system.operators[1].label() == "P");
  CHECK(cfg.system.operators[2].label() == "X");
  CHECK(cfg.normalized.at("delta0_rule") == "joint_atom");
}

TEST_CASE("explicit qubit config") {
  const auto cfg = cli::parse_config(kQubit);
  REQUIRE(cfg.system.operators.size() == 2);
  CHECK(cfg.system.dim == 2);
  CHECK(cfg.system.operators[1].label() == "Z");
  CHECK(cfg.system.operators[1].matrix() == testing::sigma_z());
  CHECK(cfg.system.operators[0].matrix() == testing::sigma_x());
  CHECK(cfg.pair == std::array<std::string, 2>{"X", "Z"});
}

TEST_CASE("config errors carry a pointer") {
  try {
    cli::parse_config(R"({"system": {"dim": 2, "operators": {"B": {"re": [[0, 1], [0, 0]]}}}})");
    FAIL("expected SchemaError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaError);
    CHECK(std::strstr(e.what(), "/system/operators/B") != nullptr);
  }
  try {
    cli::parse_config(R"({"system": {"builtin": "oscillator", "N": 3}, "tolerance": {}})");
    FAIL("expected SchemaError");
  } catch (const Error& e) {
    CHECK(std::strstr(e.what(), "/tolerance") != nullptr);
  }
  CHECK(kind_of([] { cli::parse_config("{"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { cli::parse_config(R"({"system": {"builtin": "oscillator", "N": 1}})"); }) ==
        ErrorKind::SchemaError);
  CHECK(kind_of([] { cli::parse_config(R"({"system": {"builtin": "oscillator", "N": 3}, "pair": ["X", "Q"]})"); }) ==
        ErrorKind::SchemaError);
  CHECK(kind_of([] {
          cli::parse_config(R"({"system": {"builtin": "oscillator", "N": 3}, "tolerances": {"group": 1e-12}})");
        }) == ErrorKind::SchemaError);
  CHECK(kind_of([] { cli::parse_config(R"({"system": {"dim": 1, "operators": {"a b": {"re": [[1]]}}}})"); }) ==
        ErrorKind::SchemaError);
}

TEST_CASE("config hash ignores formatting and key order") {
  const auto a = cli::parse_config(R"({"seed": 0, "system": {"N": 3, "builtin": "oscillator"}})");
  const auto b = cli::parse_config("{\n  \"system\": {\"builtin\": \"oscillator\", \"N\": 3, \"m\": 1.0}\n}");
  CHECK(cli::config_hash(a) == cli::config_hash(b));
  CHECK(cli::config_hash(a).size() == 64);
  auto c = a;
  cli::apply_overrides(c, Delta0Rule::spectra_only, std::nullopt);
  CHECK(cli::config_hash(c) != cli::config_hash(a));
  const auto d = cli::parse_config(R"({"seed": 1, "system": {"N": 3, "builtin": "oscillator"}})");
  CHECK(cli::config_hash(d) != cli::config_hash(a));
}

TEST_CASE("matrices round-trip bit-exactly through 17-digit strings") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = testing::random_hermitian(1 + trial % 5, rng);
    const json j = cli::matrix_to_json(m);
    CHECK(j.at("re")[0][0].is_string());
    CHECK(cli::matrix_from_json(j, m.dim(), "/m") == m);
  }
  CHECK(cli::format_double(0.1) == "0.10000000000000001");
  CHECK(cli::format_double(-2) == "-2");
}

TEST_CASE("categories from JSON") {
  const json iso = json::parse(R"({"objects": ["a", "b"],
    "homs": [{"id": "f", "src": "a", "dst": "b"}, {"id": "g", "src": "b", "dst": "a"}],
    "composition": [["g", "f", "id_a"], ["f", "g", "id_b"]]})");
  const auto c = cli::category_from_json(iso, "/c");
  CHECK(c.objects() == 2);
  CHECK(c.morphisms() == 4);
  CHECK(c.inverse(2).has_value());

  json bad = iso;
  bad["composition"][0] = {"f", "f", "f"};
  CHECK(kind_of([&] { cli::category_from_json(bad, "/c"); }) == ErrorKind::SchemaError);
  json missing = iso;
  missing["composition"].erase(1);  // f o g left undefined
  CHECK(kind_of([&] { cli::category_from_json(missing, "/c"); }) == ErrorKind::SchemaError);
}

TEST_CASE("contexts twice: the second run reads the cache") {
  const auto dir = fresh_dir("cache");
  const auto cfg = cli::parse_config(R"({"system": {"builtin": "oscillator", "N": 4}})");
  std::ostringstream log;
  CHECK(cli::run(cli::Subcommand::contexts, cfg, dir, log) == 0);
  const std::string first = slurp(dir / "contexts.json");
  CHECK(json::parse(slurp(dir / "report.json")).at("timestamps").at("contexts_cache") == "miss");
  CHECK(cli::run(cli::Subcommand::contexts, cfg, dir, log) == 0);
  CHECK(slurp(dir / "contexts.json") == first);
  CHECK(json::parse(slurp(dir / "report.json")).at("timestamps").at("contexts_cache") == "hit");

  // A different config invalidates the cache.
  auto other = cfg;
  cli::apply_overrides(other, Delta0Rule::spectra_only, std::nullopt);
  CHECK(cli::run(cli::Subcommand::contexts, other, dir, log) == 0);
  CHECK(json::parse(slurp(dir / "report.json")).at("timestamps").at("contexts_cache") == "miss");
  CHECK(json::parse(slurp(dir / "contexts.json")).at("config_hash") == cli::config_hash(other));
}

TEST_CASE("verify on the three-level oscillator passes") {
  const auto dir = fresh_dir("verify3");
  const auto cfg = cli::parse_config(R"({"system": {"builtin": "oscillator", "N": 3}})");
  std::ostringstream log;
  CHECK(cli::run(cli::Subcommand::verify, cfg, dir, log) == 0);
  const json r = json::parse(slurp(dir / "report.json"));
  for (const char* k : {"lemma1", "lemma2", "lemma1_3", "lemma3", "presheaf", "heyting"})
    CHECK_MESSAGE(r.at("checks").at(k).at("status") == "PASS", k);
  CHECK(r.at("status") == "PASS");
  CHECK_FALSE(r.at("checks").contains("s1"));  // not run, so not reported
}

TEST_CASE("spectra_only on the gap system exits 2 and names the stage") {
  const auto dir = fresh_dir("gap");
  const auto cfg = cli::parse_config(kGap);
  std::ostringstream log;
  CHECK(cli::run(cli::Subcommand::verify, cfg, dir, log) == 2);
  const json r = json::parse(slurp(dir / "report.json"));
  const json& l3 = r.at("checks").at("lemma3");
  CHECK(l3.at("status") == "FAIL");
  REQUIRE(l3.at("witnesses").size() == 1);
  CHECK(l3.at("witnesses")[0].at("min_spectrum").get<double>() == doctest::Approx(0.5));
  CHECK(r.at("checks").at("lemma1_3").at("witnesses").size() == 1);

  // The repaired rule zeroes that stage.
  auto repaired = cfg;
  cli::apply_overrides(repaired, Delta0Rule::joint_atom, std::nullopt);
  CHECK(cli::run(cli::Subcommand::verify, repaired, fresh_dir("gap2"), log) == 2);  // lemma1_3 still fails
  const json r2 = json::parse(slurp(std::filesystem::temp_directory_path() / "daseinkit_test_cli_gap2" / "report.json"));
  CHECK(r2.at("checks").at("lemma3").at("status") == "PASS");
  CHECK(r2.at("checks").at("lemma1_3").at("status") == "FAIL");
}

TEST_CASE("daseinise writes the per-atom table") {
  const auto dir = fresh_dir("csv");
  const auto cfg = cli::parse_config(kQubit);
  std::ostringstream log;
  CHECK(cli::run(cli::Subcommand::daseinise, cfg, dir, log) == 0);
  std::istringstream csv(slurp(dir / "daseinisation.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "context_id,operator_label,atom_index,atom_value");
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  // Contexts {Z, X, trivial}: (2 + 2 + 1) atoms x 2 operators.
  CHECK(rows == 10);
}
