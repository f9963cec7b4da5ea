#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "daseinkit/cli.hpp"

using namespace daseinkit;

int main(int argc, char** argv) {
  CLI::App app{"Stage-wise operator interpretation over context categories", "daseinkit"};
  app.set_version_flag("--version", cli::kVersion);
  app.require_subcommand(1, 1);

  std::string config, out, rule;
  bool full = false;
  const char* names[] = {"contexts", "daseinise", "spectrum", "verify", "gauge-check", "twogroup", "all"};
  const char* help[] = {"build or reload the context category",
                        "daseinise every operator at every stage",
                        "internal spectra of the interpreted operators",
                        "lemma suites, presheaf and Heyting checks",
                        "stage-membership, stage-automorphism and reflection-gauge checks",
                        "automorphism 2-groups and Eckmann-Hilton",
                        "everything above"};
  for (std::size_t i = 0; i < std::size(names); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->required();
    sub->add_option("--rule", rule, "delta_0 rule")->check(CLI::IsMember({"joint_atom", "spectra_only"}));
    sub->add_flag("--full-subcontexts", full, "close the category under coarsening");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto cmd = cli::parse_subcommand(app.get_subcommands().front()->get_name());
    auto cfg = cli::load_config(config);
    std::optional<Delta0Rule> r;
    if (rule == "joint_atom") r = Delta0Rule::joint_atom;
    if (rule == "spectra_only") r = Delta0Rule::spectra_only;
    cli::apply_overrides(cfg, r, full ? std::optional<bool>(true) : std::nullopt);
    return cli::run(*cmd, cfg, out, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "daseinkit: " << e.what() << "\n";
    return 1;
  }
}
