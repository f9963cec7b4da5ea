#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "daseinkit/cli.hpp"

namespace daseinkit::cli::detail {

nlohmann::json contexts_document(const ContextCategory& cat, const std::string& config_hash);

// The cached category, if `path` holds a well-formed document for this
// config hash whose contexts rebuild to the stored ids.
std::optional<ContextCategory> load_cached_category(const std::filesystem::path& path, const RunConfig& cfg);

// context_id,operator_label,atom_index,atom_value
std::string daseinisation_csv(const ContextCategory& cat, const RunConfig& cfg);

}  // namespace daseinkit::cli::detail
