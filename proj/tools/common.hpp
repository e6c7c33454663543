#pragma once

#include <CLI11.hpp>
#include <json.hpp>
#include <memory>
#include <optional>
#include <string>

#include "tpx/dse.hpp"
#include "tpx/evaluator.hpp"
#include "tpx/profiles.hpp"

namespace tpxcli {

// Lazily resolves --catalog: the built-in catalog unless a path was given.
// Owns the loaded catalog so evaluators can hold references into it.
class CatalogSlot {
 public:
  std::string path;  // bound to --catalog

  const tpx::ToolCatalog& get() {
    if (path.empty()) return tpx::ToolCatalog::builtin();
    if (!owned_) owned_ = tpx::ToolCatalog::from_file(path);
    return *owned_;
  }

 private:
  std::optional<tpx::ToolCatalog> owned_;
};

// "synthetic:<landscape.json>" or "pipeline:<config.json>". The synthetic
// flavor fixes the coding configuration itself; the pipeline flavor needs
// --config. seed_override replaces the landscape's seed when set.
struct EvaluatorHandle {
  std::unique_ptr<tpx::Evaluator> evaluator;
  tpx::CodingConfig config = tpx::CodingConfig::RA;
};

EvaluatorHandle make_evaluator(const std::string& spec, const tpx::ToolCatalog& catalog,
                               const std::optional<tpx::CodingConfig>& config_flag,
                               const std::optional<std::uint64_t>& seed_override);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

nlohmann::json profile_to_json(const tpx::ToolProfile& profile);
nlohmann::json evaluated_to_json(const tpx::EvaluatedProfile& ep);

// Subcommand registrars; exit_code lets callbacks signal non-convergence (4)
// without an exception.
void register_bd(CLI::App& app, int& exit_code);
void register_dse(CLI::App& app, int& exit_code);
void register_measure(CLI::App& app, int& exit_code);
void register_profile(CLI::App& app, int& exit_code);
void register_sensitivity(CLI::App& app, int& exit_code);

}  // namespace tpxcli
