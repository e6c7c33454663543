#include "common.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tpx/error.hpp"
#include "tpx/pipeline.hpp"
#include "tpx/synthetic.hpp"

namespace tpxcli {

EvaluatorHandle make_evaluator(const std::string& spec, const tpx::ToolCatalog& catalog,
                               const std::optional<tpx::CodingConfig>& config_flag,
                               const std::optional<std::uint64_t>& seed_override) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw tpx::ConfigError("evaluator spec '" + spec +
                           "' must look like synthetic:<file> or pipeline:<file>");
  const std::string kind = spec.substr(0, colon);
  const std::string path = spec.substr(colon + 1);

  EvaluatorHandle handle;
  if (kind == "synthetic") {
    tpx::LandscapeSpec landscape = tpx::landscape_from_file(path);
    if (seed_override) landscape.seed = *seed_override;
    if (config_flag && *config_flag != landscape.config)
      throw tpx::ConfigError("--config " + tpx::to_string(*config_flag) +
                             " contradicts the landscape's config " +
                             tpx::to_string(landscape.config));
    handle.config = landscape.config;
    handle.evaluator = std::make_unique<tpx::SyntheticLandscape>(catalog, std::move(landscape));
  } else if (kind == "pipeline") {
    if (!config_flag)
      throw tpx::ConfigError("pipeline evaluators need --config (AI, LB or RA)");
    handle.config = *config_flag;
    handle.evaluator = std::make_unique<tpx::PipelineEvaluator>(
        catalog, tpx::PipelineConfig::from_file(path), *config_flag);
  } else {
    throw tpx::ConfigError("unknown evaluator kind '" + kind +
                           "' (expected synthetic or pipeline)");
  }
  return handle;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec)
      throw tpx::ConfigError("cannot create directory '" + p.parent_path().string() +
                             "': " + ec.message());
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw tpx::ConfigError("cannot write file '" + path + "'");
  out << content;
  if (!out) throw tpx::ConfigError("failed while writing file '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  if (path == "-") {
    std::stringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream in(path);
  if (!in) throw tpx::ConfigError("cannot open file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

nlohmann::json profile_to_json(const tpx::ToolProfile& profile) {
  return nlohmann::json::parse(tpx::emit_profile(profile));
}

nlohmann::json evaluated_to_json(const tpx::EvaluatedProfile& ep) {
  nlohmann::json j;
  j["profile"] = profile_to_json(ep.profile);
  j["hash"] = ep.profile.hash_hex();
  j["bdr"] = ep.bdr;
  j["bdde"] = ep.objective;
  j["bd"] = nlohmann::json{{"bdr_psnr", ep.bd.bdr_psnr},
                           {"bdr_vmaf", ep.bd.bdr_vmaf},
                           {"bdde_psnr", ep.bd.bdde_psnr ? nlohmann::json(*ep.bd.bdde_psnr)
                                                         : nlohmann::json(nullptr)},
                           {"bdde_vmaf", ep.bd.bdde_vmaf ? nlohmann::json(*ep.bd.bdde_vmaf)
                                                         : nlohmann::json(nullptr)}};
  return j;
}

}  // namespace tpxcli
