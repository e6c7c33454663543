#include <iostream>

#include "common.hpp"
#include "tpx/error.hpp"

namespace tpxcli {

namespace {

struct ProfileOptions {
  CatalogSlot catalog;
  std::string profile_path;
};

void run_validate(ProfileOptions& opt) {
  const tpx::ToolCatalog& catalog = opt.catalog.get();
  const tpx::ToolProfile profile =
      tpx::parse_profile(catalog, read_text_file(opt.profile_path));

  nlohmann::json out;
  out["valid"] = true;
  out["catalog"] = catalog.name();
  out["catalog_fingerprint"] = catalog.fingerprint();
  out["hash"] = profile.hash_hex();
  out["profile"] = profile_to_json(profile);
  out["derived_switches"] = nlohmann::json::object();
  for (const auto& [name, value] : tpx::derived_switches(profile))
    out["derived_switches"][name] = value;
  std::cout << out.dump(2) << "\n";
}

}  // namespace

void register_profile(CLI::App& app, int& exit_code) {
  (void)exit_code;
  auto opt = std::make_shared<ProfileOptions>();
  CLI::App* profile = app.add_subcommand("profile", "tool profile utilities");
  profile->require_subcommand(1);
  CLI::App* validate = profile->add_subcommand(
      "validate", "check a profile JSON against the catalog and normalize it");
  validate->add_option("--catalog", opt->catalog.path, "catalog JSON (default: built-in)");
  validate->add_option("--profile", opt->profile_path, "profile JSON file, or - for stdin")
      ->required();
  validate->callback([opt] { run_validate(*opt); });
}

}  // namespace tpxcli
