#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "common.hpp"
#include "tpx/dse.hpp"
#include "tpx/error.hpp"

namespace tpxcli {

namespace {

struct SensitivityOptions {
  CatalogSlot catalog;
  std::string trace_path;
  std::string out_dir;
};

void run_sensitivity(SensitivityOptions& opt) {
  const tpx::ToolCatalog& catalog = opt.catalog.get();

  std::ifstream in(opt.trace_path);
  if (!in) throw tpx::ConfigError("cannot open trace file '" + opt.trace_path + "'");
  std::vector<tpx::TraceRecord> trace;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      trace.push_back(tpx::trace_record_from_json(catalog, line));
    } catch (const tpx::ConfigError& e) {
      throw tpx::ConfigError(opt.trace_path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }

  const auto entries = tpx::sensitivity(trace);

  // Most energy-hungry tools first.
  std::vector<std::pair<std::string, tpx::SensitivityEntry>> ordered(entries.begin(),
                                                                     entries.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (a.second.effect != b.second.effect) return a.second.effect > b.second.effect;
    return a.first < b.first;
  });

  std::printf("%-10s %12s %12s  %s\n", "tool", "toggle BDDE", "effect", "category");
  for (const auto& [tool, entry] : ordered)
    std::printf("%-10s %+11.2f%% %+11.2f%%  %s\n", tool.c_str(), entry.toggle_bdde, entry.effect,
                tpx::to_string(entry.category).c_str());

  nlohmann::json j;
  j["schema_version"] = 1;
  j["catalog_fingerprint"] = catalog.fingerprint();
  j["tools"] = nlohmann::json::object();
  for (const auto& [tool, entry] : entries)
    j["tools"][tool] = {{"toggle_bdde", entry.toggle_bdde},
                        {"effect", entry.effect},
                        {"category", tpx::to_string(entry.category)}};
  if (!opt.out_dir.empty())
    write_text_file(opt.out_dir + "/sensitivity.json", j.dump(2) + "\n");
  else
    std::cout << j.dump(2) << "\n";
}

}  // namespace

void register_sensitivity(CLI::App& app, int& exit_code) {
  (void)exit_code;
  auto opt = std::make_shared<SensitivityOptions>();
  CLI::App* cmd = app.add_subcommand(
      "sensitivity", "categorize each tool's energy effect from a search trace");
  cmd->add_option("--catalog", opt->catalog.path, "catalog JSON (default: built-in)");
  cmd->add_option("--trace", opt->trace_path, "trace.jsonl from a dse run")->required();
  cmd->add_option("--out", opt->out_dir, "directory for sensitivity.json (default: stdout)");
  cmd->callback([opt] { run_sensitivity(*opt); });
}

}  // namespace tpxcli
