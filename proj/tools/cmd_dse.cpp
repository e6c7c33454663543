#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <set>

#include "common.hpp"
#include "svg.hpp"
#include "tpx/cache.hpp"
#include "tpx/dse.hpp"
#include "tpx/error.hpp"

namespace tpxcli {

namespace {

std::string csv_number(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string quality_label(tpx::Objective objective) {
  return objective == tpx::Objective::BddePsnr ? "PSNR" : "VMAF";
}

// Tools whose bit differs from the baseline, rendered as "+NAME" (enabled on
// top of CTC) or "-NAME" (disabled from CTC).
std::string diff_vs(const tpx::ToolProfile& baseline, const tpx::ToolProfile& profile) {
  std::string out;
  for (const auto& [name, enabled] : profile.usage()) {
    if (baseline.enabled(name) == enabled) continue;
    if (!out.empty()) out += " ";
    out += (enabled ? "+" : "-") + name;
  }
  return out.empty() ? "(none)" : out;
}

struct CommonSearchOptions {
  CatalogSlot catalog;
  std::string evaluator_spec;
  std::string config_str;
  std::string objective = "bdde-psnr";
  std::string method = "pchip";
  std::vector<std::string> sequences;
  std::vector<int> qps;
  std::vector<std::string> tools;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string cache_path;
  bool svg = false;
};

void add_common_options(CLI::App* cmd, CommonSearchOptions& opt, CLI::Option*& seed_opt) {
  cmd->add_option("--catalog", opt.catalog.path, "catalog JSON (default: built-in)");
  cmd->add_option("--evaluator", opt.evaluator_spec,
                  "synthetic:<landscape.json> or pipeline:<config.json>")
      ->required();
  cmd->add_option("--config", opt.config_str, "coding configuration: AI, LB or RA")
      ->check(CLI::IsMember({"AI", "LB", "RA"}));
  cmd->add_option("--objective", opt.objective, "BDDE flavor to minimize")
      ->check(CLI::IsMember({"bdde-psnr", "bdde-vmaf"}));
  cmd->add_option("--method", opt.method, "interpolation: pchip or poly")
      ->check(CLI::IsMember({"pchip", "poly"}));
  cmd->add_option("--sequences", opt.sequences, "training sequence names/paths");
  cmd->add_option("--qps", opt.qps, "QP ladder (default: 22 27 32 37)");
  cmd->add_option("--tools", opt.tools, "restrict the search to these tools");
  cmd->add_option("--jobs", opt.jobs, "parallel candidate evaluations (pure evaluators only)")
      ->check(CLI::PositiveNumber);
  seed_opt = cmd->add_option("--seed", opt.seed, "override the landscape RNG seed");
  cmd->add_option("--out", opt.out_dir, "output directory")->required();
  cmd->add_option("--cache", opt.cache_path, "persistent evaluation cache file");
  cmd->add_flag("--svg", opt.svg, "also write a pareto.svg scatter plot");
}

tpx::DseOptions to_dse_options(const CommonSearchOptions& opt) {
  tpx::DseOptions dopt;
  dopt.objective = tpx::parse_objective(opt.objective);
  dopt.method = tpx::parse_method(opt.method);
  if (!opt.sequences.empty()) dopt.sequences = opt.sequences;
  if (!opt.qps.empty()) dopt.qps = opt.qps;
  dopt.tool_subset = opt.tools;
  dopt.jobs = opt.jobs;
  return dopt;
}

nlohmann::json resolved_common(const CommonSearchOptions& opt, const tpx::ToolCatalog& catalog,
                               tpx::CodingConfig config, const tpx::DseOptions& dopt,
                               const std::optional<std::uint64_t>& seed_override) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["catalog"] = {{"name", catalog.name()},
                  {"fingerprint", catalog.fingerprint()},
                  {"path", opt.catalog.path.empty() ? nlohmann::json(nullptr)
                                                    : nlohmann::json(opt.catalog.path)}};
  j["evaluator"] = opt.evaluator_spec;
  j["config"] = tpx::to_string(config);
  j["objective"] = tpx::to_string(dopt.objective);
  j["method"] = tpx::to_string(dopt.method);
  j["sequences"] = dopt.sequences;
  j["qps"] = dopt.qps;
  j["tools"] = dopt.tool_subset;  // empty = all applicable
  j["jobs"] = dopt.jobs;
  j["seed"] = seed_override ? nlohmann::json(*seed_override) : nlohmann::json(nullptr);
  j["cache"] = opt.cache_path.empty() ? nlohmann::json(nullptr) : nlohmann::json(opt.cache_path);
  return j;
}

void write_pareto_csv(const std::string& path, const std::vector<tpx::EvaluatedProfile>& front) {
  std::string csv = "profile_hash,bdr,bdde\n";
  for (const auto& ep : front)
    csv += ep.profile.hash_hex() + "," + csv_number(ep.bdr) + "," + csv_number(ep.objective) +
           "\n";
  write_text_file(path, csv);
}

// ---------------------------------------------------------------- dse run --

struct RunOptions {
  CommonSearchOptions common;
  bool sequential_accept = false;
  int max_iterations = 100;
  double bdr_cap = 10.0;
  int shortlist = 3;
  std::string refine_evaluator_spec;
  std::vector<std::string> refine_sequences;
  std::vector<int> refine_qps;
  bool no_ebe = false;
};

void run_dse_run(RunOptions& opt, const std::optional<std::uint64_t>& seed_override,
                 int& exit_code) {
  const tpx::ToolCatalog& catalog = opt.common.catalog.get();
  std::optional<tpx::CodingConfig> config_flag;
  if (!opt.common.config_str.empty()) config_flag = tpx::parse_config(opt.common.config_str);

  EvaluatorHandle handle =
      make_evaluator(opt.common.evaluator_spec, catalog, config_flag, seed_override);

  tpx::DseOptions dopt = to_dse_options(opt.common);
  dopt.sequential_accept = opt.sequential_accept;
  dopt.max_iterations = opt.max_iterations;

  std::optional<tpx::EvalCache> cache;
  if (!opt.common.cache_path.empty())
    cache.emplace(tpx::EvalCache::load(opt.common.cache_path, catalog.fingerprint()));

  const tpx::DseResult result =
      tpx::greedy_dse(*handle.evaluator, handle.config, dopt, cache ? &*cache : nullptr);

  // The trace and the resolved configuration are written even when the run
  // aborted, so partial work is never lost.
  std::string trace_text;
  for (const auto& record : result.trace) trace_text += tpx::trace_record_to_json(record) + "\n";
  write_text_file(opt.common.out_dir + "/trace.jsonl", trace_text);

  nlohmann::json resolved = resolved_common(opt.common, catalog, handle.config, dopt,
                                            seed_override);
  resolved["command"] = "dse run";
  resolved["sequential_accept"] = dopt.sequential_accept;
  resolved["max_iterations"] = dopt.max_iterations;
  resolved["bdr_cap"] = opt.bdr_cap;
  resolved["shortlist"] = opt.shortlist;
  resolved["refine_evaluator"] = opt.refine_evaluator_spec.empty()
                                     ? nlohmann::json(nullptr)
                                     : nlohmann::json(opt.refine_evaluator_spec);
  resolved["refine_sequences"] =
      opt.refine_sequences.empty() ? std::vector<std::string>{"refine"} : opt.refine_sequences;
  resolved["refine_qps"] = opt.refine_qps.empty() ? dopt.qps : opt.refine_qps;
  resolved["no_ebe"] = opt.no_ebe;
  write_text_file(opt.common.out_dir + "/resolved_config.json", resolved.dump(2) + "\n");

  if (cache) cache->save(opt.common.cache_path);

  if (result.stop_reason == tpx::StopReason::Aborted) {
    std::cerr << "evaluation error: " << result.abort_error << "\n";
    std::cerr << "partial trace preserved in " << opt.common.out_dir << "/trace.jsonl\n";
    exit_code = 3;
    return;
  }

  nlohmann::json report;
  report["schema_version"] = 1;
  report["command"] = "dse run";
  report["catalog_fingerprint"] = catalog.fingerprint();
  report["config"] = tpx::to_string(handle.config);
  report["objective"] = tpx::to_string(dopt.objective);
  report["method"] = tpx::to_string(dopt.method);
  report["stop_reason"] = tpx::to_string(result.stop_reason);
  report["iterations"] = result.iterations;
  report["evaluator_calls"] = result.evaluator_calls;
  report["evaluated_count"] = result.evaluated.size();
  report["baseline"] = {{"profile", profile_to_json(result.baseline)},
                        {"hash", result.baseline.hash_hex()}};
  report["final_reference"] = {{"profile", profile_to_json(result.final_reference)},
                               {"hash", result.final_reference.hash_hex()}};
  report["ee"] = evaluated_to_json(result.best);

  try {
    const auto entries = tpx::sensitivity(result.trace);
    nlohmann::json s = nlohmann::json::object();
    for (const auto& [tool, entry] : entries)
      s[tool] = {{"toggle_bdde", entry.toggle_bdde},
                 {"effect", entry.effect},
                 {"category", tpx::to_string(entry.category)}};
    report["sensitivity"] = s;
  } catch (const tpx::ConfigError& e) {
    report["sensitivity"] = nullptr;
    report["sensitivity_error"] = e.what();
  }

  const auto front = tpx::pareto_front(result.evaluated);
  nlohmann::json pareto = nlohmann::json::array();
  for (const auto& ep : front)
    pareto.push_back({{"hash", ep.profile.hash_hex()}, {"bdr", ep.bdr}, {"bdde", ep.objective}});
  report["pareto"] = pareto;
  write_pareto_csv(opt.common.out_dir + "/pareto.csv", front);
  if (opt.common.svg)
    write_text_file(opt.common.out_dir + "/pareto.svg",
                    pareto_svg(result.evaluated, front, quality_label(dopt.objective)));

  std::optional<tpx::EbeSelection> ebe;
  std::string ebe_error;
  if (!opt.no_ebe) {
    tpx::EbeOptions ebe_opt;
    ebe_opt.bdr_cap = opt.bdr_cap;
    ebe_opt.shortlist = opt.shortlist;
    if (!opt.refine_sequences.empty()) ebe_opt.refine_sequences = opt.refine_sequences;
    ebe_opt.refine_qps = opt.refine_qps.empty() ? dopt.qps : opt.refine_qps;
    try {
      if (opt.refine_evaluator_spec.empty()) {
        ebe = tpx::select_ebe(result.evaluated, *handle.evaluator, dopt, ebe_opt);
      } else {
        EvaluatorHandle refine = make_evaluator(opt.refine_evaluator_spec, catalog,
                                                handle.config, seed_override);
        ebe = tpx::select_ebe(result.evaluated, *refine.evaluator, dopt, ebe_opt);
      }
    } catch (const tpx::ConfigError& e) {
      ebe_error = e.what();
    }
  }
  if (ebe) {
    nlohmann::json e = evaluated_to_json(ebe->chosen);
    nlohmann::json shortlist = nlohmann::json::array();
    for (const auto& ep : ebe->shortlist) shortlist.push_back(ep.profile.hash_hex());
    e["shortlist"] = shortlist;
    report["ebe"] = e;
  } else {
    report["ebe"] = nullptr;
    if (!ebe_error.empty()) report["ebe_error"] = ebe_error;
  }

  write_text_file(opt.common.out_dir + "/report.json", report.dump(2) + "\n");

  std::printf("stop reason:  %s (%d iteration%s, %llu evaluator calls)\n",
              tpx::to_string(result.stop_reason).c_str(), result.iterations,
              result.iterations == 1 ? "" : "s",
              static_cast<unsigned long long>(result.evaluator_calls));
  std::printf("baseline:     %s (CTC)\n", result.baseline.hash_hex().c_str());
  std::printf("EE profile:   %s  BDDE %+.2f%%  BDR %+.2f%%\n",
              result.best.profile.hash_hex().c_str(), result.best.objective, result.best.bdr);
  std::printf("  vs CTC: %s\n", diff_vs(result.baseline, result.best.profile).c_str());
  if (ebe) {
    std::printf("EBE profile:  %s  BDDE %+.2f%%  BDR %+.2f%% (refined)\n",
                ebe->chosen.profile.hash_hex().c_str(), ebe->chosen.objective, ebe->chosen.bdr);
    std::printf("  vs CTC: %s\n", diff_vs(result.baseline, ebe->chosen.profile).c_str());
  } else if (!ebe_error.empty()) {
    std::printf("EBE profile:  none (%s)\n", ebe_error.c_str());
  }
  std::printf("outputs:      %s/{trace.jsonl, report.json, pareto.csv%s}\n",
              opt.common.out_dir.c_str(), opt.common.svg ? ", pareto.svg" : "");

  if (result.stop_reason == tpx::StopReason::IterationCap) exit_code = 4;
}

// --------------------------------------------------------- dse fullsearch --

struct FullOptions {
  CommonSearchOptions common;
  std::size_t max_subset = 20;
};

void run_dse_full(FullOptions& opt, const std::optional<std::uint64_t>& seed_override) {
  const tpx::ToolCatalog& catalog = opt.common.catalog.get();
  std::optional<tpx::CodingConfig> config_flag;
  if (!opt.common.config_str.empty()) config_flag = tpx::parse_config(opt.common.config_str);

  EvaluatorHandle handle =
      make_evaluator(opt.common.evaluator_spec, catalog, config_flag, seed_override);
  const tpx::DseOptions dopt = to_dse_options(opt.common);

  std::optional<tpx::EvalCache> cache;
  if (!opt.common.cache_path.empty())
    cache.emplace(tpx::EvalCache::load(opt.common.cache_path, catalog.fingerprint()));

  const auto results = tpx::full_search(*handle.evaluator, handle.config, dopt.tool_subset, dopt,
                                        opt.max_subset, cache ? &*cache : nullptr);
  if (cache) cache->save(opt.common.cache_path);

  // Column order mirrors the search order: catalog order restricted to the
  // subset.
  std::set<std::string> wanted(dopt.tool_subset.begin(), dopt.tool_subset.end());
  std::vector<std::string> columns;
  for (const tpx::ToolDescriptor* t : catalog.applicable(handle.config))
    if (wanted.empty() || wanted.count(t->name) != 0) columns.push_back(t->name);

  std::string csv = "profile_hash,bdr,bdde";
  for (const auto& name : columns) csv += "," + name;
  csv += "\n";
  for (const auto& ep : results) {
    csv += ep.profile.hash_hex() + "," + csv_number(ep.bdr) + "," + csv_number(ep.objective);
    for (const auto& name : columns) csv += ep.profile.enabled(name) ? ",1" : ",0";
    csv += "\n";
  }
  write_text_file(opt.common.out_dir + "/fullsearch.csv", csv);

  const auto front = tpx::pareto_front(results);
  write_pareto_csv(opt.common.out_dir + "/pareto.csv", front);
  if (opt.common.svg)
    write_text_file(opt.common.out_dir + "/pareto.svg",
                    pareto_svg(results, front, quality_label(dopt.objective)));

  nlohmann::json resolved =
      resolved_common(opt.common, catalog, handle.config, dopt, seed_override);
  resolved["command"] = "dse fullsearch";
  resolved["max_subset"] = opt.max_subset;
  write_text_file(opt.common.out_dir + "/resolved_config.json", resolved.dump(2) + "\n");

  nlohmann::json report;
  report["schema_version"] = 1;
  report["command"] = "dse fullsearch";
  report["catalog_fingerprint"] = catalog.fingerprint();
  report["config"] = tpx::to_string(handle.config);
  report["objective"] = tpx::to_string(dopt.objective);
  report["method"] = tpx::to_string(dopt.method);
  report["tools"] = columns;
  report["profiles"] = results.size();
  report["optimum"] = evaluated_to_json(results.front());
  nlohmann::json pareto = nlohmann::json::array();
  for (const auto& ep : front)
    pareto.push_back({{"hash", ep.profile.hash_hex()}, {"bdr", ep.bdr}, {"bdde", ep.objective}});
  report["pareto"] = pareto;
  write_text_file(opt.common.out_dir + "/report.json", report.dump(2) + "\n");

  const tpx::ToolProfile baseline = tpx::ctc_profile(catalog, handle.config);
  std::printf("profiles:     %zu over %zu tools\n", results.size(), columns.size());
  std::printf("optimum:      %s  BDDE %+.2f%%  BDR %+.2f%%\n",
              results.front().profile.hash_hex().c_str(), results.front().objective,
              results.front().bdr);
  std::printf("  vs CTC: %s\n", diff_vs(baseline, results.front().profile).c_str());
  std::printf("outputs:      %s/{fullsearch.csv, report.json, pareto.csv%s}\n",
              opt.common.out_dir.c_str(), opt.common.svg ? ", pareto.svg" : "");
}

}  // namespace

void register_dse(CLI::App& app, int& exit_code) {
  CLI::App* dse = app.add_subcommand("dse", "design-space exploration over tool profiles");
  dse->require_subcommand(1);

  auto run_opt = std::make_shared<RunOptions>();
  CLI::App* run = dse->add_subcommand("run", "greedy iterative search (one toggle per tool "
                                             "per sweep, batch acceptance)");
  CLI::Option* run_seed = nullptr;
  add_common_options(run, run_opt->common, run_seed);
  run->add_flag("--sequential-accept", run_opt->sequential_accept,
                "fold accepted toggles into the reference within the sweep");
  run->add_option("--max-iterations", run_opt->max_iterations, "sweep cap")
      ->check(CLI::PositiveNumber);
  run->add_option("--bdr-cap", run_opt->bdr_cap, "strict BDR bound for the EBE pick");
  run->add_option("--shortlist", run_opt->shortlist, "EBE shortlist size")
      ->check(CLI::PositiveNumber);
  run->add_option("--refine-evaluator", run_opt->refine_evaluator_spec,
                  "evaluator for EBE refinement (default: the search evaluator)");
  run->add_option("--refine-sequences", run_opt->refine_sequences,
                  "sequences for EBE refinement (default: refine)");
  run->add_option("--refine-qps", run_opt->refine_qps,
                  "QP ladder for EBE refinement (default: --qps)");
  run->add_flag("--no-ebe", run_opt->no_ebe, "skip the EBE selection stage");
  run->callback([run_opt, run_seed, &exit_code] {
    std::optional<std::uint64_t> seed;
    if (run_seed->count() > 0) seed = run_opt->common.seed;
    run_dse_run(*run_opt, seed, exit_code);
  });

  auto full_opt = std::make_shared<FullOptions>();
  CLI::App* full =
      dse->add_subcommand("fullsearch", "exhaustive oracle over a small tool subset");
  CLI::Option* full_seed = nullptr;
  add_common_options(full, full_opt->common, full_seed);
  full->add_option("--max-subset", full_opt->max_subset,
                   "refuse subsets larger than this (default 20)");
  full->callback([full_opt, full_seed] {
    std::optional<std::uint64_t> seed;
    if (full_seed->count() > 0) seed = full_opt->common.seed;
    run_dse_full(*full_opt, seed);
  });
}

}  // namespace tpxcli
