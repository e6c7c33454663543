#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>

#include "common.hpp"
#include "tpx/bdmetrics.hpp"
#include "tpx/csvio.hpp"
#include "tpx/error.hpp"

namespace tpxcli {

namespace {

struct BdOptions {
  std::vector<std::string> inputs;
  std::string ref_id;
  std::string test_id;
  std::string sequence;  // optional filter
  std::string method = "pchip";
  std::string cost = "both";     // rate | energy | both
  std::string quality = "both";  // psnr | vmaf | both
};

std::string delta_cell(const std::optional<double>& v) {
  if (!v) return "      n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+8.2f %%", *v);
  return buf;
}

void run_bd(const BdOptions& opt) {
  std::vector<tpx::RDRow> rows;
  for (const std::string& path : opt.inputs) {
    const auto part = tpx::read_rd_csv_file(path);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  if (!opt.sequence.empty()) {
    std::erase_if(rows, [&opt](const tpx::RDRow& r) { return r.sequence != opt.sequence; });
  }
  const auto curves = tpx::group_curves(rows);

  // Pair the two profiles per sequence; both sides must cover a sequence for
  // it to count.
  std::set<std::string> sequences;
  for (const auto& [key, curve] : curves) {
    (void)curve;
    if (key.first == opt.ref_id &&
        curves.count({opt.test_id, key.second}) != 0)
      sequences.insert(key.second);
  }
  if (sequences.empty())
    throw tpx::ConfigError("no sequence has curves for both '" + opt.ref_id + "' and '" +
                           opt.test_id + "'");

  const tpx::InterpolationMethod method = tpx::parse_method(opt.method);
  std::map<std::string, tpx::BDResult> per_sequence;
  std::vector<tpx::BDResult> all;
  for (const std::string& seq : sequences) {
    const tpx::BDResult bd = tpx::bd_result(curves.at({opt.ref_id, seq}),
                                            curves.at({opt.test_id, seq}), method);
    per_sequence[seq] = bd;
    all.push_back(bd);
  }
  const tpx::BDResult mean = tpx::mean_bd(all);

  const bool want_rate = opt.cost == "rate" || opt.cost == "both";
  const bool want_energy = opt.cost == "energy" || opt.cost == "both";
  const bool want_psnr = opt.quality == "psnr" || opt.quality == "both";
  const bool want_vmaf = opt.quality == "vmaf" || opt.quality == "both";
  if (!want_rate && !want_energy)
    throw tpx::ConfigError("--cost must be rate, energy or both");
  if (!want_psnr && !want_vmaf)
    throw tpx::ConfigError("--quality must be psnr, vmaf or both");

  std::printf("BD of '%s' against '%s' (%s, %zu sequence%s)\n", opt.test_id.c_str(),
              opt.ref_id.c_str(), tpx::to_string(method).c_str(), sequences.size(),
              sequences.size() == 1 ? "" : "s");
  std::printf("  %-12s %-8s %s\n", "metric", "cost", "delta");
  if (want_psnr && want_rate)
    std::printf("  %-12s %-8s %s\n", "BDR-PSNR", "rate",
                delta_cell(mean.bdr_psnr).c_str());
  if (want_psnr && want_energy)
    std::printf("  %-12s %-8s %s\n", "BDDE-PSNR", "energy", delta_cell(mean.bdde_psnr).c_str());
  if (want_vmaf && want_rate)
    std::printf("  %-12s %-8s %s\n", "BDR-VMAF", "rate",
                delta_cell(mean.bdr_vmaf).c_str());
  if (want_vmaf && want_energy)
    std::printf("  %-12s %-8s %s\n", "BDDE-VMAF", "energy", delta_cell(mean.bdde_vmaf).c_str());

  nlohmann::json out;
  out["ref"] = opt.ref_id;
  out["test"] = opt.test_id;
  out["method"] = tpx::to_string(method);
  auto bd_json = [&](const tpx::BDResult& bd) {
    nlohmann::json j;
    if (want_psnr && want_rate) j["bdr_psnr"] = bd.bdr_psnr;
    if (want_psnr && want_energy)
      j["bdde_psnr"] = bd.bdde_psnr ? nlohmann::json(*bd.bdde_psnr) : nlohmann::json(nullptr);
    if (want_vmaf && want_rate) j["bdr_vmaf"] = bd.bdr_vmaf;
    if (want_vmaf && want_energy)
      j["bdde_vmaf"] = bd.bdde_vmaf ? nlohmann::json(*bd.bdde_vmaf) : nlohmann::json(nullptr);
    return j;
  };
  out["mean"] = bd_json(mean);
  out["sequences"] = nlohmann::json::object();
  for (const auto& [seq, bd] : per_sequence) out["sequences"][seq] = bd_json(bd);
  std::cout << out.dump(2) << "\n";
}

}  // namespace

void register_bd(CLI::App& app, int& exit_code) {
  (void)exit_code;
  auto opt = std::make_shared<BdOptions>();
  CLI::App* bd = app.add_subcommand(
      "bd", "Bjontegaard deltas (rate and decoding energy) between two profiles");
  bd->add_option("--input", opt->inputs, "RD CSV file(s)")->required()->expected(-1);
  bd->add_option("--ref", opt->ref_id, "reference profile_id")->required();
  bd->add_option("--test", opt->test_id, "test profile_id")->required();
  bd->add_option("--sequence", opt->sequence, "restrict to one sequence");
  bd->add_option("--method", opt->method, "interpolation: pchip or poly")
      ->check(CLI::IsMember({"pchip", "poly"}));
  bd->add_option("--cost", opt->cost, "cost axis: rate, energy or both")
      ->check(CLI::IsMember({"rate", "energy", "both"}));
  bd->add_option("--quality", opt->quality, "quality axis: psnr, vmaf or both")
      ->check(CLI::IsMember({"psnr", "vmaf", "both"}));
  bd->callback([opt] { run_bd(*opt); });
}

}  // namespace tpxcli
