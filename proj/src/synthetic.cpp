#include "tpx/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json_detail.hpp"
#include "tpx/error.hpp"

namespace tpx {

namespace {

using nlohmann::json;

ToolEffect effect_from_json(const json& j, const std::string& where) {
  ToolEffect e;
  e.d_log_rate = detail::number_or(j, "d_log_rate", 0.0, where);
  e.d_log_energy = detail::number_or(j, "d_log_energy", 0.0, where);
  e.d_quality = detail::number_or(j, "d_quality", 0.0, where);
  return e;
}

json effect_to_json(const ToolEffect& e) {
  json j;
  j["d_log_rate"] = e.d_log_rate;
  j["d_log_energy"] = e.d_log_energy;
  j["d_quality"] = e.d_quality;
  return j;
}

// One deterministic standard-normal draw keyed by (seed, profile, sequence, qp).
double keyed_normal(std::uint64_t seed, std::uint64_t profile_hash,
                    const std::string& sequence, int qp) {
  std::uint64_t state = seed ^ 0x6a09e667f3bcc909ull;
  auto mix = [&state](std::uint64_t v) {
    state ^= v + 0x9e3779b97f4a7c15ull + (state << 6) + (state >> 2);
  };
  mix(profile_hash);
  for (unsigned char c : sequence) mix(c);
  mix(static_cast<std::uint64_t>(qp) * 0x100000001b3ull);
  // splitmix64 output scramble, then Box-Muller.
  auto next01 = [&state] {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53 + 0x1.0p-54;
  };
  const double u1 = next01();
  const double u2 = next01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace

LandscapeSpec landscape_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("landscape JSON is malformed: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("landscape JSON must be an object");

  LandscapeSpec spec;
  if (!j.contains("config") || !j.at("config").is_string())
    throw ConfigError("landscape: missing string field 'config'");
  spec.config = parse_config(j.at("config").get<std::string>());

  if (!j.contains("base") || !j.at("base").is_array())
    throw ConfigError("landscape: missing array field 'base'");
  for (const auto& p : j.at("base"))
    spec.base.push_back(detail::point_from_json(p, "landscape base"));

  if (j.contains("tools")) {
    if (!j.at("tools").is_object()) throw ConfigError("landscape: 'tools' must be an object");
    for (const auto& [name, eff] : j.at("tools").items())
      spec.tools[name] = effect_from_json(eff, "landscape tool '" + name + "'");
  }
  if (j.contains("interactions")) {
    if (!j.at("interactions").is_array())
      throw ConfigError("landscape: 'interactions' must be an array");
    for (const auto& item : j.at("interactions")) {
      if (!item.is_object() || !item.contains("tools") || !item.at("tools").is_array() ||
          item.at("tools").size() != 2)
        throw ConfigError("landscape: each interaction needs a two-element 'tools' array");
      InteractionEffect ie;
      ie.tool_a = item.at("tools").at(0).get<std::string>();
      ie.tool_b = item.at("tools").at(1).get<std::string>();
      ie.effect = effect_from_json(item, "landscape interaction " + ie.tool_a + "/" + ie.tool_b);
      spec.interactions.push_back(std::move(ie));
    }
  }
  spec.noise_stddev = detail::number_or(j, "noise_stddev", 0.0, "landscape");
  if (spec.noise_stddev < 0.0) throw ConfigError("landscape: noise_stddev must be >= 0");
  spec.seed = static_cast<std::uint64_t>(detail::number_or(j, "seed", 1.0, "landscape"));
  return spec;
}

LandscapeSpec landscape_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open landscape file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return landscape_from_json(buffer.str());
}

std::string landscape_to_json(const LandscapeSpec& spec) {
  json j;
  j["config"] = to_string(spec.config);
  j["base"] = json::array();
  for (const auto& p : spec.base) j["base"].push_back(detail::point_to_json(p));
  j["tools"] = json::object();
  for (const auto& [name, eff] : spec.tools) j["tools"][name] = effect_to_json(eff);
  j["interactions"] = json::array();
  for (const auto& ie : spec.interactions) {
    json item = effect_to_json(ie.effect);
    item["tools"] = {ie.tool_a, ie.tool_b};
    j["interactions"].push_back(item);
  }
  j["noise_stddev"] = spec.noise_stddev;
  j["seed"] = spec.seed;
  return j.dump(2) + "\n";
}

SyntheticLandscape::SyntheticLandscape(const ToolCatalog& catalog, LandscapeSpec spec)
    : catalog_(catalog), spec_(std::move(spec)), ctc_(ctc_profile(catalog, spec_.config)) {
  if (spec_.base.size() < 4)
    throw ConfigError("landscape base curve needs at least four points");
  std::sort(spec_.base.begin(), spec_.base.end(),
            [](const RDPoint& a, const RDPoint& b) { return a.rate_kbps < b.rate_kbps; });
  for (std::size_t i = 0; i < spec_.base.size(); ++i) {
    const RDPoint& p = spec_.base[i];
    if (!(p.rate_kbps > 0.0)) throw ConfigError("landscape base rates must be positive");
    if (!p.energy_j || !(*p.energy_j > 0.0))
      throw ConfigError("landscape base points need positive energy_j");
    if (i > 0) {
      const RDPoint& q = spec_.base[i - 1];
      const bool monotone = p.rate_kbps > q.rate_kbps &&
                            psnr_yuv(p.psnr_y, p.psnr_u, p.psnr_v) >
                                psnr_yuv(q.psnr_y, q.psnr_u, q.psnr_v) &&
                            p.vmaf > q.vmaf && *p.energy_j > *q.energy_j;
      if (!monotone) throw ConfigError("non-monotone base curve in landscape");
      if (p.qp == q.qp) throw ConfigError("landscape base has duplicate qp values");
    }
  }
  auto check_tool = [this](const std::string& name, const std::string& role) {
    const ToolDescriptor* t = catalog_.find(name);
    if (t == nullptr)
      throw ConfigError("landscape " + role + " references unknown tool '" + name + "'");
    if (!t->applies_to(spec_.config))
      throw ConfigError("landscape " + role + " tool '" + name + "' is not applicable under " +
                        to_string(spec_.config));
  };
  for (const auto& [name, eff] : spec_.tools) {
    (void)eff;
    check_tool(name, "effect");
  }
  for (const auto& ie : spec_.interactions) {
    check_tool(ie.tool_a, "interaction");
    check_tool(ie.tool_b, "interaction");
    if (ie.tool_a == ie.tool_b)
      throw ConfigError("landscape interaction must name two distinct tools");
  }
}

std::vector<RDCurve> SyntheticLandscape::analyze(const ToolProfile& profile,
                                                 const std::vector<std::string>& sequences,
                                                 const std::vector<int>& qps) {
  if (profile.config() != spec_.config)
    throw ConfigError("profile config " + to_string(profile.config()) +
                      " does not match landscape config " + to_string(spec_.config));
  std::vector<RDCurve> curves;
  curves.reserve(sequences.size());
  for (const std::string& sequence : sequences) curves.push_back(curve_for(profile, sequence, qps));
  return curves;
}

RDCurve SyntheticLandscape::curve_for(const ToolProfile& profile, const std::string& sequence,
                                      const std::vector<int>& qps) const {
  // Signed deviation from CTC: enabling a CTC-disabled tool adds +delta,
  // disabling a CTC-enabled tool adds -delta, matching bits add nothing.
  double d_log_rate = 0.0;
  double d_log_energy = 0.0;
  double d_quality = 0.0;
  for (const auto& [name, eff] : spec_.tools) {
    const double s = (profile.enabled(name) ? 1.0 : 0.0) - (ctc_.enabled(name) ? 1.0 : 0.0);
    if (s == 0.0) continue;
    d_log_rate += s * eff.d_log_rate;
    d_log_energy += s * eff.d_log_energy;
    d_quality += s * eff.d_quality;
  }
  for (const auto& ie : spec_.interactions) {
    const double both = profile.enabled(ie.tool_a) && profile.enabled(ie.tool_b) ? 1.0 : 0.0;
    const double ctc_both = ctc_.enabled(ie.tool_a) && ctc_.enabled(ie.tool_b) ? 1.0 : 0.0;
    const double s = both - ctc_both;
    if (s == 0.0) continue;
    d_log_rate += s * ie.effect.d_log_rate;
    d_log_energy += s * ie.effect.d_log_energy;
    d_quality += s * ie.effect.d_quality;
  }

  RDCurve curve;
  curve.profile_id = profile.hash_hex();
  curve.sequence = sequence;
  curve.config = spec_.config;
  for (int qp : qps) {
    const auto it = std::find_if(spec_.base.begin(), spec_.base.end(),
                                 [qp](const RDPoint& p) { return p.qp == qp; });
    if (it == spec_.base.end())
      throw ConfigError("landscape base curve has no point for qp " + std::to_string(qp));
    RDPoint p = *it;
    p.rate_kbps *= std::pow(10.0, d_log_rate);
    double log_energy = std::log10(*p.energy_j) + d_log_energy;
    if (spec_.noise_stddev > 0.0)
      log_energy += spec_.noise_stddev *
                    keyed_normal(spec_.seed, profile.canonical_hash(), sequence, qp);
    const double energy = std::pow(10.0, log_energy);
    if (p.time_s) *p.time_s *= energy / *p.energy_j;
    p.energy_j = energy;
    p.psnr_y += d_quality;
    p.psnr_u += d_quality;
    p.psnr_v += d_quality;
    p.vmaf = std::clamp(p.vmaf + d_quality, 0.0, 100.0);
    curve.points.push_back(p);
  }
  // Partial fetches (cache refills below four points) skip shape validation;
  // BD preparation re-checks monotonicity on whatever it is handed.
  if (curve.points.size() >= 4) validate_curve(curve);
  return curve;
}

}  // namespace tpx
