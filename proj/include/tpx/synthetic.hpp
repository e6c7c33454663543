#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tpx/evaluator.hpp"

namespace tpx {

// Multiplicative log-domain effect of using one tool: log10(rate) and
// log10(energy) offsets plus an additive quality offset in dB / VMAF points.
struct ToolEffect {
  double d_log_rate = 0.0;
  double d_log_energy = 0.0;
  double d_quality = 0.0;
};

struct InteractionEffect {
  std::string tool_a;
  std::string tool_b;
  ToolEffect effect;  // applied when both tools are enabled
};

struct LandscapeSpec {
  CodingConfig config = CodingConfig::RA;
  std::vector<RDPoint> base;                // anchor curve, one point per QP
  std::map<std::string, ToolEffect> tools;  // missing tools have zero effect
  std::vector<InteractionEffect> interactions;
  double noise_stddev = 0.0;  // log10-energy Gaussian noise; 0 disables
  std::uint64_t seed = 1;
};

LandscapeSpec landscape_from_json(const std::string& json_text);
LandscapeSpec landscape_from_file(const std::string& path);
std::string landscape_to_json(const LandscapeSpec& spec);

// Desk-scale stand-in for a codec pipeline. Effects are defined relative to
// the CTC profile: a profile's curve is the base curve shifted by
// sum((bit - ctc_bit) * delta) over tools plus the interaction terms on
// pairs of enabled tools, so the CTC profile maps exactly to the base
// anchors and single toggles produce directly interpretable BD values.
// Without interactions the per-tool log-cost contributions are independent
// of all other bits (separable), which makes greedy provably optimal.
class SyntheticLandscape : public Evaluator {
 public:
  SyntheticLandscape(const ToolCatalog& catalog, LandscapeSpec spec);

  std::vector<RDCurve> analyze(const ToolProfile& profile,
                               const std::vector<std::string>& sequences,
                               const std::vector<int>& qps) override;
  bool pure() const override { return true; }
  const ToolCatalog& catalog() const override { return catalog_; }

  const LandscapeSpec& spec() const { return spec_; }
  CodingConfig config() const { return spec_.config; }

 private:
  RDCurve curve_for(const ToolProfile& profile, const std::string& sequence,
                    const std::vector<int>& qps) const;

  const ToolCatalog& catalog_;
  LandscapeSpec spec_;
  ToolProfile ctc_;
};

}  // namespace tpx
