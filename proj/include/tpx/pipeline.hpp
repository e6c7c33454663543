#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tpx/evaluator.hpp"
#include "tpx/measurement.hpp"

namespace tpx {

// Adapter around an external encode->decode command pair. Templates carry
// the placeholders {input} (sequence path), {output} (bitstream path), {qp}
// and {switches}; the profile is rendered into {switches} as
// --Name=0/1 flags (plus derived switches) through the rename map, since
// real encoders use heterogeneous flag names. Metrics are parsed from the
// combined stdout+stderr of both commands by single-capture regexes.
struct PipelineConfig {
  std::string encode_cmd;
  std::string decode_cmd;
  std::string work_dir;  // bitstreams land here; empty = system temp
  std::map<std::string, std::string> rename;          // tool/switch -> flag name
  std::string switch_format = "--{name}={value}";     // {value} renders as 1/0
  std::map<std::string, std::string> parse;           // metric -> regex
  std::string energy_source;                          // measurement source spec; empty = none
  ConfidenceParams confidence;

  static PipelineConfig from_json(const std::string& json_text);
  static PipelineConfig from_file(const std::string& path);
  void validate() const;  // template placeholders checked at load time
};

std::string render_switches(const PipelineConfig& cfg, const ToolProfile& profile);

class PipelineEvaluator : public Evaluator {
 public:
  PipelineEvaluator(const ToolCatalog& catalog, PipelineConfig cfg, CodingConfig config);

  std::vector<RDCurve> analyze(const ToolProfile& profile,
                               const std::vector<std::string>& sequences,
                               const std::vector<int>& qps) override;
  // External processes and hardware counters: never parallel-safe.
  bool pure() const override { return false; }
  const ToolCatalog& catalog() const override { return catalog_; }

 private:
  RDPoint run_point(const ToolProfile& profile, const std::string& sequence, int qp);

  const ToolCatalog& catalog_;
  PipelineConfig cfg_;
  CodingConfig config_;
};

}  // namespace tpx
