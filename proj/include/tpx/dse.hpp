#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tpx/bdmetrics.hpp"
#include "tpx/cache.hpp"
#include "tpx/evaluator.hpp"
#include "tpx/profiles.hpp"

namespace tpx {

enum class Objective { BddePsnr, BddeVmaf };

Objective parse_objective(const std::string& name);
std::string to_string(Objective objective);

struct DseOptions {
  Objective objective = Objective::BddePsnr;
  InterpolationMethod method = InterpolationMethod::MonotonePiecewise;
  std::vector<std::string> sequences = {"train"};
  std::vector<int> qps = {22, 27, 32, 37};
  // Search restricted to these tools (others pinned at CTC); empty = all
  // applicable tools.
  std::vector<std::string> tool_subset;
  bool sequential_accept = false;
  int max_iterations = 100;
  int jobs = 1;  // candidate fan-out, honored only for pure evaluators
};

struct EvaluatedProfile {
  ToolProfile profile;
  BDResult bd;             // mean across training sequences, vs baseline
  double objective = 0.0;  // the BDDE value being minimized
  double bdr = 0.0;        // companion rate delta on the same quality metric
};

struct TraceRecord {
  int iteration = 0;        // sweep number, 1-based
  std::string tool;         // "reference" or the toggled tool's name
  ToolProfile profile;
  std::optional<BDResult> bd;  // absent when evaluation/BD failed
  double objective = 0.0;      // NaN when bd is absent
  bool accepted = false;
  std::string error;  // rejected-with-error diagnostic, empty otherwise
  std::uint64_t evaluator_calls = 0;  // unique profile evaluations so far
};

enum class StopReason {
  Converged,      // next reference equals the current one
  BreakRule,      // every candidate >= previous iteration's reference BDDE
  CycleDetected,  // next reference was already a reference before
  IterationCap,
  Aborted,  // evaluator failure; partial trace preserved
};

std::string to_string(StopReason reason);

struct DseResult {
  ToolProfile baseline;
  ToolProfile final_reference;
  EvaluatedProfile best;  // objective argmin over every evaluated profile
  int iterations = 0;     // completed candidate sweeps
  StopReason stop_reason = StopReason::Converged;
  std::uint64_t evaluator_calls = 0;
  std::vector<TraceRecord> trace;
  std::vector<EvaluatedProfile> evaluated;  // unique profiles, insertion order
  std::string abort_error;                  // set when stop_reason == Aborted
};

// Greedy search: per sweep, evaluate the reference, then every single-bit
// toggle in catalog order; every toggle whose BDDE against the baseline is
// strictly below the reference's is folded into the next reference (batch
// acceptance). Stops on convergence, on the break rule (all candidates >=
// the previous reference's BDDE, skipped on sweep 1), on a repeated
// reference, or at the iteration cap. An optional external cache persists
// evaluations across runs.
DseResult greedy_dse(Evaluator& evaluator, CodingConfig config, const DseOptions& options,
                     EvalCache* cache = nullptr);

// Evaluates all 2^n profiles spanned by the subset (remaining tools pinned
// at CTC defaults); results sorted by objective ascending, ties by profile
// hash. The default cap keeps full search off the 2^28 full space.
std::vector<EvaluatedProfile> full_search(Evaluator& evaluator, CodingConfig config,
                                          const std::vector<std::string>& subset,
                                          const DseOptions& options,
                                          std::size_t max_subset = 20,
                                          EvalCache* cache = nullptr);

// Non-dominated subset under (minimize BDR, minimize BDDE), returned sorted
// by BDR then BDDE then hash.
std::vector<EvaluatedProfile> pareto_front(const std::vector<EvaluatedProfile>& results);

enum class SensitivityCategory { MajorIncrease, MinorIncrease, MinorDecrease, MajorDecrease };

std::string to_string(SensitivityCategory category);

struct SensitivityEntry {
  double toggle_bdde = 0.0;  // iteration-1 reading as traced
  double effect = 0.0;       // sign-normalized: the tool's usage effect on EE
  SensitivityCategory category = SensitivityCategory::MinorIncrease;
};

// Categorizes each tool from its iteration-1 toggle. For a tool enabled in
// the baseline the toggle disables it, so a positive BDDE reading means
// energy rises without the tool: the tool increases energy efficiency. For
// an initially-disabled tool the reading is negated first, so the category
// always describes the effect of using the tool. |effect| <= 1% is Minor.
std::map<std::string, SensitivityEntry> sensitivity(const std::vector<TraceRecord>& trace);

// Argmin of BDDE; ties broken by lower BDR, then lower profile hash.
EvaluatedProfile select_ee(const std::vector<EvaluatedProfile>& evaluated);

struct EbeOptions {
  double bdr_cap = 10.0;  // strict upper bound on BDR
  int shortlist = 3;
  std::vector<std::string> refine_sequences = {"refine"};
  std::vector<int> refine_qps = {22, 27, 32, 37};
};

struct EbeSelection {
  EvaluatedProfile chosen;    // with refined BD values
  std::vector<EvaluatedProfile> shortlist;  // pre-refinement picks, rule order
};

// Energy-at-bounded-efficiency-loss selection: keep BDR < cap, shortlist the
// k lowest BDDE+BDR sums, re-evaluate those with the refinement evaluator,
// return the refined argmin of BDDE+BDR.
EbeSelection select_ebe(const std::vector<EvaluatedProfile>& evaluated,
                        Evaluator& refine_evaluator, const DseOptions& options,
                        const EbeOptions& ebe = {});

// Trace JSONL round-trip (one record per line) for the sensitivity command
// and for audit tooling.
std::string trace_record_to_json(const TraceRecord& record);
TraceRecord trace_record_from_json(const ToolCatalog& catalog, const std::string& line);

}  // namespace tpx
