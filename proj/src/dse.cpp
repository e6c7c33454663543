#include "tpx/dse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <optional>
#include <set>

#include "json_detail.hpp"
#include "tpx/error.hpp"

namespace tpx {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double objective_bdde(Objective objective, const BDResult& bd, const std::string& what) {
  const std::optional<double>& v =
      objective == Objective::BddePsnr ? bd.bdde_psnr : bd.bdde_vmaf;
  if (!v)
    throw ConfigError(what + ": objective " + to_string(objective) +
                      " needs energy data on both curves");
  return *v;
}

double objective_bdr(Objective objective, const BDResult& bd) {
  return objective == Objective::BddePsnr ? bd.bdr_psnr : bd.bdr_vmaf;
}

void validate_options(const DseOptions& options) {
  if (options.sequences.empty()) throw ConfigError("search needs at least one sequence");
  if (options.qps.empty()) throw ConfigError("search needs at least one qp");
  if (options.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (options.jobs < 1) throw ConfigError("jobs must be >= 1");
}

// Search order is catalog order restricted to the subset; the subset itself
// may arrive in any order but must name distinct applicable tools.
std::vector<std::string> resolve_subset(const ToolCatalog& catalog, CodingConfig config,
                                        const std::vector<std::string>& subset) {
  std::vector<std::string> tools;
  if (subset.empty()) {
    for (const ToolDescriptor* t : catalog.applicable(config)) tools.push_back(t->name);
    return tools;
  }
  std::set<std::string> wanted;
  for (const std::string& name : subset) {
    const ToolDescriptor* t = catalog.find(name);
    if (t == nullptr) throw ConfigError("unknown tool '" + name + "' in search subset");
    if (!t->applies_to(config))
      throw ConfigError("tool '" + name + "' is not applicable under " + to_string(config));
    if (!wanted.insert(name).second)
      throw ConfigError("duplicate tool '" + name + "' in search subset");
  }
  for (const ToolDescriptor* t : catalog.applicable(config))
    if (wanted.count(t->name) != 0) tools.push_back(t->name);
  return tools;
}

// Scores profiles against a fixed baseline: mean BD across the training
// sequences, reduced to the objective BDDE and its companion BDR.
class BaselineScorer {
 public:
  BaselineScorer(Evaluator& evaluator, const DseOptions& options)
      : evaluator_(evaluator), options_(options) {}

  void set_baseline(std::vector<RDCurve> curves) { baseline_curves_ = std::move(curves); }

  EvaluatedProfile score(const ToolProfile& profile) const {
    const auto curves = evaluator_.analyze(profile, options_.sequences, options_.qps);
    if (curves.size() != baseline_curves_.size())
      throw EvalError("evaluator returned " + std::to_string(curves.size()) +
                      " curves, expected " + std::to_string(baseline_curves_.size()));
    std::vector<BDResult> per_sequence;
    per_sequence.reserve(curves.size());
    for (std::size_t i = 0; i < curves.size(); ++i)
      per_sequence.push_back(bd_result(baseline_curves_[i], curves[i], options_.method));
    const BDResult mean = mean_bd(per_sequence);
    const std::string what = "profile " + profile.hash_hex();
    return EvaluatedProfile{profile, mean, objective_bdde(options_.objective, mean, what),
                            objective_bdr(options_.objective, mean)};
  }

 private:
  Evaluator& evaluator_;
  const DseOptions& options_;
  std::vector<RDCurve> baseline_curves_;
};

using Scored = std::pair<std::optional<EvaluatedProfile>, std::string>;

// ConfigError means the candidate's data is unusable (no overlap, broken
// monotonicity): rejected-with-error. EvalError means infrastructure broke
// and escapes to abort the search.
Scored score_or_error(const BaselineScorer& scorer, const ToolProfile& profile) {
  try {
    return {scorer.score(profile), std::string()};
  } catch (const ConfigError& e) {
    return {std::nullopt, e.what()};
  }
}

bool better_ee(const EvaluatedProfile& a, const EvaluatedProfile& b) {
  if (a.objective != b.objective) return a.objective < b.objective;
  if (a.bdr != b.bdr) return a.bdr < b.bdr;
  return a.profile.canonical_hash() < b.profile.canonical_hash();
}

}  // namespace

Objective parse_objective(const std::string& name) {
  if (name == "bdde-psnr") return Objective::BddePsnr;
  if (name == "bdde-vmaf") return Objective::BddeVmaf;
  throw ConfigError("unknown objective '" + name + "' (expected bdde-psnr or bdde-vmaf)");
}

std::string to_string(Objective objective) {
  return objective == Objective::BddePsnr ? "bdde-psnr" : "bdde-vmaf";
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Converged: return "converged";
    case StopReason::BreakRule: return "break_rule";
    case StopReason::CycleDetected: return "cycle_detected";
    case StopReason::IterationCap: return "iteration_cap";
    case StopReason::Aborted: return "aborted";
  }
  return "unknown";
}

std::string to_string(SensitivityCategory category) {
  switch (category) {
    case SensitivityCategory::MajorIncrease: return "major-increase";
    case SensitivityCategory::MinorIncrease: return "minor-increase";
    case SensitivityCategory::MinorDecrease: return "minor-decrease";
    case SensitivityCategory::MajorDecrease: return "major-decrease";
  }
  return "unknown";
}

DseResult greedy_dse(Evaluator& evaluator, CodingConfig config, const DseOptions& options,
                     EvalCache* external_cache) {
  validate_options(options);
  const ToolCatalog& catalog = evaluator.catalog();
  const std::vector<std::string> tools = resolve_subset(catalog, config, options.tool_subset);

  std::optional<EvalCache> local_cache;
  EvalCache* cache = external_cache;
  if (cache == nullptr) cache = &local_cache.emplace(catalog.fingerprint());
  CachedEvaluator cached(evaluator, *cache);

  const ToolProfile baseline = ctc_profile(catalog, config);
  BaselineScorer scorer(cached, options);

  DseResult result{baseline,
                   baseline,
                   EvaluatedProfile{baseline, BDResult{}, kNaN, kNaN},
                   0,
                   StopReason::Converged,
                   0,
                   {},
                   {},
                   {}};

  std::set<std::uint64_t> recorded;
  auto record_profile = [&](const EvaluatedProfile& ep) {
    if (recorded.insert(ep.profile.canonical_hash()).second) result.evaluated.push_back(ep);
  };

  // A ConfigError here is caller misconfiguration and propagates; an
  // EvalError is an evaluator failure and yields an aborted (empty) result.
  try {
    scorer.set_baseline(cached.analyze(baseline, options.sequences, options.qps));
  } catch (const EvalError& e) {
    result.stop_reason = StopReason::Aborted;
    result.abort_error = e.what();
    result.evaluator_calls = cached.unique_profiles_evaluated();
    return result;
  }

  const bool parallel = options.jobs > 1 && cached.pure() && !options.sequential_accept;

  ToolProfile reference = baseline;
  std::set<std::uint64_t> reference_hashes{baseline.canonical_hash()};
  std::optional<double> prev_ref_objective;

  struct Outcome {
    std::string tool;
    ToolProfile profile;
    std::optional<EvaluatedProfile> ep;
    std::string error;
    bool accepted = false;
  };

  try {
    for (int i = 1;; ++i) {
      const EvaluatedProfile ref_eval = scorer.score(reference);
      record_profile(ref_eval);
      result.trace.push_back(TraceRecord{i, "reference", reference, ref_eval.bd,
                                         ref_eval.objective, false, "",
                                         cached.unique_profiles_evaluated()});

      std::vector<Outcome> outcomes;
      outcomes.reserve(tools.size());
      ToolProfile next = reference;

      if (options.sequential_accept) {
        // Alternative acceptance: the reference advances within the sweep,
        // so each toggle is judged against the best profile so far.
        ToolProfile working = reference;
        double working_objective = ref_eval.objective;
        for (const std::string& tool : tools) {
          const ToolProfile candidate = toggle(working, tool);
          Outcome oc{tool, candidate, std::nullopt, std::string(), false};
          const Scored scored = score_or_error(scorer, candidate);
          oc.ep = scored.first;
          oc.error = scored.second;
          if (oc.ep) {
            record_profile(*oc.ep);
            if (oc.ep->objective < working_objective) {
              oc.accepted = true;
              working = candidate;
              working_objective = oc.ep->objective;
            }
          }
          result.trace.push_back(TraceRecord{
              i, tool, candidate, oc.ep ? std::optional<BDResult>(oc.ep->bd) : std::nullopt,
              oc.ep ? oc.ep->objective : kNaN, oc.accepted, oc.error,
              cached.unique_profiles_evaluated()});
          outcomes.push_back(std::move(oc));
        }
        next = working;
      } else {
        // Batch acceptance: all candidates are judged against this sweep's
        // fixed reference, then every accepted toggle folds into the next
        // reference at once.
        std::vector<ToolProfile> candidates;
        candidates.reserve(tools.size());
        for (const std::string& tool : tools) candidates.push_back(toggle(reference, tool));

        std::vector<std::optional<Scored>> slots(candidates.size());
        if (parallel && candidates.size() > 1) {
          const int jobs = std::min<int>(options.jobs, static_cast<int>(candidates.size()));
          std::vector<std::future<void>> workers;
          workers.reserve(jobs);
          for (int w = 0; w < jobs; ++w) {
            workers.push_back(std::async(std::launch::async, [&, w] {
              for (std::size_t k = static_cast<std::size_t>(w); k < candidates.size();
                   k += static_cast<std::size_t>(jobs))
                slots[k] = score_or_error(scorer, candidates[k]);
            }));
          }
          for (auto& worker : workers) worker.get();  // rethrows EvalError
        } else {
          for (std::size_t k = 0; k < candidates.size(); ++k)
            slots[k] = score_or_error(scorer, candidates[k]);
        }

        for (std::size_t k = 0; k < candidates.size(); ++k) {
          Outcome oc{tools[k], candidates[k], slots[k]->first, slots[k]->second, false};
          if (oc.ep) {
            record_profile(*oc.ep);
            oc.accepted = oc.ep->objective < ref_eval.objective;
            if (oc.accepted) next = toggle(next, oc.tool);
          }
          result.trace.push_back(TraceRecord{
              i, oc.tool, oc.profile, oc.ep ? std::optional<BDResult>(oc.ep->bd) : std::nullopt,
              oc.ep ? oc.ep->objective : kNaN, oc.accepted, oc.error,
              cached.unique_profiles_evaluated()});
          outcomes.push_back(std::move(oc));
        }
      }

      result.iterations = i;
      result.final_reference = reference;

      // Stop rules, in order: the break rule (needs a previous sweep to
      // compare against), then convergence, then the cycle guard, then the
      // iteration cap.
      bool all_ge_prev = prev_ref_objective.has_value() && !outcomes.empty();
      if (all_ge_prev) {
        for (const Outcome& oc : outcomes) {
          // Errored candidates carry no reading and count as "not better".
          if (oc.ep && oc.ep->objective < *prev_ref_objective) {
            all_ge_prev = false;
            break;
          }
        }
      }
      if (all_ge_prev) {
        result.stop_reason = StopReason::BreakRule;
        break;
      }
      if (next == reference) {
        result.stop_reason = StopReason::Converged;
        break;
      }
      if (reference_hashes.count(next.canonical_hash()) != 0) {
        result.stop_reason = StopReason::CycleDetected;
        break;
      }
      if (i >= options.max_iterations) {
        result.stop_reason = StopReason::IterationCap;
        break;
      }

      prev_ref_objective = ref_eval.objective;
      reference = next;
      reference_hashes.insert(next.canonical_hash());
    }
  } catch (const EvalError& e) {
    result.stop_reason = StopReason::Aborted;
    result.abort_error = e.what();
  }

  result.evaluator_calls = cached.unique_profiles_evaluated();
  if (!result.evaluated.empty()) result.best = select_ee(result.evaluated);
  return result;
}

std::vector<EvaluatedProfile> full_search(Evaluator& evaluator, CodingConfig config,
                                          const std::vector<std::string>& subset,
                                          const DseOptions& options, std::size_t max_subset,
                                          EvalCache* external_cache) {
  validate_options(options);
  const ToolCatalog& catalog = evaluator.catalog();
  const std::vector<std::string> tools = resolve_subset(catalog, config, subset);
  if (tools.size() > max_subset) {
    std::string space = tools.size() < 64
                            ? std::to_string(1ull << tools.size())
                            : "2^" + std::to_string(tools.size());
    throw ConfigError("full search over " + std::to_string(tools.size()) + " tools means " +
                      space + " profiles; the cap is " + std::to_string(max_subset) +
                      " tools, restrict the subset");
  }

  std::optional<EvalCache> local_cache;
  EvalCache* cache = external_cache;
  if (cache == nullptr) cache = &local_cache.emplace(catalog.fingerprint());
  CachedEvaluator cached(evaluator, *cache);

  const ToolProfile baseline = ctc_profile(catalog, config);
  BaselineScorer scorer(cached, options);
  scorer.set_baseline(cached.analyze(baseline, options.sequences, options.qps));

  const std::uint64_t count = 1ull << tools.size();
  auto profile_for_mask = [&](std::uint64_t mask) {
    std::map<std::string, bool> usage = baseline.usage();
    for (std::size_t k = 0; k < tools.size(); ++k)
      usage[tools[k]] = ((mask >> k) & 1ull) != 0ull;
    return ToolProfile(config, std::move(usage));
  };

  std::vector<std::optional<EvaluatedProfile>> slots(count);
  if (options.jobs > 1 && cached.pure() && count > 1) {
    const int jobs = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(options.jobs), count));
    std::vector<std::future<void>> workers;
    workers.reserve(jobs);
    for (int w = 0; w < jobs; ++w) {
      workers.push_back(std::async(std::launch::async, [&, w] {
        for (std::uint64_t mask = static_cast<std::uint64_t>(w); mask < count;
             mask += static_cast<std::uint64_t>(jobs))
          slots[mask] = scorer.score(profile_for_mask(mask));
      }));
    }
    for (auto& worker : workers) worker.get();
  } else {
    for (std::uint64_t mask = 0; mask < count; ++mask)
      slots[mask] = scorer.score(profile_for_mask(mask));
  }

  std::vector<EvaluatedProfile> results;
  results.reserve(count);
  for (auto& slot : slots) results.push_back(std::move(*slot));
  std::sort(results.begin(), results.end(), better_ee);
  return results;
}

std::vector<EvaluatedProfile> pareto_front(const std::vector<EvaluatedProfile>& results) {
  std::vector<EvaluatedProfile> front;
  for (const EvaluatedProfile& a : results) {
    bool dominated = false;
    for (const EvaluatedProfile& b : results) {
      if (b.bdr <= a.bdr && b.objective <= a.objective &&
          (b.bdr < a.bdr || b.objective < a.objective)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) front.push_back(a);
  }
  std::sort(front.begin(), front.end(), [](const EvaluatedProfile& a, const EvaluatedProfile& b) {
    if (a.bdr != b.bdr) return a.bdr < b.bdr;
    if (a.objective != b.objective) return a.objective < b.objective;
    return a.profile.canonical_hash() < b.profile.canonical_hash();
  });
  return front;
}

std::map<std::string, SensitivityEntry> sensitivity(const std::vector<TraceRecord>& trace) {
  const TraceRecord* reference = nullptr;
  for (const TraceRecord& r : trace) {
    if (r.iteration == 1 && r.tool == "reference") {
      reference = &r;
      break;
    }
  }
  if (reference == nullptr) throw ConfigError("trace has no iteration-1 reference record");

  std::map<std::string, SensitivityEntry> out;
  for (const TraceRecord& r : trace) {
    if (r.iteration != 1 || r.tool == "reference") continue;
    if (!r.error.empty() || !r.bd || !std::isfinite(r.objective)) continue;
    SensitivityEntry entry;
    entry.toggle_bdde = r.objective;
    const bool enabled_in_baseline = reference->profile.enabled(r.tool);
    entry.effect = enabled_in_baseline ? r.objective : -r.objective;
    const bool major = std::abs(entry.effect) > 1.0;
    if (entry.effect >= 0.0)
      entry.category =
          major ? SensitivityCategory::MajorIncrease : SensitivityCategory::MinorIncrease;
    else
      entry.category =
          major ? SensitivityCategory::MajorDecrease : SensitivityCategory::MinorDecrease;
    out[r.tool] = entry;
  }
  if (out.empty()) throw ConfigError("trace has no usable iteration-1 toggle records");
  return out;
}

EvaluatedProfile select_ee(const std::vector<EvaluatedProfile>& evaluated) {
  if (evaluated.empty()) throw ConfigError("no evaluated profiles to select from");
  const EvaluatedProfile* best = &evaluated.front();
  for (const EvaluatedProfile& ep : evaluated)
    if (better_ee(ep, *best)) best = &ep;
  return *best;
}

EbeSelection select_ebe(const std::vector<EvaluatedProfile>& evaluated,
                        Evaluator& refine_evaluator, const DseOptions& options,
                        const EbeOptions& ebe) {
  if (evaluated.empty()) throw ConfigError("no evaluated profiles to select from");
  if (ebe.shortlist < 1) throw ConfigError("shortlist size must be >= 1");
  if (ebe.refine_sequences.empty() || ebe.refine_qps.empty())
    throw ConfigError("refinement needs at least one sequence and one qp");

  std::vector<EvaluatedProfile> pool;
  for (const EvaluatedProfile& ep : evaluated)
    if (ep.bdr < ebe.bdr_cap) pool.push_back(ep);
  if (pool.empty()) {
    char cap[32];
    std::snprintf(cap, sizeof(cap), "%g", ebe.bdr_cap);
    throw ConfigError("no evaluated profile stays under the BDR cap of " + std::string(cap) +
                      "%; raise the cap or search a gentler subset");
  }

  auto by_sum = [](const EvaluatedProfile& a, const EvaluatedProfile& b) {
    const double sa = a.objective + a.bdr;
    const double sb = b.objective + b.bdr;
    if (sa != sb) return sa < sb;
    return a.profile.canonical_hash() < b.profile.canonical_hash();
  };
  std::sort(pool.begin(), pool.end(), by_sum);
  if (pool.size() > static_cast<std::size_t>(ebe.shortlist))
    pool.erase(pool.begin() + ebe.shortlist, pool.end());

  // Re-score the shortlist on the refinement data, against the refinement
  // evaluator's own CTC baseline, and pick the refined argmin of BDDE + BDR.
  const CodingConfig config = pool.front().profile.config();
  const ToolProfile refine_baseline = ctc_profile(refine_evaluator.catalog(), config);
  const auto baseline_curves =
      refine_evaluator.analyze(refine_baseline, ebe.refine_sequences, ebe.refine_qps);

  std::optional<EvaluatedProfile> chosen;
  for (const EvaluatedProfile& ep : pool) {
    const auto curves = refine_evaluator.analyze(ep.profile, ebe.refine_sequences, ebe.refine_qps);
    if (curves.size() != baseline_curves.size())
      throw EvalError("refinement evaluator returned a mismatched curve count");
    std::vector<BDResult> per_sequence;
    for (std::size_t i = 0; i < curves.size(); ++i)
      per_sequence.push_back(bd_result(baseline_curves[i], curves[i], options.method));
    const BDResult mean = mean_bd(per_sequence);
    EvaluatedProfile refined{
        ep.profile, mean,
        objective_bdde(options.objective, mean, "profile " + ep.profile.hash_hex()),
        objective_bdr(options.objective, mean)};
    if (!chosen || by_sum(refined, *chosen)) chosen = refined;
  }
  return EbeSelection{*chosen, pool};
}

std::string trace_record_to_json(const TraceRecord& record) {
  nlohmann::json j;
  j["iteration"] = record.iteration;
  j["tool"] = record.tool;
  j["profile"] = nlohmann::json::parse(emit_profile(record.profile));
  j["bd"] = record.bd ? detail::bd_to_json(*record.bd) : nlohmann::json(nullptr);
  j["objective"] =
      std::isfinite(record.objective) ? nlohmann::json(record.objective) : nlohmann::json(nullptr);
  j["accepted"] = record.accepted;
  j["error"] = record.error;
  j["evaluator_calls"] = record.evaluator_calls;
  return j.dump();
}

TraceRecord trace_record_from_json(const ToolCatalog& catalog, const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("trace line is malformed: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("trace line must be a JSON object");
  for (const char* key : {"iteration", "tool", "profile", "accepted"})
    if (!j.contains(key))
      throw ConfigError(std::string("trace line is missing field '") + key + "'");

  TraceRecord record{
      j.at("iteration").get<int>(),
      j.at("tool").get<std::string>(),
      parse_profile(catalog, j.at("profile").dump()),
      std::nullopt,
      kNaN,
      j.at("accepted").get<bool>(),
      j.contains("error") ? j.at("error").get<std::string>() : std::string(),
      j.contains("evaluator_calls") ? j.at("evaluator_calls").get<std::uint64_t>() : 0};
  if (j.contains("bd") && !j.at("bd").is_null())
    record.bd = detail::bd_from_json(j.at("bd"), "trace line");
  if (j.contains("objective") && !j.at("objective").is_null())
    record.objective = j.at("objective").get<double>();
  return record;
}

}  // namespace tpx
