#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "tpx/evaluator.hpp"

namespace tpx {

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
};

// Persistent map (profile hash, sequence, qp) -> RDPoint. Keys live under a
// catalog fingerprint so entries computed against an edited catalog are
// discarded instead of poisoning later runs. Thread-safe; lookups update the
// hit statistics, so they take the writer lock too.
class EvalCache {
 public:
  explicit EvalCache(std::string catalog_fingerprint);
  EvalCache(EvalCache&& other) noexcept;  // the mutex is made fresh, not moved

  std::optional<RDPoint> find(std::uint64_t profile_hash, const std::string& sequence,
                              int qp) const;
  void insert(std::uint64_t profile_hash, const std::string& sequence, int qp,
              const RDPoint& point);

  CacheStats stats() const;
  std::size_t size() const;
  const std::string& catalog_fingerprint() const { return fingerprint_; }

  void save(const std::string& path) const;
  // Entries with a mismatching fingerprint are dropped; a missing file yields
  // an empty cache.
  static EvalCache load(const std::string& path, const std::string& expected_fingerprint);

 private:
  using Key = std::tuple<std::uint64_t, std::string, int>;

  std::string fingerprint_;
  std::map<Key, RDPoint> entries_;
  mutable CacheStats stats_;
  mutable std::shared_mutex mutex_;
};

// Evaluator wrapper that serves analyze() from the cache and forwards only
// missing (sequence, qp) cells to the inner evaluator. Also counts unique
// profiles that reached the inner evaluator, which is the call count the
// search complexity bounds are stated over.
class CachedEvaluator : public Evaluator {
 public:
  CachedEvaluator(Evaluator& inner, EvalCache& cache);

  std::vector<RDCurve> analyze(const ToolProfile& profile,
                               const std::vector<std::string>& sequences,
                               const std::vector<int>& qps) override;
  bool pure() const override { return inner_.pure(); }
  const ToolCatalog& catalog() const override { return inner_.catalog(); }

  std::uint64_t unique_profiles_evaluated() const;

 private:
  Evaluator& inner_;
  EvalCache& cache_;
  std::set<std::uint64_t> evaluated_profiles_;
  mutable std::mutex profiles_mutex_;
};

}  // namespace tpx
