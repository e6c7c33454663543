#include "tpx/cache.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json_detail.hpp"
#include "tpx/error.hpp"

namespace tpx {

namespace {

std::string hash_hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace

EvalCache::EvalCache(std::string catalog_fingerprint)
    : fingerprint_(std::move(catalog_fingerprint)) {}

EvalCache::EvalCache(EvalCache&& other) noexcept
    : fingerprint_(std::move(other.fingerprint_)),
      entries_(std::move(other.entries_)),
      stats_(other.stats_) {}

std::optional<RDPoint> EvalCache::find(std::uint64_t profile_hash, const std::string& sequence,
                                       int qp) const {
  // Lookups update the hit statistics, so every access takes the writer lock.
  const std::unique_lock<std::shared_mutex> lock(mutex_);
  const auto it = entries_.find(Key{profile_hash, sequence, qp});
  if (it == entries_.end()) {
    ++stats_.misses;
    return std::nullopt;
  }
  ++stats_.hits;
  return it->second;
}

void EvalCache::insert(std::uint64_t profile_hash, const std::string& sequence, int qp,
                       const RDPoint& point) {
  const std::unique_lock<std::shared_mutex> lock(mutex_);
  entries_[Key{profile_hash, sequence, qp}] = point;
}

CacheStats EvalCache::stats() const {
  const std::shared_lock<std::shared_mutex> lock(mutex_);
  return stats_;
}

std::size_t EvalCache::size() const {
  const std::shared_lock<std::shared_mutex> lock(mutex_);
  return entries_.size();
}

void EvalCache::save(const std::string& path) const {
  nlohmann::json j;
  j["catalog_fingerprint"] = fingerprint_;
  j["entries"] = nlohmann::json::array();
  {
    const std::shared_lock<std::shared_mutex> lock(mutex_);
    for (const auto& [key, point] : entries_) {
      nlohmann::json entry;
      entry["profile_hash"] = hash_hex64(std::get<0>(key));
      entry["sequence"] = std::get<1>(key);
      entry["qp"] = std::get<2>(key);
      entry["point"] = detail::point_to_json(point);
      j["entries"].push_back(std::move(entry));
    }
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write cache file '" + path + "'");
  out << j.dump(2) << "\n";
}

EvalCache EvalCache::load(const std::string& path, const std::string& expected_fingerprint) {
  EvalCache cache(expected_fingerprint);
  std::ifstream in(path);
  if (!in) return cache;  // missing file: start empty

  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cache file '" + path + "' is malformed: " + e.what());
  }
  if (!j.is_object() || !j.contains("catalog_fingerprint") || !j.contains("entries"))
    throw ConfigError("cache file '" + path + "' has an unexpected layout");
  if (j.at("catalog_fingerprint").get<std::string>() != expected_fingerprint)
    return cache;  // catalog changed: every stored point is suspect, drop all

  for (const auto& entry : j.at("entries")) {
    const std::string hex = entry.at("profile_hash").get<std::string>();
    std::uint64_t hash = 0;
    try {
      hash = std::stoull(hex, nullptr, 16);
    } catch (const std::exception&) {
      throw ConfigError("cache file '" + path + "' has invalid profile hash '" + hex + "'");
    }
    cache.entries_[Key{hash, entry.at("sequence").get<std::string>(),
                       entry.at("qp").get<int>()}] =
        detail::point_from_json(entry.at("point"), "cache file '" + path + "'");
  }
  return cache;
}

CachedEvaluator::CachedEvaluator(Evaluator& inner, EvalCache& cache)
    : inner_(inner), cache_(cache) {
  if (cache.catalog_fingerprint() != inner.catalog().fingerprint())
    throw ConfigError("cache fingerprint does not match the evaluator's catalog");
}

std::vector<RDCurve> CachedEvaluator::analyze(const ToolProfile& profile,
                                              const std::vector<std::string>& sequences,
                                              const std::vector<int>& qps) {
  const std::uint64_t hash = profile.canonical_hash();
  bool reached_inner = false;

  std::vector<RDCurve> out;
  out.reserve(sequences.size());
  for (const std::string& sequence : sequences) {
    std::map<int, RDPoint> have;
    std::vector<int> missing;
    for (int qp : qps) {
      if (auto p = cache_.find(hash, sequence, qp))
        have[qp] = *p;
      else
        missing.push_back(qp);
    }
    if (!missing.empty()) {
      const auto fetched = inner_.analyze(profile, {sequence}, missing);
      reached_inner = true;
      if (fetched.size() != 1)
        throw EvalError("inner evaluator returned " + std::to_string(fetched.size()) +
                        " curves for one sequence");
      for (const RDPoint& p : fetched.front().points) {
        cache_.insert(hash, sequence, p.qp, p);
        have[p.qp] = p;
      }
    }
    RDCurve curve;
    curve.profile_id = profile.hash_hex();
    curve.sequence = sequence;
    curve.config = profile.config();
    for (int qp : qps) {
      const auto it = have.find(qp);
      if (it == have.end())
        throw EvalError("evaluator returned no point for qp " + std::to_string(qp) +
                        " of sequence '" + sequence + "'");
      curve.points.push_back(it->second);
    }
    out.push_back(std::move(curve));
  }

  if (reached_inner) {
    const std::lock_guard<std::mutex> lock(profiles_mutex_);
    evaluated_profiles_.insert(hash);
  }
  return out;
}

std::uint64_t CachedEvaluator::unique_profiles_evaluated() const {
  const std::lock_guard<std::mutex> lock(profiles_mutex_);
  return evaluated_profiles_.size();
}

}  // namespace tpx
