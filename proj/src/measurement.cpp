#include "tpx/measurement.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "tpx/error.hpp"
#include "tpx/stats.hpp"

namespace tpx {

namespace {

// splitmix64 step mapped to the open unit interval.
double uniform01(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double standard_normal(std::uint64_t& state) {
  const double u1 = uniform01(state);
  const double u2 = uniform01(state);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::map<std::string, std::string> parse_kv_list(const std::string& text,
                                                 const std::string& spec) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ConfigError("malformed option '" + item + "' in source spec '" + spec + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

double kv_number(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback, const std::string& spec) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid numeric value for '" + key + "' in source spec '" + spec + "'");
  }
}

void reject_unknown_keys(const std::map<std::string, std::string>& kv,
                         std::initializer_list<const char*> known,
                         const std::string& spec) {
  for (const auto& [key, value] : kv) {
    (void)value;
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok) throw ConfigError("unknown option '" + key + "' in source spec '" + spec + "'");
  }
}

// Corrects a counter delta for at most one wrap of the hardware register.
double wrap_corrected(double delta, double modulus_j, const char* what) {
  if (delta >= 0.0) return delta;
  if (modulus_j > 0.0) {
    delta += modulus_j;
    if (delta >= 0.0) return delta;
  }
  throw EvalError(std::string(what) +
                  ": energy counter decreased beyond the declared wrap modulus");
}

}  // namespace

void ConfidenceParams::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
  if (!(alpha > 0.5 && alpha < 1.0)) throw ConfigError("alpha must lie in (0.5, 1)");
  if (m_min < 2) throw ConfigError("m_min must be at least 2");
  if (m_max < m_min) throw ConfigError("m_max must be >= m_min");
}

double MeasurementSeries::mean() const {
  if (samples.empty()) throw ConfigError("measurement series is empty");
  double sum = 0.0;
  for (double s : samples) sum += s;
  return sum / static_cast<double>(samples.size());
}

double MeasurementSeries::stddev() const {
  if (samples.size() < 2) throw ConfigError("sample stddev needs at least two samples");
  const double mu = mean();
  double acc = 0.0;
  for (double s : samples) acc += (s - mu) * (s - mu);
  return std::sqrt(acc / static_cast<double>(samples.size() - 1));
}

bool converged(const MeasurementSeries& series, const ConfidenceParams& params) {
  params.validate();
  if (series.m() < 2) throw ConfigError("convergence check needs at least two samples");
  const double mu = series.mean();
  if (mu <= 0.0)
    throw EvalError("measurement mean is non-positive; idle subtraction exceeded the signal");
  if (series.m() < params.m_min) return false;
  const double sigma = series.stddev();
  if (sigma == 0.0) return true;
  const double m = static_cast<double>(series.m());
  const double t = t_critical(params.alpha, m - 1.0, params.one_sided);
  const double interval = 2.0 * (sigma / std::sqrt(m)) * t;
  return interval < params.beta * mu;
}

double EnergySource::now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void EnergySource::idle_wait_s(double seconds) {
  if (seconds > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

CounterFileSource::CounterFileSource(std::string path, double wrap_modulus_uj)
    : path_(std::move(path)), wrap_modulus_j_(wrap_modulus_uj / 1e6) {}

double CounterFileSource::read_energy_j() {
  std::ifstream in(path_);
  if (!in) throw EvalError("cannot open energy counter file '" + path_ + "'");
  double microjoules = 0.0;
  in >> microjoules;
  if (in.fail()) throw EvalError("energy counter file '" + path_ + "' is not numeric");
  return microjoules / 1e6;
}

ConstantStubSource::ConstantStubSource(double run_energy_j, double run_seconds,
                                       double idle_power_w)
    : run_energy_j_(run_energy_j), run_seconds_(run_seconds), idle_power_w_(idle_power_w) {
  if (!(run_seconds_ > 0.0)) throw ConfigError("stub run_seconds must be positive");
}

void ConstantStubSource::idle_wait_s(double seconds) {
  if (seconds < 0.0) seconds = 0.0;
  clock_s_ += seconds;
  energy_j_ += idle_power_w_ * seconds;
}

std::function<void()> ConstantStubSource::task() {
  // The counter reading is gross energy: task consumption plus the idle
  // floor that accrues while the task runs. Idle subtraction then recovers
  // next_run_energy_j() exactly.
  return [this] {
    clock_s_ += run_seconds_;
    energy_j_ += next_run_energy_j() + idle_power_w_ * run_seconds_;
  };
}

GaussianStubSource::GaussianStubSource(double mean_energy_j, double cv, double run_seconds,
                                       double idle_power_w, std::uint64_t seed)
    : ConstantStubSource(mean_energy_j, run_seconds, idle_power_w), cv_(cv), rng_state_(seed) {
  if (!(mean_energy_j > 0.0)) throw ConfigError("stub mean_j must be positive");
  if (cv_ < 0.0) throw ConfigError("stub cv must be non-negative");
}

double GaussianStubSource::next_run_energy_j() {
  const double mean = run_energy_j_;
  double sample = mean * (1.0 + cv_ * standard_normal(rng_state_));
  // Clamped to a small positive floor so a pathological draw cannot make the
  // counter run backwards.
  if (sample < 1e-9 * mean) sample = 1e-9 * mean;
  return sample;
}

ReplaySource::ReplaySource(std::vector<double> energy_readings_j, std::vector<double> times_s,
                           double wrap_modulus_j)
    : energy_readings_j_(std::move(energy_readings_j)),
      times_s_(std::move(times_s)),
      wrap_modulus_j_(wrap_modulus_j) {}

double ReplaySource::read_energy_j() {
  if (energy_pos_ >= energy_readings_j_.size())
    throw EvalError("replay source exhausted energy readings");
  return energy_readings_j_[energy_pos_++];
}

double ReplaySource::now_s() {
  if (time_pos_ >= times_s_.size()) throw EvalError("replay source exhausted time readings");
  return times_s_[time_pos_++];
}

SourceSpec parse_source_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw ConfigError("source spec '" + spec + "' must look like kind:details");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);

  SourceSpec out;
  if (kind == "stub") {
    const auto comma = rest.find(',');
    const std::string variant = rest.substr(0, comma == std::string::npos ? rest.size() : comma);
    const std::string opts = comma == std::string::npos ? std::string() : rest.substr(comma + 1);
    const auto kv = parse_kv_list(opts, spec);
    if (variant == "constant") {
      reject_unknown_keys(kv, {"energy_j", "seconds", "idle_w"}, spec);
      auto src = std::make_unique<ConstantStubSource>(kv_number(kv, "energy_j", 1.0, spec),
                                                      kv_number(kv, "seconds", 0.01, spec),
                                                      kv_number(kv, "idle_w", 2.0, spec));
      out.task = src->task();
      out.source = std::move(src);
    } else if (variant == "gauss") {
      reject_unknown_keys(kv, {"mean_j", "cv", "seconds", "idle_w", "seed"}, spec);
      auto src = std::make_unique<GaussianStubSource>(
          kv_number(kv, "mean_j", 100.0, spec), kv_number(kv, "cv", 0.01, spec),
          kv_number(kv, "seconds", 0.01, spec), kv_number(kv, "idle_w", 2.0, spec),
          static_cast<std::uint64_t>(kv_number(kv, "seed", 1.0, spec)));
      out.task = src->task();
      out.source = std::move(src);
    } else {
      throw ConfigError("unknown stub variant '" + variant + "' in source spec '" + spec + "'");
    }
  } else if (kind == "counter") {
    const auto comma = rest.find(',');
    const std::string path = rest.substr(0, comma == std::string::npos ? rest.size() : comma);
    if (path.empty()) throw ConfigError("counter source spec '" + spec + "' needs a file path");
    const std::string opts = comma == std::string::npos ? std::string() : rest.substr(comma + 1);
    const auto kv = parse_kv_list(opts, spec);
    reject_unknown_keys(kv, {"modulus_uj"}, spec);
    out.source = std::make_unique<CounterFileSource>(path, kv_number(kv, "modulus_uj", 0.0, spec));
  } else {
    throw ConfigError("unknown energy source kind '" + kind + "' in source spec '" + spec + "'");
  }
  return out;
}

MeasurementSeries measure_until_confident(const std::function<void()>& task,
                                          EnergySource& source, const ConfidenceParams& params,
                                          bool idle_per_run) {
  params.validate();
  if (!task) throw ConfigError("measurement task is empty");

  // Energy counters are system-wide; concurrent measurements would read each
  // other's consumption, so runs are serialized process-wide.
  static std::mutex measurement_mutex;
  const std::lock_guard<std::mutex> lock(measurement_mutex);

  MeasurementSeries series;
  const double modulus = source.wrap_modulus_j();
  double idle_power_w = 0.0;
  bool idle_known = false;

  while (series.m() < params.m_max) {
    const double t0 = source.now_s();
    const double e0 = source.read_energy_j();
    task();
    const double e1 = source.read_energy_j();
    const double t1 = source.now_s();
    const double duration = t1 - t0;
    if (!(duration > 0.0))
      throw EvalError("task duration is not positive; the source clock did not advance");
    const double gross = wrap_corrected(e1 - e0, modulus, "task run");

    if (!idle_known || idle_per_run) {
      // The idle window mirrors the run just observed so the subtraction
      // removes the same baseline load the run absorbed.
      const double i0 = source.read_energy_j();
      source.idle_wait_s(duration);
      const double i1 = source.read_energy_j();
      const double idle = wrap_corrected(i1 - i0, modulus, "idle window");
      idle_power_w = idle / duration;
      idle_known = true;
    }

    series.samples.push_back(gross - idle_power_w * duration);
    series.durations_s.push_back(duration);
    series.idle_power_w = idle_power_w;

    if (series.m() >= 2 && converged(series, params)) {
      series.converged = true;
      return series;
    }
  }
  series.converged = false;
  return series;
}

}  // namespace tpx
