#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace tpx {

struct ConfidenceParams {
  double beta = 0.02;   // max relative half-width of the confidence interval
  double alpha = 0.99;  // confidence probability
  bool one_sided = false;
  int m_min = 5;    // floor: the test may not pass before this many samples
  int m_max = 1000;

  void validate() const;
};

struct MeasurementSeries {
  std::vector<double> samples;      // net energy per run, joules
  std::vector<double> durations_s;  // wall time per run
  double idle_power_w = 0.0;
  bool converged = false;

  int m() const { return static_cast<int>(samples.size()); }
  double mean() const;
  double stddev() const;  // sample standard deviation, n-1 denominator
};

// Stopping rule: 2*(sigma/sqrt(m))*t_alpha(m-1) < beta*mean — the Student-t
// confidence interval of the mean must be narrower than beta times the mean —
// plus the m_min floor. sigma = 0 passes once the floor is met. Requires
// m >= 2; a nonpositive mean signals that idle subtraction consumed the whole
// measurement and is an error.
bool converged(const MeasurementSeries& series, const ConfidenceParams& params);

// Cumulative energy counter plus the clock used to time runs. Stub sources
// virtualize both so harness logic is identical for real and simulated runs.
class EnergySource {
 public:
  virtual ~EnergySource() = default;

  virtual double read_energy_j() = 0;  // cumulative; may wrap at the modulus
  virtual double wrap_modulus_j() const { return 0.0; }  // 0 = non-wrapping
  virtual double now_s();
  virtual void idle_wait_s(double seconds);
};

// Text file holding a monotonically increasing integer microjoule counter
// (RAPL style) with a declared wrap modulus.
class CounterFileSource : public EnergySource {
 public:
  explicit CounterFileSource(std::string path, double wrap_modulus_uj = 0.0);
  double read_energy_j() override;
  double wrap_modulus_j() const override { return wrap_modulus_j_; }

 private:
  std::string path_;
  double wrap_modulus_j_;
};

// Wall-clock x constant-power stub on a virtual clock. task() consumes one
// run of the simulated workload; gross energy includes the idle floor so the
// harness' idle subtraction is exercised end to end.
class ConstantStubSource : public EnergySource {
 public:
  ConstantStubSource(double run_energy_j, double run_seconds, double idle_power_w);
  double read_energy_j() override { return energy_j_; }
  double now_s() override { return clock_s_; }
  void idle_wait_s(double seconds) override;
  std::function<void()> task();

 protected:
  virtual double next_run_energy_j() { return run_energy_j_; }

  double run_energy_j_;
  double run_seconds_;
  double idle_power_w_;
  double energy_j_ = 0.0;
  double clock_s_ = 0.0;
};

// Constant stub whose per-run energy is Gaussian with the given coefficient
// of variation; deterministic per seed.
class GaussianStubSource : public ConstantStubSource {
 public:
  GaussianStubSource(double mean_energy_j, double cv, double run_seconds,
                     double idle_power_w, std::uint64_t seed);

 protected:
  double next_run_energy_j() override;

 private:
  double cv_;
  std::uint64_t rng_state_;
};

// Scripted counter readings and timestamps, consumed one per call; the wrap
// and fault paths are tested through this source.
class ReplaySource : public EnergySource {
 public:
  ReplaySource(std::vector<double> energy_readings_j, std::vector<double> times_s,
               double wrap_modulus_j = 0.0);
  double read_energy_j() override;
  double now_s() override;
  void idle_wait_s(double) override {}
  double wrap_modulus_j() const override { return wrap_modulus_j_; }

 private:
  std::vector<double> energy_readings_j_;
  std::vector<double> times_s_;
  double wrap_modulus_j_;
  std::size_t energy_pos_ = 0;
  std::size_t time_pos_ = 0;
};

// Parses "stub:constant[,k=v...]", "stub:gauss,mean_j=..,cv=..[,seed=..]",
// "counter:<path>[,modulus_uj=..]". For stub specs the returned task drives
// the simulation; for counter sources the caller supplies the task.
struct SourceSpec {
  std::unique_ptr<EnergySource> source;
  std::function<void()> task;  // empty for counter sources
};
SourceSpec parse_source_spec(const std::string& spec);

// Runs the task repeatedly, recording net energy per run (gross minus idle
// power times run duration; idle is measured once over the first run's
// duration, or before every run when idle_per_run is set) until the stopping
// rule passes or m_max is reached. The whole session holds a process-global
// lock: exactly one measurement at a time.
MeasurementSeries measure_until_confident(const std::function<void()>& task,
                                          EnergySource& source,
                                          const ConfidenceParams& params,
                                          bool idle_per_run = false);

}  // namespace tpx
