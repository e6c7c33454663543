#include <sys/wait.h>

#include <cstdio>
#include <iostream>

#include "common.hpp"
#include "tpx/error.hpp"
#include "tpx/measurement.hpp"

namespace tpxcli {

namespace {

struct MeasureOptions {
  std::string source;
  std::string cmd;
  tpx::ConfidenceParams params;
  bool idle_per_run = false;
  std::string out_dir;
};

void run_task_command(const std::string& cmd) {
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (pipe == nullptr) throw tpx::EvalError("failed to launch task command: " + cmd);
  char buf[4096];
  while (std::fread(buf, 1, sizeof buf, pipe) > 0) {
  }
  const int status = pclose(pipe);
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
  if (code != 0)
    throw tpx::EvalError("task command failed with exit " + std::to_string(code) + ": " + cmd);
}

void run_measure(const MeasureOptions& opt, int& exit_code) {
  tpx::SourceSpec spec = tpx::parse_source_spec(opt.source);
  std::function<void()> task = spec.task;
  if (!task) {
    if (opt.cmd.empty())
      throw tpx::ConfigError("counter sources need --cmd, the workload to measure");
    const std::string cmd = opt.cmd;
    task = [cmd] { run_task_command(cmd); };
  } else if (!opt.cmd.empty()) {
    throw tpx::ConfigError("stub sources simulate their own workload; drop --cmd");
  }

  const tpx::MeasurementSeries series =
      tpx::measure_until_confident(task, *spec.source, opt.params, opt.idle_per_run);

  std::printf("runs:        %d\n", series.m());
  std::printf("mean energy: %.6f J\n", series.mean());
  std::printf("stddev:      %.6f J\n", series.m() >= 2 ? series.stddev() : 0.0);
  std::printf("idle power:  %.6f W\n", series.idle_power_w);
  std::printf("converged:   %s\n", series.converged ? "yes" : "no");

  nlohmann::json j;
  j["schema_version"] = 1;
  j["source"] = opt.source;
  j["params"] = {{"beta", opt.params.beta},
                 {"alpha", opt.params.alpha},
                 {"one_sided", opt.params.one_sided},
                 {"m_min", opt.params.m_min},
                 {"m_max", opt.params.m_max},
                 {"idle_per_run", opt.idle_per_run}};
  j["m"] = series.m();
  j["mean_j"] = series.mean();
  j["stddev_j"] = series.m() >= 2 ? series.stddev() : 0.0;
  j["idle_power_w"] = series.idle_power_w;
  j["converged"] = series.converged;
  j["samples_j"] = series.samples;
  j["durations_s"] = series.durations_s;
  if (!opt.out_dir.empty()) {
    write_text_file(opt.out_dir + "/measurement.json", j.dump(2) + "\n");
  } else {
    std::cout << j.dump(2) << "\n";
  }

  if (!series.converged) exit_code = 4;
}

}  // namespace

void register_measure(CLI::App& app, int& exit_code) {
  auto opt = std::make_shared<MeasureOptions>();
  CLI::App* cmd = app.add_subcommand(
      "measure", "repeat a workload until its mean energy is statistically settled");
  cmd->add_option("--source", opt->source,
                  "energy source: stub:constant[,...], stub:gauss[,...] or "
                  "counter:<path>[,modulus_uj=N]")
      ->required();
  cmd->add_option("--cmd", opt->cmd, "workload command (counter sources only)");
  cmd->add_option("--beta", opt->params.beta, "max relative confidence-interval width");
  cmd->add_option("--alpha", opt->params.alpha, "confidence probability");
  cmd->add_flag("--one-sided", opt->params.one_sided, "read alpha as a one-sided level");
  cmd->add_option("--m-min", opt->params.m_min, "minimum number of runs");
  cmd->add_option("--m-max", opt->params.m_max, "maximum number of runs");
  cmd->add_flag("--idle-per-run", opt->idle_per_run, "re-measure idle power before every run");
  cmd->add_option("--out", opt->out_dir, "directory for measurement.json (default: stdout)");
  cmd->callback([opt, &exit_code] { run_measure(*opt, exit_code); });
}

}  // namespace tpxcli
