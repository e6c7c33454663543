#pragma once

// Shared fixtures for the unit and acceptance suites: deterministic curve
// builders, a scratch-directory guard, a subprocess runner for the CLI, and
// an exception matcher that works identically under doctest and the
// acceptance harness.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpx/bdmetrics.hpp"

namespace testutil {

// Scratch directory under the system temp root, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    const auto base = std::filesystem::temp_directory_path();
    for (int i = 0; i < 100000; ++i) {
      auto candidate = base / (tag + "_" + std::to_string(counter_++));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create a scratch directory for " + tag);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& relative = "") const {
    return relative.empty() ? path_.string() : (path_ / relative).string();
  }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // combined stdout + stderr
};

// Runs the built CLI binary with the given argument string.
inline CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(TPX_BIN_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("popen failed for: " + cmd);
  CliResult r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
  return r;
}

struct PointSpec {
  int qp;
  double rate;
  double psnr;  // used for all three components
  double vmaf;
  double energy = -1.0;  // <= 0 means absent
};

inline tpx::RDCurve make_curve(const std::string& profile_id, const std::string& sequence,
                               const std::vector<PointSpec>& points,
                               tpx::CodingConfig config = tpx::CodingConfig::RA) {
  tpx::RDCurve curve;
  curve.profile_id = profile_id;
  curve.sequence = sequence;
  curve.config = config;
  for (const PointSpec& s : points) {
    tpx::RDPoint p;
    p.qp = s.qp;
    p.rate_kbps = s.rate;
    p.psnr_y = p.psnr_u = p.psnr_v = s.psnr;
    p.vmaf = s.vmaf;
    if (s.energy > 0.0) p.energy_j = s.energy;
    curve.points.push_back(p);
  }
  return curve;
}

// The coordinates of the pinned two-codec fixture, as (cost, quality) pairs.
inline std::vector<std::pair<double, double>> hm_rate_psnr() {
  return {{2550, 37.88}, {4560, 39.39}, {8870, 40.42}, {29420, 41.19}};
}
inline std::vector<std::pair<double, double>> vtm_rate_psnr() {
  return {{1968, 38.53}, {3620, 39.85}, {7536, 40.73}, {27857, 41.39}};
}
inline std::vector<std::pair<double, double>> hm_energy_psnr() {
  return {{672.64, 37.88}, {753.15, 39.39}, {848.09, 40.42}, {1103.9, 41.19}};
}
inline std::vector<std::pair<double, double>> vtm_energy_psnr() {
  return {{1310, 38.53}, {1449.9, 39.85}, {1603, 40.73}, {1956.4, 41.39}};
}
inline std::vector<std::pair<double, double>> hm_energy_vmaf() {
  return {{672.64, 80.13}, {753.15, 88.56}, {848.09, 94.23}, {1103.9, 97.79}};
}
inline std::vector<std::pair<double, double>> vtm_energy_vmaf() {
  return {{1310, 84.29}, {1449.9, 91.54}, {1603, 96.00}, {1956.4, 98.60}};
}

// Runs fn and checks that it throws E with a message containing `needle`.
// Returns an empty string on success, a diagnostic otherwise.
template <typename E, typename Fn>
std::string throws_containing(Fn&& fn, const std::string& needle) {
  try {
    fn();
  } catch (const E& e) {
    const std::string what = e.what();
    if (what.find(needle) != std::string::npos) return {};
    return "message '" + what + "' lacks '" + needle + "'";
  } catch (const std::exception& e) {
    return std::string("threw the wrong type: ") + e.what();
  }
  return "did not throw";
}

}  // namespace testutil
