#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tpx/profiles.hpp"

namespace tpx {

// One operating point of an encode->decode run at a fixed QP.
struct RDPoint {
  int qp = 0;
  double rate_kbps = 0.0;
  double psnr_y = 0.0;
  double psnr_u = 0.0;
  double psnr_v = 0.0;
  double vmaf = 0.0;
  std::optional<double> energy_j;  // decoding energy, present once measured
  std::optional<double> time_s;

  bool operator==(const RDPoint&) const = default;
};

// 6:1:1 weighted mean of the per-component PSNRs.
double psnr_yuv(double y, double u, double v);

struct RDCurve {
  std::string profile_id;
  std::string sequence;
  CodingConfig config = CodingConfig::RA;
  std::vector<RDPoint> points;
};

// Sorts points by rate and enforces the curve invariants: >=4 points, no
// duplicate QPs, strictly increasing PSNR_YUV and VMAF with rate.
void validate_curve(RDCurve& curve);

enum class InterpolationMethod {
  MonotonePiecewise,  // "pchip": monotone piecewise cubic, the default
  CubicPolynomial,    // "poly": least-squares cubic through (quality, log10 cost)
};

InterpolationMethod parse_method(const std::string& name);
std::string to_string(InterpolationMethod method);

struct QualityInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Mean log10-cost difference (test - ref) over the common quality interval,
// reported as (10^mean - 1)*100. Negative means the test curve is cheaper at
// equal quality. Points are (cost, quality) pairs.
double bd_delta(const std::vector<std::pair<double, double>>& ref,
                const std::vector<std::pair<double, double>>& test,
                InterpolationMethod method = InterpolationMethod::MonotonePiecewise);

// The four deltas of a test curve against a reference curve. Energy deltas
// are absent when either curve lacks energy data.
struct BDResult {
  double bdr_psnr = 0.0;
  double bdr_vmaf = 0.0;
  std::optional<double> bdde_psnr;
  std::optional<double> bdde_vmaf;
  QualityInterval overlap_psnr;
  QualityInterval overlap_vmaf;
};

BDResult bd_result(const RDCurve& ref, const RDCurve& test,
                   InterpolationMethod method = InterpolationMethod::MonotonePiecewise);

struct SequenceBD {
  std::string sequence;
  std::string sequence_class;  // grouping key, e.g. "A1".."F"
  BDResult bd;
};

struct BDMean {
  double bdr_psnr = 0.0;
  double bdr_vmaf = 0.0;
  std::optional<double> bdde_psnr;
  std::optional<double> bdde_vmaf;
  int count = 0;
};

struct AggregateBD {
  std::map<std::string, BDMean> per_class;
  BDMean overall;  // mean over every sequence, not over class means
};

AggregateBD aggregate_bd(const std::vector<SequenceBD>& per_sequence);

// Arithmetic mean of the four deltas across curves of one profile; optional
// deltas average over the values present.
BDResult mean_bd(const std::vector<BDResult>& results);

}  // namespace tpx
