#include "tpx/bdmetrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "tpx/error.hpp"

namespace tpx {

double psnr_yuv(double y, double u, double v) {
  if (!std::isfinite(y) || !std::isfinite(u) || !std::isfinite(v))
    throw ConfigError("psnr_yuv requires finite components");
  return (6.0 * y + u + v) / 8.0;
}

InterpolationMethod parse_method(const std::string& name) {
  if (name == "pchip") return InterpolationMethod::MonotonePiecewise;
  if (name == "poly") return InterpolationMethod::CubicPolynomial;
  throw ConfigError("unknown interpolation method '" + name + "' (expected pchip or poly)");
}

std::string to_string(InterpolationMethod method) {
  return method == InterpolationMethod::MonotonePiecewise ? "pchip" : "poly";
}

namespace {

// (quality, log10 cost) samples sorted by quality.
struct LogCurve {
  std::vector<double> q;
  std::vector<double> y;
};

LogCurve prepare(const std::vector<std::pair<double, double>>& points, const char* role) {
  if (points.size() < 4)
    throw ConfigError(std::string("BD ") + role + " curve needs at least 4 points, got " +
                      std::to_string(points.size()));
  std::vector<std::pair<double, double>> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  LogCurve curve;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto [cost, quality] = sorted[i];
    if (!(cost > 0.0) || !std::isfinite(cost))
      throw ConfigError(std::string("BD ") + role + " curve has nonpositive cost");
    if (!std::isfinite(quality))
      throw ConfigError(std::string("BD ") + role + " curve has non-finite quality");
    if (i > 0) {
      if (!(cost > sorted[i - 1].first))
        throw ConfigError(std::string("BD ") + role + " curve has duplicate cost values");
      if (!(quality > sorted[i - 1].second))
        throw ConfigError(std::string("non-monotone BD ") + role +
                          " curve: quality must rise strictly with cost");
    }
    curve.q.push_back(quality);
    curve.y.push_back(std::log10(cost));
  }
  return curve;
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Fritsch-Carlson monotone slopes with the usual three-point end rule.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), delta(n - 1), d(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (sign_of(s) != sign_of(d0))
      s = 0.0;
    else if (sign_of(d0) != sign_of(d1) && std::abs(s) > 3.0 * std::abs(d0))
      s = 3.0 * d0;
    return s;
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

// Integral of the monotone piecewise cubic over [lo, hi]; every piece is
// integrated in closed form on its clipped subinterval.
double pchip_integral(const LogCurve& curve, double lo, double hi) {
  const std::vector<double>& x = curve.q;
  const std::vector<double>& y = curve.y;
  const std::vector<double> d = pchip_slopes(x, y);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = std::max(lo, x[i]);
    const double b = std::min(hi, x[i + 1]);
    if (!(a < b)) continue;
    const double h = x[i + 1] - x[i];
    const double delta = (y[i + 1] - y[i]) / h;
    // cubic in u = q - x[i]
    const double c0 = y[i];
    const double c1 = d[i];
    const double c2 = (3.0 * delta - 2.0 * d[i] - d[i + 1]) / h;
    const double c3 = (d[i] + d[i + 1] - 2.0 * delta) / (h * h);
    auto antiderivative = [&](double u) {
      return u * (c0 + u * (c1 / 2.0 + u * (c2 / 3.0 + u * c3 / 4.0)));
    };
    total += antiderivative(b - x[i]) - antiderivative(a - x[i]);
  }
  return total;
}

// Solves a small dense system by Gaussian elimination with partial pivoting.
template <std::size_t N>
std::array<double, N> solve(std::array<std::array<double, N>, N> a, std::array<double, N> b) {
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < N; ++row)
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    if (a[col][col] == 0.0) throw ConfigError("degenerate BD polynomial fit");
    for (std::size_t row = col + 1; row < N; ++row) {
      const double f = a[row][col] / a[col][col];
      for (std::size_t k = col; k < N; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  std::array<double, N> x{};
  for (std::size_t row = N; row-- > 0;) {
    double s = b[row];
    for (std::size_t k = row + 1; k < N; ++k) s -= a[row][k] * x[k];
    x[row] = s / a[row][row];
  }
  return x;
}

// Least-squares cubic through (quality, log10 cost); an exact interpolation
// for the usual 4-point curves. Fitted in a centered, scaled variable for
// conditioning, which also makes the result invariant under quality shifts.
double poly_integral(const LogCurve& curve, double lo, double hi) {
  const std::size_t n = curve.q.size();
  const double center = (curve.q.front() + curve.q.back()) / 2.0;
  const double scale = (curve.q.back() - curve.q.front()) / 2.0;

  std::array<double, 4> coeff{};
  if (n == 4) {
    std::array<std::array<double, 4>, 4> a{};
    std::array<double, 4> b{};
    for (std::size_t i = 0; i < 4; ++i) {
      const double u = (curve.q[i] - center) / scale;
      a[i] = {1.0, u, u * u, u * u * u};
      b[i] = curve.y[i];
    }
    coeff = solve(a, b);
  } else {
    // normal equations of the degree-3 least-squares problem
    std::array<double, 7> moments{};
    std::array<double, 4> rhs{};
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (curve.q[i] - center) / scale;
      double p = 1.0;
      for (int k = 0; k < 7; ++k) {
        moments[k] += p;
        if (k < 4) rhs[k] += p * curve.y[i];
        p *= u;
      }
    }
    std::array<std::array<double, 4>, 4> a{};
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) a[r][c] = moments[r + c];
    coeff = solve(a, rhs);
  }

  auto antiderivative = [&](double q) {
    const double u = (q - center) / scale;
    return scale *
           u * (coeff[0] + u * (coeff[1] / 2.0 + u * (coeff[2] / 3.0 + u * coeff[3] / 4.0)));
  };
  return antiderivative(hi) - antiderivative(lo);
}

QualityInterval overlap_of(const LogCurve& ref, const LogCurve& test) {
  QualityInterval interval;
  interval.lo = std::max(ref.q.front(), test.q.front());
  interval.hi = std::min(ref.q.back(), test.q.back());
  if (!(interval.lo < interval.hi)) {
    std::ostringstream msg;
    msg << "empty overlap: quality ranges [" << ref.q.front() << ", " << ref.q.back()
        << "] and [" << test.q.front() << ", " << test.q.back() << "] do not intersect";
    throw ConfigError(msg.str());
  }
  return interval;
}

double mean_log_cost(const LogCurve& curve, const QualityInterval& interval,
                     InterpolationMethod method) {
  const double integral = method == InterpolationMethod::MonotonePiecewise
                              ? pchip_integral(curve, interval.lo, interval.hi)
                              : poly_integral(curve, interval.lo, interval.hi);
  return integral / (interval.hi - interval.lo);
}

double delta_percent(const LogCurve& ref, const LogCurve& test, const QualityInterval& interval,
                     InterpolationMethod method) {
  const double diff = mean_log_cost(test, interval, method) - mean_log_cost(ref, interval, method);
  return (std::pow(10.0, diff) - 1.0) * 100.0;
}

}  // namespace

double bd_delta(const std::vector<std::pair<double, double>>& ref,
                const std::vector<std::pair<double, double>>& test,
                InterpolationMethod method) {
  const LogCurve r = prepare(ref, "reference");
  const LogCurve t = prepare(test, "test");
  return delta_percent(r, t, overlap_of(r, t), method);
}

void validate_curve(RDCurve& curve) {
  auto fail = [&](const std::string& what) {
    throw ConfigError("curve '" + curve.profile_id + "'/'" + curve.sequence + "': " + what);
  };
  if (curve.points.size() < 4)
    fail("needs at least 4 points, got " + std::to_string(curve.points.size()));
  std::sort(curve.points.begin(), curve.points.end(),
            [](const RDPoint& a, const RDPoint& b) { return a.rate_kbps < b.rate_kbps; });
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const RDPoint& p = curve.points[i];
    if (!(p.rate_kbps > 0.0)) fail("rate must be positive at qp " + std::to_string(p.qp));
    if (p.energy_j && !(*p.energy_j > 0.0))
      fail("energy must be positive at qp " + std::to_string(p.qp));
    if (!std::isfinite(p.psnr_y) || !std::isfinite(p.psnr_u) || !std::isfinite(p.psnr_v))
      fail("PSNR components must be finite at qp " + std::to_string(p.qp));
    for (std::size_t j = i + 1; j < curve.points.size(); ++j)
      if (curve.points[j].qp == p.qp) fail("duplicate qp " + std::to_string(p.qp));
    if (i > 0) {
      const RDPoint& prev = curve.points[i - 1];
      if (!(psnr_yuv(p.psnr_y, p.psnr_u, p.psnr_v) >
            psnr_yuv(prev.psnr_y, prev.psnr_u, prev.psnr_v)))
        fail("PSNR_YUV must rise strictly with rate");
      if (!(p.vmaf > prev.vmaf)) fail("VMAF must rise strictly with rate");
    }
  }
}

BDResult bd_result(const RDCurve& ref, const RDCurve& test, InterpolationMethod method) {
  auto points = [](const RDCurve& curve, bool energy_axis, bool vmaf_axis) {
    std::vector<std::pair<double, double>> out;
    for (const RDPoint& p : curve.points) {
      const double cost = energy_axis ? p.energy_j.value() : p.rate_kbps;
      const double quality = vmaf_axis ? p.vmaf : psnr_yuv(p.psnr_y, p.psnr_u, p.psnr_v);
      out.emplace_back(cost, quality);
    }
    return out;
  };
  auto has_energy = [](const RDCurve& curve) {
    return std::all_of(curve.points.begin(), curve.points.end(),
                       [](const RDPoint& p) { return p.energy_j.has_value(); });
  };

  BDResult result;
  {
    const LogCurve r = prepare(points(ref, false, false), "reference");
    const LogCurve t = prepare(points(test, false, false), "test");
    result.overlap_psnr = overlap_of(r, t);
    result.bdr_psnr = delta_percent(r, t, result.overlap_psnr, method);
  }
  {
    const LogCurve r = prepare(points(ref, false, true), "reference");
    const LogCurve t = prepare(points(test, false, true), "test");
    result.overlap_vmaf = overlap_of(r, t);
    result.bdr_vmaf = delta_percent(r, t, result.overlap_vmaf, method);
  }
  if (has_energy(ref) && has_energy(test)) {
    result.bdde_psnr = bd_delta(points(ref, true, false), points(test, true, false), method);
    result.bdde_vmaf = bd_delta(points(ref, true, true), points(test, true, true), method);
  }
  return result;
}

namespace {

BDMean mean_of(const std::vector<const BDResult*>& group) {
  BDMean mean;
  double de_psnr = 0.0, de_vmaf = 0.0;
  int de_psnr_n = 0, de_vmaf_n = 0;
  for (const BDResult* bd : group) {
    mean.bdr_psnr += bd->bdr_psnr;
    mean.bdr_vmaf += bd->bdr_vmaf;
    if (bd->bdde_psnr) {
      de_psnr += *bd->bdde_psnr;
      ++de_psnr_n;
    }
    if (bd->bdde_vmaf) {
      de_vmaf += *bd->bdde_vmaf;
      ++de_vmaf_n;
    }
  }
  mean.count = static_cast<int>(group.size());
  mean.bdr_psnr /= mean.count;
  mean.bdr_vmaf /= mean.count;
  if (de_psnr_n > 0) mean.bdde_psnr = de_psnr / de_psnr_n;
  if (de_vmaf_n > 0) mean.bdde_vmaf = de_vmaf / de_vmaf_n;
  return mean;
}

}  // namespace

AggregateBD aggregate_bd(const std::vector<SequenceBD>& per_sequence) {
  if (per_sequence.empty()) throw ConfigError("aggregate_bd: empty sequence set");
  AggregateBD out;
  std::map<std::string, std::vector<const BDResult*>> classes;
  std::vector<const BDResult*> all;
  for (const SequenceBD& seq : per_sequence) {
    if (seq.sequence_class.empty())
      throw ConfigError("aggregate_bd: sequence '" + seq.sequence + "' has no class");
    classes[seq.sequence_class].push_back(&seq.bd);
    all.push_back(&seq.bd);
  }
  for (const auto& [name, group] : classes) out.per_class[name] = mean_of(group);
  out.overall = mean_of(all);
  return out;
}

BDResult mean_bd(const std::vector<BDResult>& results) {
  if (results.empty()) throw ConfigError("mean_bd: empty result set");
  std::vector<const BDResult*> ptrs;
  for (const BDResult& r : results) ptrs.push_back(&r);
  const BDMean mean = mean_of(ptrs);
  BDResult out;
  out.bdr_psnr = mean.bdr_psnr;
  out.bdr_vmaf = mean.bdr_vmaf;
  out.bdde_psnr = mean.bdde_psnr;
  out.bdde_vmaf = mean.bdde_vmaf;
  out.overlap_psnr = results.front().overlap_psnr;
  out.overlap_vmaf = results.front().overlap_vmaf;
  return out;
}

}  // namespace tpx
