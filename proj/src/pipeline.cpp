#include "tpx/pipeline.hpp"

#include <sys/wait.h>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "json_detail.hpp"
#include "tpx/error.hpp"
#include "tpx/profiles.hpp"

namespace tpx {

namespace {

constexpr const char* kRequiredMetrics[] = {"rate_kbps", "psnr_y", "psnr_u", "psnr_v", "vmaf"};

std::string replace_all(std::string text, const std::string& needle, const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return text;
}

void require_placeholder(const std::string& tmpl, const char* placeholder, const char* which) {
  if (tmpl.find(placeholder) == std::string::npos)
    throw ConfigError(std::string(which) + " template is missing the " + placeholder +
                      " placeholder");
}

struct RunResult {
  int exit_code = 0;
  std::string output;
};

RunResult run_command(const std::string& cmd) {
  const std::string full = cmd + " 2>&1";
  FILE* pipe = popen(full.c_str(), "r");
  if (pipe == nullptr) throw EvalError("failed to launch command: " + cmd);
  RunResult result;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
  return result;
}

std::string tail_of(const std::string& text, std::size_t max_chars = 400) {
  if (text.size() <= max_chars) return text;
  return "..." + text.substr(text.size() - max_chars);
}

std::string sanitize_token(const std::string& text) {
  std::string out;
  for (char c : text)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("pipeline config JSON is malformed: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("pipeline config must be a JSON object");

  PipelineConfig cfg;
  auto get_string = [&j](const char* key, bool required) {
    if (!j.contains(key)) {
      if (required) throw ConfigError(std::string("pipeline config: missing field '") + key + "'");
      return std::string();
    }
    if (!j.at(key).is_string())
      throw ConfigError(std::string("pipeline config: field '") + key + "' must be a string");
    return j.at(key).get<std::string>();
  };
  cfg.encode_cmd = get_string("encode_cmd", true);
  cfg.decode_cmd = get_string("decode_cmd", true);
  cfg.work_dir = get_string("work_dir", false);
  if (j.contains("switch_format")) cfg.switch_format = get_string("switch_format", false);
  cfg.energy_source = get_string("energy_source", false);

  auto get_map = [&j](const char* key) {
    std::map<std::string, std::string> out;
    if (!j.contains(key)) return out;
    if (!j.at(key).is_object())
      throw ConfigError(std::string("pipeline config: field '") + key + "' must be an object");
    for (const auto& [k, v] : j.at(key).items()) {
      if (!v.is_string())
        throw ConfigError("pipeline config: '" + std::string(key) + "." + k +
                          "' must be a string");
      out[k] = v.get<std::string>();
    }
    return out;
  };
  cfg.rename = get_map("rename");
  cfg.parse = get_map("parse");

  if (j.contains("confidence")) {
    const auto& c = j.at("confidence");
    if (!c.is_object()) throw ConfigError("pipeline config: 'confidence' must be an object");
    cfg.confidence.beta = detail::number_or(c, "beta", cfg.confidence.beta, "confidence");
    cfg.confidence.alpha = detail::number_or(c, "alpha", cfg.confidence.alpha, "confidence");
    if (c.contains("one_sided")) cfg.confidence.one_sided = c.at("one_sided").get<bool>();
    cfg.confidence.m_min =
        static_cast<int>(detail::number_or(c, "m_min", cfg.confidence.m_min, "confidence"));
    cfg.confidence.m_max =
        static_cast<int>(detail::number_or(c, "m_max", cfg.confidence.m_max, "confidence"));
  }

  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open pipeline config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

void PipelineConfig::validate() const {
  if (encode_cmd.empty()) throw ConfigError("pipeline config: encode_cmd is empty");
  if (decode_cmd.empty()) throw ConfigError("pipeline config: decode_cmd is empty");
  require_placeholder(encode_cmd, "{input}", "encode_cmd");
  require_placeholder(encode_cmd, "{output}", "encode_cmd");
  require_placeholder(encode_cmd, "{qp}", "encode_cmd");
  require_placeholder(encode_cmd, "{switches}", "encode_cmd");
  require_placeholder(decode_cmd, "{input}", "decode_cmd");
  require_placeholder(switch_format, "{name}", "switch_format");
  require_placeholder(switch_format, "{value}", "switch_format");
  for (const char* metric : kRequiredMetrics) {
    const auto it = parse.find(metric);
    if (it == parse.end())
      throw ConfigError(std::string("pipeline config: parse is missing a regex for '") + metric +
                        "'");
    try {
      const std::regex re(it->second);
      if (re.mark_count() < 1)
        throw ConfigError(std::string("pipeline config: regex for '") + metric +
                          "' needs one capture group");
    } catch (const std::regex_error& e) {
      throw ConfigError(std::string("pipeline config: regex for '") + metric +
                        "' does not compile: " + e.what());
    }
  }
  if (!energy_source.empty()) confidence.validate();
}

std::string render_switches(const PipelineConfig& cfg, const ToolProfile& profile) {
  const auto render_one = [&cfg](const std::string& name, bool value) {
    std::string flag = replace_all(cfg.switch_format, "{name}", name);
    return replace_all(flag, "{value}", value ? "1" : "0");
  };
  const auto flag_name = [&cfg](const std::string& name) {
    const auto it = cfg.rename.find(name);
    return it == cfg.rename.end() ? name : it->second;
  };

  std::string out;
  for (const auto& [name, enabled] : profile.usage()) {
    if (!out.empty()) out.push_back(' ');
    out += render_one(flag_name(name), enabled);
  }
  for (const auto& [name, value] : derived_switches(profile)) {
    if (!out.empty()) out.push_back(' ');
    out += render_one(flag_name(name), value);
  }
  return out;
}

PipelineEvaluator::PipelineEvaluator(const ToolCatalog& catalog, PipelineConfig cfg,
                                     CodingConfig config)
    : catalog_(catalog), cfg_(std::move(cfg)), config_(config) {
  cfg_.validate();
}

std::vector<RDCurve> PipelineEvaluator::analyze(const ToolProfile& profile,
                                                const std::vector<std::string>& sequences,
                                                const std::vector<int>& qps) {
  if (profile.config() != config_)
    throw ConfigError("profile config " + to_string(profile.config()) +
                      " does not match pipeline config " + to_string(config_));
  std::vector<RDCurve> curves;
  curves.reserve(sequences.size());
  for (const std::string& sequence : sequences) {
    RDCurve curve;
    curve.profile_id = profile.hash_hex();
    curve.sequence = sequence;
    curve.config = config_;
    for (int qp : qps) curve.points.push_back(run_point(profile, sequence, qp));
    if (curve.points.size() >= 4) validate_curve(curve);
    curves.push_back(std::move(curve));
  }
  return curves;
}

RDPoint PipelineEvaluator::run_point(const ToolProfile& profile, const std::string& sequence,
                                     int qp) {
  namespace fs = std::filesystem;
  const std::string stage =
      "profile " + profile.hash_hex() + ", sequence '" + sequence + "', qp " + std::to_string(qp);

  fs::path work = cfg_.work_dir.empty() ? fs::temp_directory_path() : fs::path(cfg_.work_dir);
  std::error_code ec;
  fs::create_directories(work, ec);
  if (ec) throw EvalError("cannot create work dir '" + work.string() + "': " + ec.message());
  const fs::path bitstream =
      work / (profile.hash_hex() + "_" + sanitize_token(fs::path(sequence).filename().string()) +
              "_qp" + std::to_string(qp) + ".bin");

  std::string encode = replace_all(cfg_.encode_cmd, "{input}", sequence);
  encode = replace_all(encode, "{output}", bitstream.string());
  encode = replace_all(encode, "{qp}", std::to_string(qp));
  encode = replace_all(encode, "{switches}", render_switches(cfg_, profile));

  const RunResult enc = run_command(encode);
  if (enc.exit_code != 0)
    throw EvalError("encode failed (exit " + std::to_string(enc.exit_code) + ") for " + stage +
                    ": " + tail_of(enc.output));

  std::string decode = replace_all(cfg_.decode_cmd, "{input}", bitstream.string());
  decode = replace_all(decode, "{output}", (bitstream.string() + ".yuv"));
  decode = replace_all(decode, "{qp}", std::to_string(qp));

  const RunResult dec = run_command(decode);
  if (dec.exit_code != 0)
    throw EvalError("decode failed (exit " + std::to_string(dec.exit_code) + ") for " + stage +
                    ": " + tail_of(dec.output));

  const std::string combined = enc.output + "\n" + dec.output;
  auto metric = [&combined, &stage, this](const char* name) {
    const std::regex re(cfg_.parse.at(name));
    std::smatch m;
    if (!std::regex_search(combined, m, re) || m.size() < 2)
      throw EvalError(std::string("could not parse metric '") + name +
                      "' from pipeline output for " + stage);
    try {
      return std::stod(m[1].str());
    } catch (const std::exception&) {
      throw EvalError(std::string("metric '") + name + "' matched non-numeric text '" +
                      m[1].str() + "' for " + stage);
    }
  };

  RDPoint point;
  point.qp = qp;
  point.rate_kbps = metric("rate_kbps");
  point.psnr_y = metric("psnr_y");
  point.psnr_u = metric("psnr_u");
  point.psnr_v = metric("psnr_v");
  point.vmaf = metric("vmaf");

  if (!cfg_.energy_source.empty()) {
    // The decode stage is what the energy numbers describe: re-run it under
    // the measurement harness until the confidence rule passes. Stub specs
    // carry their own simulated workload instead of re-decoding.
    SourceSpec src = parse_source_spec(cfg_.energy_source);
    std::function<void()> task = src.task;
    if (!task) {
      const std::string decode_cmd = decode;
      task = [decode_cmd, stage] {
        const RunResult rerun = run_command(decode_cmd);
        if (rerun.exit_code != 0)
          throw EvalError("measured decode failed (exit " + std::to_string(rerun.exit_code) +
                          ") for " + stage + ": " + tail_of(rerun.output));
      };
    }
    const MeasurementSeries series = measure_until_confident(task, *src.source, cfg_.confidence);
    if (!series.converged)
      throw EvalError("energy measurement did not converge within " +
                      std::to_string(cfg_.confidence.m_max) + " runs for " + stage);
    point.energy_j = series.mean();
    double total_s = 0.0;
    for (double d : series.durations_s) total_s += d;
    point.time_s = total_s / static_cast<double>(series.durations_s.size());
  }
  return point;
}

}  // namespace tpx
