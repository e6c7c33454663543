#include "json_detail.hpp"

#include "tpx/error.hpp"

namespace tpx::detail {

using nlohmann::json;

double require_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ConfigError(where + ": missing numeric field '" + key + "'");
  return j.at(key).get<double>();
}

double number_or(const json& j, const std::string& key, double fallback,
                 const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  if (!j.at(key).is_number())
    throw ConfigError(where + ": field '" + key + "' must be numeric");
  return j.at(key).get<double>();
}

json point_to_json(const RDPoint& point) {
  json j;
  j["qp"] = point.qp;
  j["rate_kbps"] = point.rate_kbps;
  j["psnr_y"] = point.psnr_y;
  j["psnr_u"] = point.psnr_u;
  j["psnr_v"] = point.psnr_v;
  j["vmaf"] = point.vmaf;
  j["energy_j"] = point.energy_j ? json(*point.energy_j) : json(nullptr);
  j["time_s"] = point.time_s ? json(*point.time_s) : json(nullptr);
  return j;
}

RDPoint point_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": point must be an object");
  RDPoint p;
  p.qp = static_cast<int>(require_number(j, "qp", where));
  p.rate_kbps = require_number(j, "rate_kbps", where);
  p.psnr_y = require_number(j, "psnr_y", where);
  p.psnr_u = require_number(j, "psnr_u", where);
  p.psnr_v = require_number(j, "psnr_v", where);
  p.vmaf = require_number(j, "vmaf", where);
  if (j.contains("energy_j") && !j.at("energy_j").is_null())
    p.energy_j = require_number(j, "energy_j", where);
  if (j.contains("time_s") && !j.at("time_s").is_null())
    p.time_s = require_number(j, "time_s", where);
  return p;
}

json bd_to_json(const BDResult& bd) {
  json j;
  j["bdr_psnr"] = bd.bdr_psnr;
  j["bdr_vmaf"] = bd.bdr_vmaf;
  j["bdde_psnr"] = bd.bdde_psnr ? json(*bd.bdde_psnr) : json(nullptr);
  j["bdde_vmaf"] = bd.bdde_vmaf ? json(*bd.bdde_vmaf) : json(nullptr);
  j["overlap_psnr"] = {bd.overlap_psnr.lo, bd.overlap_psnr.hi};
  j["overlap_vmaf"] = {bd.overlap_vmaf.lo, bd.overlap_vmaf.hi};
  return j;
}

BDResult bd_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": bd must be an object");
  BDResult bd;
  bd.bdr_psnr = require_number(j, "bdr_psnr", where);
  bd.bdr_vmaf = require_number(j, "bdr_vmaf", where);
  if (j.contains("bdde_psnr") && !j.at("bdde_psnr").is_null())
    bd.bdde_psnr = require_number(j, "bdde_psnr", where);
  if (j.contains("bdde_vmaf") && !j.at("bdde_vmaf").is_null())
    bd.bdde_vmaf = require_number(j, "bdde_vmaf", where);
  auto interval = [&](const char* key) {
    QualityInterval iv{0.0, 0.0};
    if (j.contains(key) && j.at(key).is_array() && j.at(key).size() == 2) {
      iv.lo = j.at(key).at(0).get<double>();
      iv.hi = j.at(key).at(1).get<double>();
    }
    return iv;
  };
  bd.overlap_psnr = interval("overlap_psnr");
  bd.overlap_vmaf = interval("overlap_vmaf");
  return bd;
}

}  // namespace tpx::detail
