#pragma once

#include <json.hpp>

#include "tpx/bdmetrics.hpp"

namespace tpx::detail {

nlohmann::json point_to_json(const RDPoint& point);
RDPoint point_from_json(const nlohmann::json& j, const std::string& where);

nlohmann::json bd_to_json(const BDResult& bd);
BDResult bd_from_json(const nlohmann::json& j, const std::string& where);

double require_number(const nlohmann::json& j, const std::string& key, const std::string& where);
double number_or(const nlohmann::json& j, const std::string& key, double fallback,
                 const std::string& where);

}  // namespace tpx::detail
