#pragma once

#include <string>
#include <vector>

#include "tpx/dse.hpp"

namespace tpxcli {

// Deterministic scatter of every evaluated profile in the (BDR, BDDE) plane
// with the Pareto front connected and highlighted.
std::string pareto_svg(const std::vector<tpx::EvaluatedProfile>& all,
                       const std::vector<tpx::EvaluatedProfile>& front,
                       const std::string& quality_label);

}  // namespace tpxcli
