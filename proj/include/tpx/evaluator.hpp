#pragma once

#include <string>
#include <vector>

#include "tpx/bdmetrics.hpp"
#include "tpx/profiles.hpp"

namespace tpx {

inline const std::vector<int> kDefaultQps = {22, 27, 32, 37};

// Analyze(u): maps a tool profile to one RD curve per sequence. Pure
// evaluators return identical curves for identical inputs and may be called
// concurrently; impure ones (anything measuring energy on real hardware) are
// invoked strictly serially.
class Evaluator {
 public:
  virtual ~Evaluator() = default;

  virtual std::vector<RDCurve> analyze(const ToolProfile& profile,
                                       const std::vector<std::string>& sequences,
                                       const std::vector<int>& qps) = 0;
  virtual bool pure() const = 0;
  virtual const ToolCatalog& catalog() const = 0;
};

}  // namespace tpx
