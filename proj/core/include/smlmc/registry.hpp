#pragma once

#include <map>
#include <string>

#include "smlmc/sim.hpp"

namespace smlmc {

/// The ten benchmark conditions, D1-D6 (dSTORM) and P1-P4 (DNA-PAINT).
/// All share a 500 x 500 nm ROI, sigma 10 nm and a 500 nm detection radius.
const std::map<std::string, ConditionParams>& condition_registry();

/// Throws InvalidArgument for unknown ids.
const ConditionParams& find_condition(const std::string& id);

}  // namespace smlmc
