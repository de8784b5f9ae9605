#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smlmc/point.hpp"
#include "smlmc/sim.hpp"

namespace smlmc {

struct BaselineConfig {
    std::int64_t n_out = 1;
    std::int64_t n_restarts = 8;
    std::int64_t max_iters = 100;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Spatial k-means over the localization coordinates (time is ignored).
/// Each restart seeds its first center from the stream and adds the rest by
/// greedy farthest-point selection; the restart with the lowest within-cluster
/// sum of squares wins, ties to the lowest restart index. With fewer distinct
/// points than n_out, the distinct points are returned and the most populated
/// ones repeated until there are n_out.
std::vector<Point> cluster_predict(std::span<const LocalizationRecord> localizations,
                                   const BaselineConfig& config);

}  // namespace smlmc
