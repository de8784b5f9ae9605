#pragma once

#include <cstdint>
#include <vector>

#include "smlmc/sim.hpp"

namespace smlmc {

struct FilterResult {
    std::vector<LocalizationRecord> kept;
    std::int64_t dropped_count = 0;
};

/// Detection-limit filter. Within one frame, every localization that has a
/// same-frame neighbour at distance <= radius_nm is removed, along with that
/// neighbour. Records must be sorted by frame; order is preserved.
FilterResult apply_detection_filter(const std::vector<LocalizationRecord>& records,
                                    double radius_nm);

struct FilteredSample {
    std::vector<Emitter> retained_emitters;
    std::vector<LocalizationRecord> localizations;
    std::int64_t dropped_count = 0;
    std::int64_t raw_emitter_count = 0;
};

/// Keeps the emitters that still own at least one localization.
FilteredSample retain_emitters(const std::vector<Emitter>& emitters,
                               std::vector<LocalizationRecord> kept,
                               std::int64_t dropped_count = 0);

}  // namespace smlmc
