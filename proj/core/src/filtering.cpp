#include "smlmc/filtering.hpp"

#include <unordered_set>

#include "smlmc/errors.hpp"

namespace smlmc {

FilterResult apply_detection_filter(const std::vector<LocalizationRecord>& records,
                                    double radius_nm) {
    FilterResult result;
    result.kept.reserve(records.size());
    const double r2 = radius_nm * radius_nm;

    std::size_t begin = 0;
    std::vector<char> conflicted;
    while (begin < records.size()) {
        std::size_t end = begin + 1;
        while (end < records.size() && records[end].frame == records[begin].frame) ++end;
        if (end < records.size() && records[end].frame < records[begin].frame) {
            throw InvalidArgument("detection filter input is not sorted by frame");
        }

        const std::size_t n = end - begin;
        if (n == 1) {
            result.kept.push_back(records[begin]);
        } else {
            conflicted.assign(n, 0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double dx = records[begin + i].x_nm - records[begin + j].x_nm;
                    const double dy = records[begin + i].y_nm - records[begin + j].y_nm;
                    if (dx * dx + dy * dy <= r2) {
                        conflicted[i] = 1;
                        conflicted[j] = 1;
                    }
                }
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (conflicted[i]) {
                    ++result.dropped_count;
                } else {
                    result.kept.push_back(records[begin + i]);
                }
            }
        }
        begin = end;
    }
    return result;
}

FilteredSample retain_emitters(const std::vector<Emitter>& emitters,
                               std::vector<LocalizationRecord> kept,
                               std::int64_t dropped_count) {
    std::unordered_set<std::int64_t> known;
    known.reserve(emitters.size());
    for (const auto& e : emitters) known.insert(e.emitter_id);

    std::unordered_set<std::int64_t> seen;
    for (const auto& rec : kept) {
        if (!known.contains(rec.true_emitter_id)) {
            throw InvalidArgument("localization references unknown emitter " +
                                  std::to_string(rec.true_emitter_id));
        }
        seen.insert(rec.true_emitter_id);
    }

    FilteredSample sample;
    sample.raw_emitter_count = static_cast<std::int64_t>(emitters.size());
    sample.dropped_count = dropped_count;
    for (const auto& e : emitters) {
        if (seen.contains(e.emitter_id)) sample.retained_emitters.push_back(e);
    }
    sample.localizations = std::move(kept);
    return sample;
}

}  // namespace smlmc
