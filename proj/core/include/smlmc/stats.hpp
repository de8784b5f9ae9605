#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "smlmc/dataset.hpp"
#include "smlmc/metrics.hpp"

namespace smlmc {

/// Observed photophysics of a dataset, reconstructed from provenance.
///
/// An on-run is a maximal stretch of consecutive frames in which one emitter
/// has a retained localization; an off-gap is the number of empty frames
/// between two runs of the same emitter.
struct DatasetStats {
    std::int64_t n_samples = 0;
    std::int64_t window_frames = 0;

    MeanStd on_run_frames;
    MeanStd off_gap_frames;
    /// Mean off-dwell corrected for the acquisition window: a gap that starts
    /// at frame e can only be seen if it is shorter than the remaining window,
    /// so gaps are fitted as geometric dwells truncated at that bound.
    double off_dwell_estimate_frames = 0.0;

    MeanStd localizations_per_emitter;
    std::map<std::int64_t, std::int64_t> retained_histogram;
    std::int64_t seq_len_bin_frames = 1000;
    std::map<std::int64_t, std::int64_t> seq_len_histogram;  // keyed by bin start
};

/// window_frames: acquisition length used for the truncation correction;
/// 0 means take it from the manifest's max_seq_len.
DatasetStats compute_stats(const LoadedDataset& data, std::int64_t window_frames = 0);

/// Maximum-likelihood mean of geometric dwells (support 1, 2, ...) where gap i
/// was only observable because it did not exceed caps[i].
double truncated_geometric_mean(const std::vector<std::int64_t>& gaps,
                                const std::vector<std::int64_t>& caps);

void print_stats(const DatasetStats& stats, std::ostream& out);

}  // namespace smlmc
