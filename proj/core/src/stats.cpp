#include "smlmc/stats.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "smlmc/errors.hpp"
#include "smlmc/format.hpp"

namespace smlmc {

double truncated_geometric_mean(const std::vector<std::int64_t>& gaps,
                                const std::vector<std::int64_t>& caps) {
    if (gaps.size() != caps.size()) throw InvalidArgument("gaps and caps differ in length");
    if (gaps.empty()) return std::numeric_limits<double>::quiet_NaN();

    // Score in the rate theta = -ln q; the log-likelihood is concave in theta,
    // so the score is decreasing and bisection on log(theta) finds the root.
    auto score = [&](double theta) {
        double s = 0.0;
        for (std::size_t i = 0; i < gaps.size(); ++i) {
            const double c = static_cast<double>(caps[i]);
            s += -static_cast<double>(gaps[i] - 1) + 1.0 / std::expm1(theta) -
                 c / std::expm1(c * theta);
        }
        return s;
    };
    double lo = std::log(1e-12), hi = std::log(50.0);
    if (score(std::exp(lo)) <= 0.0) return std::numeric_limits<double>::infinity();
    if (score(std::exp(hi)) >= 0.0) return 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (score(std::exp(mid)) > 0.0 ? lo : hi) = mid;
    }
    const double theta = std::exp(0.5 * (lo + hi));
    return 1.0 / -std::expm1(-theta);
}

DatasetStats compute_stats(const LoadedDataset& data, std::int64_t window_frames) {
    DatasetStats st;
    st.window_frames = window_frames > 0 ? window_frames : data.manifest.max_seq_len;

    std::vector<double> runs, gaps_d, per_emitter;
    std::vector<std::int64_t> gaps, caps;
    std::vector<std::vector<std::int64_t>> frames_of;
    for (Split split : kAllSplits) {
        for (const Sample& s : data.split(split)) {
            ++st.n_samples;
            ++st.retained_histogram[static_cast<std::int64_t>(s.ground_truth.size())];
            const std::int64_t bin = (s.seq_len / st.seq_len_bin_frames) * st.seq_len_bin_frames;
            ++st.seq_len_histogram[bin];

            frames_of.assign(s.ground_truth.size(), {});
            for (const auto& rec : s.localizations) {
                frames_of[static_cast<std::size_t>(rec.true_emitter_id)].push_back(rec.frame);
            }
            for (const auto& frames : frames_of) {
                per_emitter.push_back(static_cast<double>(frames.size()));
                if (frames.empty()) continue;
                std::int64_t start = frames[0], prev = frames[0];
                for (std::size_t i = 1; i <= frames.size(); ++i) {
                    if (i < frames.size() && frames[i] <= prev + 1) {
                        prev = frames[i];
                        continue;
                    }
                    runs.push_back(static_cast<double>(prev - start + 1));
                    if (i < frames.size()) {
                        const std::int64_t gap = frames[i] - prev - 1;
                        gaps.push_back(gap);
                        gaps_d.push_back(static_cast<double>(gap));
                        caps.push_back(std::max(gap, st.window_frames - prev - 1));
                        start = prev = frames[i];
                    }
                }
            }
        }
    }
    st.on_run_frames = mean_std(runs);
    st.off_gap_frames = mean_std(gaps_d);
    st.off_dwell_estimate_frames = truncated_geometric_mean(gaps, caps);
    st.localizations_per_emitter = mean_std(per_emitter);
    return st;
}

void print_stats(const DatasetStats& st, std::ostream& out) {
    out << "samples: " << st.n_samples << "\n";
    out << "on-dwell (consecutive frames per run): mean " << format_fixed(st.on_run_frames.mean, 3)
        << " std " << format_fixed(st.on_run_frames.std, 3) << " over "
        << st.on_run_frames.count << " runs\n";
    out << "off-dwell (frames between runs): observed mean "
        << format_fixed(st.off_gap_frames.mean, 3) << " over " << st.off_gap_frames.count
        << " gaps; window-corrected estimate " << format_fixed(st.off_dwell_estimate_frames, 3)
        << " (window " << st.window_frames << " frames)\n";
    out << "localizations per retained emitter: mean "
        << format_fixed(st.localizations_per_emitter.mean, 3) << " std "
        << format_fixed(st.localizations_per_emitter.std, 3) << "\n";
    out << "retained emitters per sample:\n";
    for (const auto& [k, n] : st.retained_histogram) out << "  " << k << ": " << n << "\n";
    out << "sequence length (bins of " << st.seq_len_bin_frames << " frames):\n";
    for (const auto& [bin, n] : st.seq_len_histogram) {
        out << "  [" << bin << ", " << bin + st.seq_len_bin_frames << "): " << n << "\n";
    }
}

}  // namespace smlmc
