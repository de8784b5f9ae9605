#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "smlmc/random.hpp"

namespace smlmc {

struct Roi {
    double width_nm = 500.0;
    double height_nm = 500.0;

    double area_um2() const noexcept { return width_nm * height_nm / 1e6; }
};

enum class Modality { dSTORM, DnaPaint };

std::string to_string(Modality m);

/// dSTORM photobleaching: total localization frames ~ Exponential(mean_events).
struct ExponentialLocalizations {
    double mean_events = 0.0;
};

/// DNA-PAINT with a finite imager supply: total binding events ~ Poisson(lambda).
struct PoissonBindings {
    double lambda = 0.0;
};

/// DNA-PAINT without termination.
struct Unlimited {};

using Termination = std::variant<ExponentialLocalizations, PoissonBindings, Unlimited>;

std::string describe(const Termination& t);

struct ConditionParams {
    std::string id;
    Modality modality = Modality::dSTORM;
    double density_per_um2 = 0.0;
    double mu_on_frames = 0.0;
    double mu_off_frames = 0.0;
    std::int64_t max_frames = 0;
    Termination termination = Unlimited{};
    double sigma_loc_nm = 10.0;
    double filter_radius_nm = 500.0;
    Roi roi{};

    /// Throws InvalidArgument on any violated invariant.
    void validate() const;

    /// High density together with short off-times: refused by the simulator.
    bool in_excluded_regime() const noexcept;
};

/// Throws ExcludedRegimeError if the params fall in the excluded regime.
void check_not_excluded(const ConditionParams& params);

struct Emitter {
    std::int64_t emitter_id = 0;
    double x_nm = 0.0;
    double y_nm = 0.0;

    friend bool operator==(const Emitter&, const Emitter&) = default;
};

/// Inclusive frame range.
struct FrameInterval {
    std::int64_t start = 0;
    std::int64_t end = 0;

    std::int64_t length() const noexcept { return end - start + 1; }
    friend bool operator==(const FrameInterval&, const FrameInterval&) = default;
};

struct BlinkSchedule {
    std::int64_t emitter_id = 0;
    std::vector<FrameInterval> on_intervals;
    /// dSTORM: localization frames allowed. PAINT-Poisson: on-intervals allowed.
    std::optional<std::int64_t> event_budget;
    /// Continuous dwell draws before discretization, in draw order.
    std::vector<double> raw_on_durations;
    std::vector<double> raw_off_durations;

    std::int64_t total_on_frames() const noexcept;
    friend bool operator==(const BlinkSchedule&, const BlinkSchedule&) = default;
};

struct LocalizationRecord {
    std::int64_t frame = 0;
    double x_nm = 0.0;
    double y_nm = 0.0;
    std::int64_t true_emitter_id = 0;

    friend bool operator==(const LocalizationRecord&, const LocalizationRecord&) = default;
};

struct Acquisition {
    std::vector<Emitter> emitters;
    std::vector<LocalizationRecord> records;
};

/// Banker's rounding of density x area; the count of emitters to place.
std::int64_t emitter_count(const ConditionParams& params);

std::vector<Emitter> place_emitters(const ConditionParams& params, RandomStream& rng);

/// Dwell draw converted to whole frames: ceil(d), at least one.
std::int64_t dwell_frames(double duration) noexcept;

BlinkSchedule sample_schedule(const ConditionParams& params, RandomStream& rng,
                              std::int64_t emitter_id = 0);

/// One record per on-frame; offsets are isotropic Gaussian and not clipped.
std::vector<LocalizationRecord> render_localizations(const Emitter& emitter,
                                                     const BlinkSchedule& schedule,
                                                     double sigma_loc_nm,
                                                     RandomStream& rng);

/// Raw (unfiltered) acquisition; records sorted by (frame, true_emitter_id).
Acquisition simulate_acquisition(const ConditionParams& params, RandomStream& rng);

}  // namespace smlmc
