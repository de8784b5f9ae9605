#include "smlmc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smlmc/errors.hpp"

namespace smlmc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void require(bool ok, const ConditionParams& p, const char* what) {
    if (!ok) {
        throw InvalidArgument("condition '" + p.id + "': " + what);
    }
}

}  // namespace

std::string to_string(Modality m) {
    return m == Modality::dSTORM ? "dSTORM" : "DNA-PAINT";
}

std::string describe(const Termination& t) {
    return std::visit(
        Overloaded{
            [](const ExponentialLocalizations& e) {
                std::ostringstream os;
                os << "Exponential(mu=" << e.mean_events << ")";
                return os.str();
            },
            [](const PoissonBindings& p) {
                std::ostringstream os;
                os << "Poisson(lambda=" << p.lambda << ")";
                return os.str();
            },
            [](const Unlimited&) { return std::string("Unlimited"); },
        },
        t);
}

void ConditionParams::validate() const {
    require(std::isfinite(density_per_um2) && density_per_um2 >= 0.0, *this,
            "density must be finite and non-negative");
    require(positive_finite(mu_on_frames), *this, "mu_on must be positive");
    require(positive_finite(mu_off_frames), *this, "mu_off must be positive");
    require(max_frames > 0, *this, "max_frames must be positive");
    require(std::isfinite(sigma_loc_nm) && sigma_loc_nm >= 0.0, *this,
            "sigma_loc must be non-negative");
    require(std::isfinite(filter_radius_nm) && filter_radius_nm >= 0.0, *this,
            "filter radius must be non-negative");
    require(positive_finite(roi.width_nm) && positive_finite(roi.height_nm), *this,
            "ROI sides must be positive");

    if (modality == Modality::dSTORM) {
        const auto* exp = std::get_if<ExponentialLocalizations>(&termination);
        require(exp != nullptr, *this, "dSTORM requires exponential termination");
        require(positive_finite(exp->mean_events), *this,
                "termination mean must be positive");
    } else {
        const auto* pois = std::get_if<PoissonBindings>(&termination);
        require(pois != nullptr || std::holds_alternative<Unlimited>(termination), *this,
                "DNA-PAINT requires Poisson or unlimited termination");
        if (pois != nullptr) {
            require(positive_finite(pois->lambda), *this, "Poisson lambda must be positive");
        }
    }
}

bool ConditionParams::in_excluded_regime() const noexcept {
    return density_per_um2 >= 1000.0 && mu_off_frames <= 100.0;
}

void check_not_excluded(const ConditionParams& params) {
    if (params.in_excluded_regime()) {
        std::ostringstream os;
        os << "condition '" << params.id << "' is in the excluded regime (density "
           << params.density_per_um2 << "/um^2 >= 1000 with mu_off "
           << params.mu_off_frames << " <= 100 frames)";
        throw ExcludedRegimeError(os.str());
    }
}

std::int64_t BlinkSchedule::total_on_frames() const noexcept {
    std::int64_t total = 0;
    for (const auto& iv : on_intervals) total += iv.length();
    return total;
}

std::int64_t emitter_count(const ConditionParams& params) {
    // nearbyint under the default rounding mode is round-half-to-even.
    return static_cast<std::int64_t>(
        std::nearbyint(params.density_per_um2 * params.roi.area_um2()));
}

namespace {

std::vector<Emitter> place_unchecked(const ConditionParams& params, RandomStream& rng) {
    const std::int64_t n = emitter_count(params);
    std::vector<Emitter> emitters;
    emitters.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const double x = rng.uniform() * params.roi.width_nm;
        const double y = rng.uniform() * params.roi.height_nm;
        emitters.push_back({i, x, y});
    }
    return emitters;
}

BlinkSchedule schedule_unchecked(const ConditionParams& params, RandomStream& rng,
                                 std::int64_t emitter_id);

}  // namespace

std::vector<Emitter> place_emitters(const ConditionParams& params, RandomStream& rng) {
    params.validate();
    return place_unchecked(params, rng);
}

std::int64_t dwell_frames(double duration) noexcept {
    const double frames = std::ceil(duration);
    return frames < 1.0 ? 1 : static_cast<std::int64_t>(frames);
}

BlinkSchedule sample_schedule(const ConditionParams& params, RandomStream& rng,
                              std::int64_t emitter_id) {
    params.validate();
    return schedule_unchecked(params, rng, emitter_id);
}

namespace {

BlinkSchedule schedule_unchecked(const ConditionParams& params, RandomStream& rng,
                                 std::int64_t emitter_id) {
    BlinkSchedule schedule;
    schedule.emitter_id = emitter_id;

    const double p_on = params.mu_on_frames / (params.mu_on_frames + params.mu_off_frames);
    bool on = rng.uniform() < p_on;

    // Budget is in localization frames for dSTORM, in on-intervals for PAINT-Poisson.
    bool budget_counts_frames = false;
    if (const auto* exp = std::get_if<ExponentialLocalizations>(&params.termination)) {
        schedule.event_budget = dwell_frames(rng.exponential(exp->mean_events));
        budget_counts_frames = true;
    } else if (const auto* pois = std::get_if<PoissonBindings>(&params.termination)) {
        schedule.event_budget = rng.poisson(pois->lambda);
    }

    std::int64_t used_frames = 0;
    if (schedule.event_budget && !budget_counts_frames && *schedule.event_budget == 0) {
        return schedule;
    }

    std::int64_t t = 1;
    while (t <= params.max_frames) {
        if (on) {
            const double raw = rng.exponential(params.mu_on_frames);
            schedule.raw_on_durations.push_back(raw);
            std::int64_t length = dwell_frames(raw);
            if (budget_counts_frames) {
                length = std::min(length, *schedule.event_budget - used_frames);
            }
            const std::int64_t end = std::min(t + length - 1, params.max_frames);
            schedule.on_intervals.push_back({t, end});
            used_frames += end - t + 1;

            if (schedule.event_budget) {
                const std::int64_t spent = budget_counts_frames
                                               ? used_frames
                                               : static_cast<std::int64_t>(
                                                     schedule.on_intervals.size());
                if (spent >= *schedule.event_budget) break;
            }
            t = end + 1;
        } else {
            const double raw = rng.exponential(params.mu_off_frames);
            schedule.raw_off_durations.push_back(raw);
            t += dwell_frames(raw);
        }
        on = !on;
    }
    return schedule;
}

}  // namespace

std::vector<LocalizationRecord> render_localizations(const Emitter& emitter,
                                                     const BlinkSchedule& schedule,
                                                     double sigma_loc_nm,
                                                     RandomStream& rng) {
    std::vector<LocalizationRecord> records;
    records.reserve(static_cast<std::size_t>(schedule.total_on_frames()));
    for (const auto& iv : schedule.on_intervals) {
        for (std::int64_t frame = iv.start; frame <= iv.end; ++frame) {
            const double dx = sigma_loc_nm * rng.normal();
            const double dy = sigma_loc_nm * rng.normal();
            records.push_back(
                {frame, emitter.x_nm + dx, emitter.y_nm + dy, emitter.emitter_id});
        }
    }
    return records;
}

Acquisition simulate_acquisition(const ConditionParams& params, RandomStream& rng) {
    params.validate();
    check_not_excluded(params);

    Acquisition acq;
    acq.emitters = place_unchecked(params, rng);
    for (const auto& emitter : acq.emitters) {
        const BlinkSchedule schedule = schedule_unchecked(params, rng, emitter.emitter_id);
        auto records = render_localizations(emitter, schedule, params.sigma_loc_nm, rng);
        acq.records.insert(acq.records.end(), records.begin(), records.end());
    }
    std::sort(acq.records.begin(), acq.records.end(),
              [](const LocalizationRecord& a, const LocalizationRecord& b) {
                  if (a.frame != b.frame) return a.frame < b.frame;
                  return a.true_emitter_id < b.true_emitter_id;
              });
    return acq;
}

}  // namespace smlmc
