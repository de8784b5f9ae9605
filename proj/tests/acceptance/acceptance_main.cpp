// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../../tools/smlmc/commands.hpp"
#include "smlmc/baseline.hpp"
#include "smlmc/dataset.hpp"
#include "smlmc/errors.hpp"
#include "smlmc/metrics.hpp"
#include "smlmc/registry.hpp"
#include "smlmc/sim.hpp"
#include "temp_dir.hpp"

namespace {

using namespace smlmc;
namespace fs = std::filesystem;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int decimals = 3) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(decimals);
    os << v;
    return os.str();
}

bool within_rel(double value, double target, double rel) {
    return std::fabs(value - target) <= rel * std::fabs(target);
}

// ---------------------------------------------------------------------------

Outcome registry_fidelity() {
    struct Row {
        const char* id;
        Modality modality;
        double density, mu_off;
        std::int64_t frames;
        int termination_kind;  // 0 exponential, 1 poisson, 2 unlimited
        double termination_value;
    };
    const Row table[] = {
        {"D1", Modality::dSTORM, 50, 100, 6305, 0, 20},
        {"D2", Modality::dSTORM, 50, 100, 10000, 0, 50},
        {"D3", Modality::dSTORM, 50, 1000, 10000, 0, 20},
        {"D4", Modality::dSTORM, 50, 1000, 10000, 0, 50},
        {"D5", Modality::dSTORM, 1000, 1000, 10000, 0, 20},
        {"D6", Modality::dSTORM, 1000, 1000, 10000, 0, 50},
        {"P1", Modality::DnaPaint, 50, 100, 4583, 1, 50},
        {"P2", Modality::DnaPaint, 50, 100, 10000, 2, 0},
        {"P3", Modality::DnaPaint, 50, 1000, 10000, 2, 0},
        {"P4", Modality::DnaPaint, 1000, 1000, 10000, 2, 0},
    };
    if (condition_registry().size() != std::size(table)) {
        return {false, "registry has " + std::to_string(condition_registry().size()) +
                           " conditions"};
    }
    for (const Row& r : table) {
        const ConditionParams& p = find_condition(r.id);
        bool ok = p.modality == r.modality && p.density_per_um2 == r.density &&
                  p.mu_on_frames == 5.0 && p.mu_off_frames == r.mu_off &&
                  p.max_frames == r.frames && p.sigma_loc_nm == 10.0 &&
                  p.filter_radius_nm == 500.0 && p.roi.width_nm == 500.0 &&
                  p.roi.height_nm == 500.0 &&
                  static_cast<int>(p.termination.index()) == r.termination_kind;
        if (ok && r.termination_kind == 0) {
            ok = std::get<ExponentialLocalizations>(p.termination).mean_events ==
                 r.termination_value;
        } else if (ok && r.termination_kind == 1) {
            ok = std::get<PoissonBindings>(p.termination).lambda == r.termination_value;
        }
        if (!ok) return {false, std::string("mismatch in ") + r.id};
    }
    return {true, "10 conditions, every field exact"};
}

Outcome photophysics() {
    const ConditionParams& d2 = find_condition("D2");
    constexpr std::int64_t kEmitters = 100000;
    double on_sum = 0.0, off_sum = 0.0, sq_x = 0.0, sq_y = 0.0;
    std::int64_t on_n = 0, off_n = 0, loc_n = 0;
    const Emitter origin{0, 0.0, 0.0};
    for (std::int64_t i = 0; i < kEmitters; ++i) {
        RandomStream rng(20240601, static_cast<std::uint64_t>(i));
        const BlinkSchedule s = sample_schedule(d2, rng);
        for (double d : s.raw_on_durations) on_sum += d;
        for (double d : s.raw_off_durations) off_sum += d;
        on_n += static_cast<std::int64_t>(s.raw_on_durations.size());
        off_n += static_cast<std::int64_t>(s.raw_off_durations.size());
        for (const auto& rec : render_localizations(origin, s, d2.sigma_loc_nm, rng)) {
            sq_x += rec.x_nm * rec.x_nm;
            sq_y += rec.y_nm * rec.y_nm;
            ++loc_n;
        }
    }
    const double on_mean = on_sum / static_cast<double>(on_n);
    const double off_mean = off_sum / static_cast<double>(off_n);
    const double sx = std::sqrt(sq_x / static_cast<double>(loc_n));
    const double sy = std::sqrt(sq_y / static_cast<double>(loc_n));
    const bool pass = within_rel(on_mean, 5.0, 0.01) && within_rel(off_mean, 100.0, 0.01) &&
                      within_rel(sx, 10.0, 0.01) && within_rel(sy, 10.0, 0.01);
    return {pass, std::to_string(kEmitters) + " emitters: on " + fmt(on_mean) + " (" +
                      std::to_string(on_n) + " dwells), off " + fmt(off_mean) + " (" +
                      std::to_string(off_n) + "), offset std x " + fmt(sx) + " y " + fmt(sy) +
                      " (" + std::to_string(loc_n) + " localizations)"};
}

struct CountSummary {
    std::int64_t min = 0;
    std::int64_t mode = 0;
    std::map<std::int64_t, std::int64_t> histogram;
};

CountSummary retained_counts(const ConditionParams& params, std::uint64_t seed) {
    CountSummary c;
    for (std::int64_t id = 0; id < 1000; ++id) {
        RandomStream rng = derive_sample_stream(seed, id, 0);
        ++c.histogram[static_cast<std::int64_t>(generate_sample(params, rng).retained_emitters.size())];
    }
    c.min = c.histogram.begin()->first;
    std::int64_t best = -1;
    for (const auto& [k, n] : c.histogram) {
        if (n > best) {
            best = n;
            c.mode = k;
        }
    }
    return c;
}

std::string histogram_text(const std::map<std::int64_t, std::int64_t>& h) {
    std::string s;
    for (const auto& [k, n] : h) s += (s.empty() ? "" : " ") + std::to_string(k) + ":" + std::to_string(n);
    return s;
}

Outcome retained_emitter_counts() {
    const CountSummary d2 = retained_counts(find_condition("D2"), 42);
    const CountSummary d4 = retained_counts(find_condition("D4"), 42);
    const bool d2_ok = d2.min >= 5 && d2.min <= 9 && std::abs(d2.mode - 7) <= 2;
    const bool d4_ok = d4.min >= 7 && d4.min <= 11 && std::abs(d4.mode - 9) <= 2;
    return {d2_ok && d4_ok,
            "D2 min " + std::to_string(d2.min) + " mode " + std::to_string(d2.mode) +
                " (target min in [5,9], mode 7+-2) [" + histogram_text(d2.histogram) + "]; D4 min " +
                std::to_string(d4.min) + " mode " + std::to_string(d4.mode) +
                " (target min in [7,11], mode 9+-2) [" + histogram_text(d4.histogram) + "]"};
}

Outcome filter_invariant() {
    std::int64_t samples = 0, records = 0, bad_samples = 0, bad_frames = 0;
    double closest_shared = std::numeric_limits<double>::infinity();
    std::string first_bad;
    for (const char* id : {"D2", "D4"}) {
        const ConditionParams& params = find_condition(id);
        for (std::int64_t i = 0; i < 5000; ++i) {
            RandomStream rng = derive_sample_stream(7, i, 0);
            const FilteredSample s = generate_sample(params, rng);
            const auto& locs = s.localizations;
            bool bad = false;
            for (std::size_t k = 1; k < locs.size(); ++k) {
                if (locs[k].frame != locs[k - 1].frame) continue;
                bad = true;
                ++bad_frames;
                closest_shared = std::min(closest_shared,
                                          std::hypot(locs[k].x_nm - locs[k - 1].x_nm,
                                                     locs[k].y_nm - locs[k - 1].y_nm));
                if (first_bad.empty()) {
                    first_bad = std::string(id) + " sample " + std::to_string(i) + " frame " +
                                std::to_string(locs[k].frame);
                }
            }
            bad_samples += bad;
            ++samples;
            records += static_cast<std::int64_t>(locs.size());
        }
    }
    std::string detail = std::to_string(samples) + " samples, " + std::to_string(records) +
                         " localizations";
    if (bad_samples == 0) return {true, detail + ", never two in one frame"};
    return {false, detail + ": " + std::to_string(bad_samples) + " samples / " +
                       std::to_string(bad_frames) +
                       " frames hold two localizations (first: " + first_bad +
                       "); closest shared-frame pair " + fmt(closest_shared, 1) +
                       " nm, beyond the 500 nm radius but inside the 707 nm ROI diagonal"};
}

std::vector<Point> random_points(RandomStream& rng, std::size_t n) {
    std::vector<Point> pts(n);
    for (auto& p : pts) p = {rng.uniform() * 500.0, rng.uniform() * 500.0};
    return pts;
}

double brute_force_min_cost(const std::vector<Point>& a, const std::vector<Point>& b) {
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    std::vector<std::size_t> perm(large.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < small.size(); ++i) total += distance(small[i], large[perm[i]]);
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

Outcome hungarian_oracle() {
    RandomStream rng(99, 0);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 7);
        const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 7);
        const auto pred = random_points(rng, n);
        const auto truth = random_points(rng, m);
        const double cost = hungarian_assignment(pred, truth).total_cost_nm;
        const double oracle = brute_force_min_cost(pred, truth);
        const double rel = std::fabs(cost - oracle) / std::max(oracle, 1e-300);
        worst = std::max(worst, rel);
        if (rel > 1e-9) {
            return {false, "instance " + std::to_string(t) + ": " + fmt(cost, 12) + " vs " +
                               fmt(oracle, 12)};
        }
    }
    std::ostringstream os;
    os << "10000 instances, worst relative difference " << worst;
    return {true, os.str()};
}

Outcome detection_accounting() {
    RandomStream rng(5, 5);
    std::int64_t equal_size = 0;
    for (int t = 0; t < 10000; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 12);
        const std::size_t m = rng.uniform() < 0.5 ? n : 1 + static_cast<std::size_t>(rng.uniform() * 12);
        auto truth = random_points(rng, m);
        std::vector<Point> pred;
        for (std::size_t i = 0; i < n; ++i) {
            // Mix near-hits and far misses so both branches of the threshold occur.
            const Point& anchor = truth[i % m];
            const double r = rng.uniform() < 0.6 ? 30.0 : 300.0;
            pred.push_back({anchor.x_nm + r * (rng.uniform() - 0.5), anchor.y_nm + r * (rng.uniform() - 0.5)});
        }
        const DetectionReport rep = detection_report(pred, truth, 20.0);
        const auto N = static_cast<std::int64_t>(n), M = static_cast<std::int64_t>(m);
        if (rep.tp + rep.fn != M || rep.tp + rep.fp != N || (n == m && rep.fp != rep.fn)) {
            return {false, "report " + std::to_string(t) + " breaks the accounting identities"};
        }
        equal_size += n == m;
    }
    return {true, "10000 reports (" + std::to_string(equal_size) +
                      " with equal sizes): tp+fn=|truth|, tp+fp=|pred|, fp=fn"};
}

Outcome chamfer_spot_values() {
    const std::vector<Point> a{{0, 0}}, b{{3, 4}};
    const std::vector<Point> s{{12.5, 7.25}, {400, 3}, {0, 499.9999}};
    const double v1 = chamfer_distance(a, b);
    const double v2 = chamfer_distance(s, s);
    return {v1 == 10.0 && v2 == 0.0, "{(0,0)} vs {(3,4)} = " + fmt(v1, 17) + ", identity = " + fmt(v2, 17)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (code != 0) std::cerr << err.str();
    return code;
}

std::string compare_dirs(const fs::path& a, const fs::path& b) {
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(a)) names.insert(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(b)) names.insert(e.path().filename().string());
    for (const auto& n : names) {
        if (!fs::exists(a / n) || !fs::exists(b / n)) return n + " missing on one side";
        if (slurp(a / n) != slurp(b / n)) return n + " differs";
    }
    return {};
}

struct SharedDataset {
    test_support::TempDir dir{"acceptance"};
    fs::path d2() const { return dir / "d2"; }
};

Outcome determinism(const SharedDataset& shared) {
    const fs::path runs[] = {shared.d2(), shared.dir / "d2_again", shared.dir / "d2_t1",
                             shared.dir / "d2_t16"};
    const std::vector<std::string> base{"generate", "--condition", "D2", "--samples", "1000",
                                        "--seed", "42", "--out"};
    const std::vector<std::string> extra[] = {{}, {}, {"--threads", "1"}, {"--threads", "16"}};
    for (std::size_t i = 0; i < std::size(runs); ++i) {
        auto args = base;
        args.push_back(runs[i].string());
        args.insert(args.end(), extra[i].begin(), extra[i].end());
        if (const int code = cli(args); code != 0) {
            return {false, "generate exited with " + std::to_string(code)};
        }
    }
    if (auto diff = compare_dirs(runs[0], runs[1]); !diff.empty()) return {false, "rerun: " + diff};
    if (auto diff = compare_dirs(runs[2], runs[3]); !diff.empty()) return {false, "threads: " + diff};
    if (auto diff = compare_dirs(runs[0], runs[2]); !diff.empty()) return {false, "default vs 1: " + diff};
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(runs[0])) ++files;
    return {true, "4 runs (default x2, --threads 1, --threads 16), " + std::to_string(files) +
                      " files byte-identical"};
}

Outcome baseline_floor(const SharedDataset& shared) {
    const LoadedDataset data = load_dataset(shared.d2());
    const std::int64_t n_out = data.manifest.n_out;
    std::vector<double> base_acc, floor_acc, rmse;
    for (Split split : kAllSplits) {
        for (const Sample& s : data.split(split)) {
            BaselineConfig cfg;
            cfg.n_out = n_out;
            cfg.seed = mix64(static_cast<std::uint64_t>(s.sample_id));
            const auto pred = cluster_predict(s.localizations, cfg);
            const DetectionReport rep = detection_report(pred, s.ground_truth, kDefaultTauNm);
            base_acc.push_back(rep.detection_accuracy);
            if (rep.rmse_tp_nm) rmse.push_back(*rep.rmse_tp_nm);

            // Floor: N points uniform over the ROI.
            RandomStream rng(0xF100F, static_cast<std::uint64_t>(s.sample_id));
            std::vector<Point> random(static_cast<std::size_t>(n_out));
            for (auto& p : random) p = {rng.uniform() * 500.0, rng.uniform() * 500.0};
            floor_acc.push_back(detection_report(random, s.ground_truth, kDefaultTauNm).detection_accuracy);
        }
    }
    const MeanStd b = mean_std(base_acc), f = mean_std(floor_acc), r = mean_std(rmse);
    const double rmse_max = rmse.empty() ? 0.0 : *std::max_element(rmse.begin(), rmse.end());
    const bool pass = b.mean > f.mean && rmse_max <= kDefaultTauNm;
    return {pass, std::to_string(b.count) + " samples, N=" + std::to_string(n_out) +
                      ": baseline accuracy " + fmt(b.mean, 4) + " vs random floor " + fmt(f.mean, 4) +
                      "; rmse_tp mean " + fmt(r.mean) + " max " + fmt(rmse_max) + " nm"};
}

Outcome excluded_regime(const SharedDataset& shared) {
    ConditionParams params = find_condition("D5");
    params.mu_off_frames = 100.0;
    GenerateOptions o;
    o.n_samples = 10;
    o.output_dir = shared.dir / "excluded_lib";
    bool library_refused = false;
    try {
        generate_dataset(params, o);
    } catch (const ExcludedRegimeError&) {
        library_refused = true;
    }
    const int code = cli({"generate", "--condition", "D2", "--samples", "10", "--out",
                          (shared.dir / "excluded_cli").string(), "--density-override", "1000",
                          "--mu-off-override", "100"});
    const bool nothing_written =
        !fs::exists(shared.dir / "excluded_lib") && !fs::exists(shared.dir / "excluded_cli");
    return {library_refused && code == cli::kExcludedRegime && nothing_written,
            std::string("library ") + (library_refused ? "raised ExcludedRegimeError" : "did not refuse") +
                ", CLI exit " + std::to_string(code) + (nothing_written ? ", nothing written" : ", output written")};
}

}  // namespace

int main() {
    SharedDataset shared;
    struct Criterion {
        const char* name;
        double budget_s;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {"registry-fidelity", 1, registry_fidelity},
        {"photophysics-statistics", 60, photophysics},
        {"retained-emitter-counts", 120, retained_emitter_counts},
        {"filter-invariant", 0, filter_invariant},
        {"hungarian-oracle", 60, hungarian_oracle},
        {"detection-accounting", 0, detection_accounting},
        {"chamfer-spot-values", 0, chamfer_spot_values},
        {"determinism", 120, [&] { return determinism(shared); }},
        {"baseline-sanity-floor", 0, [&] { return baseline_floor(shared); }},
        {"excluded-regime", 0, [&] { return excluded_regime(shared); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0 && secs > c.budget_s) {
            o.pass = false;
            o.detail += "; over the " + fmt(c.budget_s, 0) + " s budget";
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << " (" << fmt(secs, 2) << " s): "
                  << o.detail << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
