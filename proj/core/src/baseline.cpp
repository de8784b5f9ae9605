#include "smlmc/baseline.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "smlmc/errors.hpp"
#include "smlmc/random.hpp"

namespace smlmc {

namespace {

double sq_dist(const Point& a, const Point& b) {
    const double dx = a.x_nm - b.x_nm;
    const double dy = a.y_nm - b.y_nm;
    return dx * dx + dy * dy;
}

std::size_t nearest(const Point& p, const std::vector<Point>& centers, double& d2) {
    std::size_t best = 0;
    d2 = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = sq_dist(p, centers[c]);
        if (d < d2) {
            d2 = d;
            best = c;
        }
    }
    return best;
}

struct KMeansRun {
    std::vector<Point> centers;
    double wcss = 0.0;
};

KMeansRun run_kmeans(const std::vector<Point>& points, std::size_t k, std::int64_t max_iters,
                     RandomStream& rng) {
    const std::size_t n = points.size();
    std::vector<Point> centers;
    centers.reserve(k);
    const auto first = std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
    centers.push_back(points[first]);

    std::vector<double> min_d2(n);
    for (std::size_t i = 0; i < n; ++i) min_d2[i] = sq_dist(points[i], centers[0]);
    while (centers.size() < k) {
        const auto far = static_cast<std::size_t>(
            std::max_element(min_d2.begin(), min_d2.end()) - min_d2.begin());
        centers.push_back(points[far]);
        for (std::size_t i = 0; i < n; ++i) {
            min_d2[i] = std::min(min_d2[i], sq_dist(points[i], centers.back()));
        }
    }

    std::vector<std::size_t> label(n, k);
    std::vector<double> sum_x(k), sum_y(k);
    std::vector<std::int64_t> members(k);
    for (std::int64_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            double d2;
            const std::size_t c = nearest(points[i], centers, d2);
            if (c != label[i]) {
                label[i] = c;
                changed = true;
            }
        }
        if (!changed) break;
        std::fill(sum_x.begin(), sum_x.end(), 0.0);
        std::fill(sum_y.begin(), sum_y.end(), 0.0);
        std::fill(members.begin(), members.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            sum_x[label[i]] += points[i].x_nm;
            sum_y[label[i]] += points[i].y_nm;
            ++members[label[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (members[c] > 0) {
                const double m = static_cast<double>(members[c]);
                centers[c] = {sum_x[c] / m, sum_y[c] / m};
            }
        }
    }

    KMeansRun run;
    for (const Point& p : points) {
        double d2;
        nearest(p, centers, d2);
        run.wcss += d2;
    }
    run.centers = std::move(centers);
    return run;
}

}  // namespace

void BaselineConfig::validate() const {
    if (n_out < 1 || n_restarts < 1 || max_iters < 1) {
        throw InvalidArgument("baseline n_out, n_restarts and max_iters must be positive");
    }
}

std::vector<Point> cluster_predict(std::span<const LocalizationRecord> localizations,
                                   const BaselineConfig& config) {
    config.validate();
    if (localizations.empty()) throw InvalidArgument("baseline needs at least one localization");

    std::vector<Point> points;
    points.reserve(localizations.size());
    for (const auto& rec : localizations) points.push_back({rec.x_nm, rec.y_nm});
    const auto k = static_cast<std::size_t>(config.n_out);

    // Distinct points with multiplicities, in first-appearance order.
    std::map<std::pair<double, double>, std::size_t> slot;
    std::vector<Point> distinct;
    std::vector<std::int64_t> multiplicity;
    for (const Point& p : points) {
        auto [it, inserted] = slot.emplace(std::pair{p.x_nm, p.y_nm}, distinct.size());
        if (inserted) {
            distinct.push_back(p);
            multiplicity.push_back(0);
        }
        ++multiplicity[it->second];
        if (distinct.size() > k) break;
    }

    if (distinct.size() <= k) {
        std::vector<std::size_t> order(distinct.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return multiplicity[a] > multiplicity[b];
        });
        std::vector<Point> out = distinct;
        for (std::size_t i = 0; out.size() < k; ++i) out.push_back(distinct[order[i % order.size()]]);
        return out;
    }

    KMeansRun best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (std::int64_t r = 0; r < config.n_restarts; ++r) {
        RandomStream rng(config.seed, static_cast<std::uint64_t>(r));
        KMeansRun run = run_kmeans(points, k, config.max_iters, rng);
        if (run.wcss < best.wcss) best = std::move(run);
    }
    return best.centers;
}

}  // namespace smlmc
