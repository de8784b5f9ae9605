#include "smlmc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smlmc/errors.hpp"

namespace smlmc {

namespace {

void require_nonempty(PointSet pred, PointSet truth) {
    if (pred.empty() || truth.empty()) {
        throw InvalidArgument("point sets must be non-empty");
    }
}

double directed_mean_nn(PointSet from, PointSet to) {
    std::vector<double> nearest(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point& q : to) {
            const double dx = from[i].x_nm - q.x_nm;
            const double dy = from[i].y_nm - q.y_nm;
            best = std::min(best, dx * dx + dy * dy);
        }
        nearest[i] = std::sqrt(best);
    }
    return pairwise_sum(nearest) / static_cast<double>(from.size());
}

}  // namespace

double chamfer_distance(PointSet pred, PointSet truth) {
    require_nonempty(pred, truth);
    return directed_mean_nn(pred, truth) + directed_mean_nn(truth, pred);
}

std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n) {
    if (cost.size() != n * n) throw InvalidArgument("cost matrix must be n x n");
    constexpr double kInf = std::numeric_limits<double>::infinity();
    // 1-based potentials; column 0 is the virtual start of each augmenting path.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> row_of_col(n + 1, 0), way(n + 1, 0);
    std::vector<double> min_slack(n + 1);
    std::vector<char> used(n + 1);

    for (std::size_t row = 1; row <= n; ++row) {
        row_of_col[0] = row;
        std::size_t col0 = 0;
        std::fill(min_slack.begin(), min_slack.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[col0] = 1;
            const std::size_t r0 = row_of_col[col0];
            double delta = kInf;
            std::size_t col1 = 0;
            for (std::size_t col = 1; col <= n; ++col) {
                if (used[col]) continue;
                const double reduced = cost[(r0 - 1) * n + (col - 1)] - u[r0] - v[col];
                if (reduced < min_slack[col]) {
                    min_slack[col] = reduced;
                    way[col] = col0;
                }
                if (min_slack[col] < delta) {
                    delta = min_slack[col];
                    col1 = col;
                }
            }
            for (std::size_t col = 0; col <= n; ++col) {
                if (used[col]) {
                    u[row_of_col[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = col1;
        } while (row_of_col[col0] != 0);
        do {
            const std::size_t col1 = way[col0];
            row_of_col[col0] = row_of_col[col1];
            col0 = col1;
        } while (col0 != 0);
    }

    std::vector<std::size_t> col_of_row(n, 0);
    for (std::size_t col = 1; col <= n; ++col) col_of_row[row_of_col[col] - 1] = col - 1;
    return col_of_row;
}

Assignment hungarian_assignment(PointSet pred, PointSet truth) {
    require_nonempty(pred, truth);
    const std::size_t n = std::max(pred.size(), truth.size());

    std::vector<double> cost(n * n, 0.0);
    double max_cost = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        for (std::size_t j = 0; j < truth.size(); ++j) {
            const double d = distance(pred[i], truth[j]);
            cost[i * n + j] = d;
            max_cost = std::max(max_cost, d);
        }
    }
    const double sentinel = max_cost + 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i >= pred.size() || j >= truth.size()) cost[i * n + j] = sentinel;
        }
    }

    const auto col_of_row = solve_assignment(cost, n);
    Assignment a;
    std::vector<double> matched;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = col_of_row[i];
        const bool real_row = i < pred.size();
        const bool real_col = j < truth.size();
        if (real_row && real_col) {
            a.pairs.emplace_back(i, j);
            matched.push_back(cost[i * n + j]);
        } else if (real_row) {
            a.unmatched_pred.push_back(i);
        } else if (real_col) {
            a.unmatched_truth.push_back(j);
        }
    }
    std::sort(a.unmatched_truth.begin(), a.unmatched_truth.end());
    a.total_cost_nm = pairwise_sum(matched);
    return a;
}

double hungarian_error(PointSet pred, PointSet truth) {
    const Assignment a = hungarian_assignment(pred, truth);
    return a.total_cost_nm / static_cast<double>(a.pairs.size());
}

DetectionReport detection_report(const Assignment& assignment, PointSet pred, PointSet truth,
                                 double tau_nm) {
    if (!(tau_nm > 0.0)) throw InvalidArgument("tau must be positive");
    require_nonempty(pred, truth);
    DetectionReport r;
    r.tau_nm = tau_nm;
    std::vector<double> squared;
    for (const auto& [i, j] : assignment.pairs) {
        const double d = distance(pred[i], truth[j]);
        if (d <= tau_nm) {
            ++r.tp;
            squared.push_back(d * d);
        } else {
            ++r.fp;
            ++r.fn;
        }
    }
    r.fp += static_cast<std::int64_t>(assignment.unmatched_pred.size());
    r.fn += static_cast<std::int64_t>(assignment.unmatched_truth.size());
    r.detection_accuracy = static_cast<double>(r.tp) / static_cast<double>(truth.size());
    if (r.tp > 0) {
        r.rmse_tp_nm = std::sqrt(pairwise_sum(squared) / static_cast<double>(r.tp));
    }
    return r;
}

DetectionReport detection_report(PointSet pred, PointSet truth, double tau_nm) {
    if (!(tau_nm > 0.0)) throw InvalidArgument("tau must be positive");
    return detection_report(hungarian_assignment(pred, truth), pred, truth, tau_nm);
}

std::vector<std::size_t> select_examples(std::span<const double> losses, SelectionMode mode) {
    if (losses.empty()) throw InvalidArgument("cannot select examples from an empty loss vector");
    for (double l : losses) {
        if (!std::isfinite(l)) throw InvalidArgument("losses must be finite");
    }
    const std::size_t n = losses.size();
    std::vector<double> sorted(losses.begin(), losses.end());
    std::sort(sorted.begin(), sorted.end());

    std::vector<std::size_t> picked;
    if (mode == SelectionMode::Median) {
        const double median = (n % 2 == 1) ? sorted[n / 2]
                                           : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        std::size_t best = 0;
        double best_gap = std::fabs(losses[0] - median);
        for (std::size_t i = 1; i < n; ++i) {
            const double gap = std::fabs(losses[i] - median);
            if (gap < best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        picked.push_back(best);
        return picked;
    }

    const std::size_t percent = mode == SelectionMode::Easy ? 10 : 5;
    const std::size_t k = std::max<std::size_t>(1, (n * percent + 99) / 100);
    if (mode == SelectionMode::Easy) {
        const double cut = sorted[k - 1];
        for (std::size_t i = 0; i < n; ++i) {
            if (losses[i] <= cut) picked.push_back(i);
        }
    } else {
        const double cut = sorted[n - k];
        for (std::size_t i = 0; i < n; ++i) {
            if (losses[i] >= cut) picked.push_back(i);
        }
    }
    return picked;
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanStd mean_std(std::span<const double> values) {
    MeanStd r;
    r.count = values.size();
    if (values.empty()) return r;
    const double n = static_cast<double>(values.size());
    r.mean = pairwise_sum(values) / n;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - r.mean;
        sq[i] = d * d;
    }
    r.std = std::sqrt(pairwise_sum(sq) / n);
    return r;
}

}  // namespace smlmc
