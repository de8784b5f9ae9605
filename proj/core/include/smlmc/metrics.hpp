#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "smlmc/point.hpp"

namespace smlmc {

/// Default matching threshold for detection metrics, in nm.
inline constexpr double kDefaultTauNm = 20.0;

/// Sum of both directed mean nearest-neighbour distances (unsquared).
/// Throws InvalidArgument if either set is empty.
double chamfer_distance(PointSet pred, PointSet truth);

struct Assignment {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (pred_idx, truth_idx)
    std::vector<std::size_t> unmatched_pred;
    std::vector<std::size_t> unmatched_truth;
    double total_cost_nm = 0.0;
};

/// Minimum-cost square assignment on a row-major n x n cost matrix
/// (Kuhn-Munkres with potentials, O(n^3)). Returns the column of each row.
std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n);

/// Optimal one-to-one matching under Euclidean cost. Rectangular inputs are
/// padded to square with a sentinel cost; sentinel pairs come back unmatched.
Assignment hungarian_assignment(PointSet pred, PointSet truth);

/// Mean distance over the matched pairs.
double hungarian_error(PointSet pred, PointSet truth);

struct DetectionReport {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    double detection_accuracy = 0.0;
    std::optional<double> rmse_tp_nm;  // empty when tp == 0
    double tau_nm = kDefaultTauNm;
};

/// Matched pairs with distance <= tau are true positives; a matched pair
/// beyond tau counts once as FP and once as FN.
DetectionReport detection_report(PointSet pred, PointSet truth, double tau_nm = kDefaultTauNm);
DetectionReport detection_report(const Assignment& assignment, PointSet pred, PointSet truth,
                                 double tau_nm);

enum class SelectionMode { Median, Easy, Hard };

/// Median: the first index whose loss is closest to the median.
/// Easy / hard: indices in the lowest 10% / highest 5% of the distribution;
/// the cut is the k-th order statistic (k = ceil(fraction * n)) and ties at
/// the cut are included. Indices come back ascending.
std::vector<std::size_t> select_examples(std::span<const double> losses, SelectionMode mode);

/// Pairwise (cascade) summation; order-fixed for reproducible aggregates.
double pairwise_sum(std::span<const double> values);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
    std::size_t count = 0;
};

MeanStd mean_std(std::span<const double> values);

}  // namespace smlmc
