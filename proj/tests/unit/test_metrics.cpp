#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smlmc/errors.hpp"
#include "smlmc/metrics.hpp"
#include "smlmc/random.hpp"

namespace {

using namespace smlmc;

// Minimum total cost over all injective maps of the smaller set into the larger.
double brute_force_min_cost(const std::vector<Point>& a, const std::vector<Point>& b) {
    const bool a_small = a.size() <= b.size();
    const auto& small = a_small ? a : b;
    const auto& large = a_small ? b : a;
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

std::vector<Point> random_points(RandomStream& rng, std::size_t n, double extent) {
    std::vector<Point> pts(n);
    for (auto& p : pts) p = {rng.uniform() * extent, rng.uniform() * extent};
    return pts;
}

TEST(Chamfer, SpotValues) {
    const std::vector<Point> origin{{0, 0}}, p34{{3, 4}};
    EXPECT_EQ(chamfer_distance(origin, p34), 10.0);
    const std::vector<Point> a{{0, 0}, {0, 0}}, b{{0, 0}, {1, 0}};
    EXPECT_DOUBLE_EQ(chamfer_distance(a, b), 0.5);
    const std::vector<Point> s{{1.5, 2}, {7, -3}, {100, 0.25}};
    EXPECT_EQ(chamfer_distance(s, s), 0.0);
}

TEST(Chamfer, MatchesNearestNeighbourEnumeration) {
    RandomStream rng(4, 4);
    for (int t = 0; t < 200; ++t) {
        const auto p = random_points(rng, 1 + t % 6, 100.0);
        const auto q = random_points(rng, 1 + t % 5, 100.0);
        double fwd = 0.0, bwd = 0.0;
        for (const auto& x : p) {
            double m = 1e300;
            for (const auto& y : q) m = std::min(m, distance(x, y));
            fwd += m;
        }
        for (const auto& y : q) {
            double m = 1e300;
            for (const auto& x : p) m = std::min(m, distance(x, y));
            bwd += m;
        }
        const double expected = fwd / p.size() + bwd / q.size();
        EXPECT_NEAR(chamfer_distance(p, q), expected, 1e-12 * (1 + expected));
        EXPECT_NEAR(chamfer_distance(q, p), expected, 1e-12 * (1 + expected));
    }
}

TEST(Chamfer, EmptySetIsAnError) {
    const std::vector<Point> one{{0, 0}}, none;
    EXPECT_THROW(chamfer_distance(one, none), InvalidArgument);
    EXPECT_THROW(chamfer_distance(none, one), InvalidArgument);
}

TEST(Hungarian, PermutedCopyCostsNothing) {
    std::vector<Point> truth{{1, 1}, {5, 9}, {30, 2}, {7, 7}};
    std::vector<Point> pred{truth[2], truth[0], truth[3], truth[1]};
    const auto a = hungarian_assignment(pred, truth);
    EXPECT_EQ(a.total_cost_nm, 0.0);
    EXPECT_EQ(a.pairs.size(), 4u);
    EXPECT_TRUE(a.unmatched_pred.empty());
    EXPECT_TRUE(a.unmatched_truth.empty());
    EXPECT_EQ(hungarian_error(pred, truth), 0.0);
}

TEST(Hungarian, SpotValue) {
    const std::vector<Point> pred{{0, 0}, {10, 0}}, truth{{0, 3}, {10, 4}};
    EXPECT_DOUBLE_EQ(hungarian_error(pred, truth), 3.5);
    const std::vector<Point> swapped{{10, 0}, {0, 0}};
    EXPECT_DOUBLE_EQ(hungarian_error(swapped, truth), 3.5);
}

TEST(Hungarian, RectangularLeavesTheRightSideUnmatched) {
    const std::vector<Point> pred{{0, 0}, {10, 0}};
    const std::vector<Point> truth{{0, 1}, {10, 1}, {500, 500}};
    const auto a = hungarian_assignment(pred, truth);
    EXPECT_EQ(a.pairs.size(), 2u);
    ASSERT_EQ(a.unmatched_truth.size(), 1u);
    EXPECT_EQ(a.unmatched_truth[0], 2u);
    EXPECT_DOUBLE_EQ(a.total_cost_nm, 2.0);

    const auto b = hungarian_assignment(truth, pred);
    ASSERT_EQ(b.unmatched_pred.size(), 1u);
    EXPECT_EQ(b.unmatched_pred[0], 2u);
}

TEST(Hungarian, MatchesBruteForcePermutations) {
    RandomStream rng(2024, 0);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 7);
        const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 7);
        const auto pred = random_points(rng, n, 500.0);
        const auto truth = random_points(rng, m, 500.0);
        const auto a = hungarian_assignment(pred, truth);
        const double oracle = brute_force_min_cost(pred, truth);
        ASSERT_NEAR(a.total_cost_nm, oracle, 1e-9 * std::max(1.0, oracle)) << "trial " << t;
        ASSERT_EQ(a.pairs.size(), std::min(n, m));
        ASSERT_EQ(a.unmatched_pred.size() + a.pairs.size(), n);
        ASSERT_EQ(a.unmatched_truth.size() + a.pairs.size(), m);
    }
}

TEST(Hungarian, SolveAssignmentOnAKnownMatrix) {
    // Optimal: row0->col1 (1), row1->col0 (2), row2->col2 (2).
    const std::vector<double> cost{4, 1, 3, 2, 0, 5, 3, 2, 2};
    const auto cols = solve_assignment(cost, 3);
    EXPECT_EQ(cols, (std::vector<std::size_t>{1, 0, 2}));
    EXPECT_THROW(solve_assignment(cost, 2), InvalidArgument);
}

TEST(Detection, PerfectPrediction) {
    const std::vector<Point> pts{{1, 1}, {50, 50}, {90, 10}};
    const auto r = detection_report(pts, pts);
    EXPECT_EQ(r.tp, 3);
    EXPECT_EQ(r.fp, 0);
    EXPECT_EQ(r.fn, 0);
    EXPECT_EQ(r.detection_accuracy, 1.0);
    ASSERT_TRUE(r.rmse_tp_nm.has_value());
    EXPECT_EQ(*r.rmse_tp_nm, 0.0);
}

TEST(Detection, FiveOfSevenWithinTau) {
    std::vector<Point> truth, pred;
    for (int i = 0; i < 7; ++i) {
        truth.push_back({i * 200.0, 0.0});
        pred.push_back({i * 200.0, i < 5 ? 3.0 : 40.0});
    }
    const auto r = detection_report(pred, truth, 20.0);
    EXPECT_EQ(r.tp, 5);
    EXPECT_EQ(r.fp, 2);
    EXPECT_EQ(r.fn, 2);
    EXPECT_NEAR(r.detection_accuracy, 5.0 / 7.0, 1e-15);
    EXPECT_DOUBLE_EQ(*r.rmse_tp_nm, 3.0);
}

TEST(Detection, PairBeyondTauIsOneFpAndOneFn) {
    const std::vector<Point> pred{{0, 0}}, truth{{25, 0}};
    const auto r = detection_report(pred, truth, 20.0);
    EXPECT_EQ(r.tp, 0);
    EXPECT_EQ(r.fp, 1);
    EXPECT_EQ(r.fn, 1);
    EXPECT_FALSE(r.rmse_tp_nm.has_value());
    // Exactly at tau counts as a hit.
    EXPECT_EQ(detection_report(pred, truth, 25.0).tp, 1);
}

TEST(Detection, AccountingIdentitiesHold) {
    RandomStream rng(77, 1);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 9);
        const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 9);
        const auto pred = random_points(rng, n, 200.0);
        const auto truth = random_points(rng, m, 200.0);
        const auto r = detection_report(pred, truth, 20.0 + rng.uniform() * 40.0);
        ASSERT_EQ(r.tp + r.fn, static_cast<std::int64_t>(m));
        ASSERT_EQ(r.tp + r.fp, static_cast<std::int64_t>(n));
        if (n == m) ASSERT_EQ(r.fp, r.fn);
        ASSERT_EQ(r.rmse_tp_nm.has_value(), r.tp > 0);
    }
}

TEST(Detection, BadArguments) {
    const std::vector<Point> one{{0, 0}}, none;
    EXPECT_THROW(detection_report(one, one, 0.0), InvalidArgument);
    EXPECT_THROW(detection_report(one, none), InvalidArgument);
}

TEST(SelectExamples, Median) {
    const std::vector<double> a{1, 2, 3, 4, 5};
    EXPECT_EQ(select_examples(a, SelectionMode::Median), (std::vector<std::size_t>{2}));
    const std::vector<double> b{1, 1, 10};
    EXPECT_EQ(select_examples(b, SelectionMode::Median), (std::vector<std::size_t>{0}));
    // Even length: median 2.5, index 1 (loss 2) and index 2 (loss 3) tie; first wins.
    const std::vector<double> c{4, 2, 3, 1};
    EXPECT_EQ(select_examples(c, SelectionMode::Median), (std::vector<std::size_t>{1}));
}

TEST(SelectExamples, EasyAndHardCounts) {
    std::vector<double> losses(100);
    for (std::size_t i = 0; i < losses.size(); ++i) losses[i] = static_cast<double>((i * 37) % 100);
    const auto easy = select_examples(losses, SelectionMode::Easy);
    const auto hard = select_examples(losses, SelectionMode::Hard);
    ASSERT_EQ(easy.size(), 10u);
    ASSERT_EQ(hard.size(), 5u);
    for (auto i : easy) EXPECT_LT(losses[i], 10.0);
    for (auto i : hard) EXPECT_GE(losses[i], 95.0);
    EXPECT_TRUE(std::is_sorted(easy.begin(), easy.end()));
}

TEST(SelectExamples, TiesAtTheCutAreIncluded) {
    std::vector<double> losses(20, 1.0);
    losses[0] = 0.5;
    // k = 2; the second smallest value (1.0) is shared by 19 entries.
    EXPECT_EQ(select_examples(losses, SelectionMode::Easy).size(), 20u);
    // Small inputs still return at least one index.
    const std::vector<double> three{3, 1, 2};
    EXPECT_EQ(select_examples(three, SelectionMode::Hard), (std::vector<std::size_t>{0}));
    EXPECT_EQ(select_examples(three, SelectionMode::Easy), (std::vector<std::size_t>{1}));
}

TEST(SelectExamples, RejectsEmptyAndNonFinite) {
    EXPECT_THROW(select_examples({}, SelectionMode::Median), InvalidArgument);
    const std::vector<double> bad{1.0, std::nan("")};
    EXPECT_THROW(select_examples(bad, SelectionMode::Easy), InvalidArgument);
}

TEST(Aggregates, PairwiseSumAndPopulationStd) {
    std::vector<double> v(1000, 0.1);
    EXPECT_NEAR(pairwise_sum(v), 100.0, 1e-12);
    const std::vector<double> w{2, 4, 4, 4, 5, 5, 7, 9};
    const MeanStd ms = mean_std(w);
    EXPECT_DOUBLE_EQ(ms.mean, 5.0);
    EXPECT_DOUBLE_EQ(ms.std, 2.0);
    EXPECT_EQ(ms.count, 8u);
    EXPECT_EQ(mean_std({}).count, 0u);
}

}  // namespace
