#include <cmath>
#include <cstdlib>
#include <numbers>

#include <gtest/gtest.h>

#include <steerseq/solver.hpp>
#include <steerseq/table1.hpp>

using namespace steerseq;

namespace {

// Independently optimized values (N, N_A, free-Alice intervals, eta1 lower end, mu_min).
struct FrozenRow {
    int n;
    int n_alices;
    std::vector<std::pair<double, double>> free;
    double eta_lo;
    double mu_min;
};

const std::vector<FrozenRow> &frozen_rows() {
    static const std::vector<FrozenRow> rows{
        {2, 1, {{0.70710678, 1}}, 0.70710678, 0.70710678},
        {2, 2, {{0.70710678, 0.91017972}}, 0.88388348, 0.88388348},
        {3, 1, {{0.57735027, 1}}, 0.57735027, 0.57735027},
        {3, 2, {{0.57735027, 0.93060486}}, 0.75598306, 0.75598306},
        {3, 3, {{0.57735027, 0.77335387}, {0.65782579, 0.87354762}}, 1, 0.89643517},
        {4, 3, {{0.57735027, 0.77335387}, {0.65782579, 0.87354762}}, 1, 0.89643517},
        {6, 1, {{0.5393, 1}}, 0.5393, 0.5393},
        {6, 2, {{0.5393, 0.95107828}}, 0.70616, 0.70616},
        {6, 3, {{0.5393, 0.82900580}, {0.60274326, 0.91470823}}, 1, 0.83735561},
        {6, 4, {{0.5393, 0.65453302}, {0.60274326, 0.72962355}, {0.69657939, 0.83852113}}, 1, 0.94938733},
        {10, 1, {{0.5236, 1}}, 0.5236, 0.5236},
        {10, 2, {{0.5236, 0.95840849}}, 0.68560240, 0.68560240},
        {10, 3, {{0.5236, 0.84899330}, {0.58093253, 0.92847344}}, 1, 0.81297867},
        {10, 4, {{0.5236, 0.69452558}, {0.58093253, 0.76753209}, {0.66318936, 0.86901597}}, 1, 0.92174894},
        {16, 1, {{0.503, 1}}, 0.503, 0.503},
        {16, 2, {{0.503, 0.96707277}}, 0.65862874, 0.65862874},
        {16, 3, {{0.503, 0.87287543}, {0.55303637, 0.94413654}}, 1, 0.78099364},
        {16, 4, {{0.503, 0.74101320}, {0.55303637, 0.81015218}, {0.62224815, 0.90121502}}, 1, 0.88548456},
        {16, 5,
         {{0.503, 0.56039298}, {0.55303637, 0.61564259}, {0.62224815, 0.69172752}, {0.72759404, 0.80638490}},
         1,
         0.97829573},
    };
    return rows;
}

constexpr double kFrozenTol = 2e-6;

/// Greedy check: with lambda1 fixed, can the remaining Alices (last one sharp) all violate?
bool chain_with_first(int n, int n_alices, double lam1) {
    const double bound = classical_bound(n);
    std::vector<double> chain{lam1};
    if (lam1 < bound - 1e-12) {
        return false;
    }
    while (static_cast<int>(chain.size()) < n_alices - 1) {
        const auto next = min_sharpness_for_violation(n, 1.0, chain);
        if (!next) {
            return false;
        }
        chain.push_back(*next);
    }
    const auto last = min_sharpness_for_violation(n, 1.0, chain);
    return last.has_value();
}

} // namespace

TEST(MinSharpness, Examples) {
    EXPECT_NEAR(*min_sharpness_for_violation(3, 1.0, {}), 1.0 / std::numbers::sqrt3, 1e-12);
    EXPECT_NEAR(*min_sharpness_for_violation(16, 1.0, {}), 0.503, 1e-12);
    EXPECT_FALSE(min_sharpness_for_violation(2, 0.5, {}).has_value());
    const std::vector<double> pred{1.0 / std::numbers::sqrt3};
    const double lam2 = *min_sharpness_for_violation(3, 1.0, pred);
    EXPECT_NEAR(lam2 * (1 + 2 * std::sqrt(2.0 / 3.0)) / 3, classical_bound(3), 1e-12);
    // a weaker Bob scales the threshold
    EXPECT_NEAR(*min_sharpness_for_violation(16, 1.0, {}, 0.8), 0.503 / 0.8, 1e-12);
}

TEST(MaxAlices, PinnedMapAtUnitPurity) {
    const std::vector<std::pair<int, int>> expect{{2, 2}, {3, 3}, {4, 3}, {6, 4}, {10, 4}, {16, 5}};
    for (const auto &[n, m] : expect) {
        EXPECT_EQ(max_alices(n, 1.0), m) << "N=" << n;
    }
}

TEST(MaxAlices, NonDecreasingInPurity) {
    for (int n : kSupportedSettings) {
        int previous = 0;
        for (int k = 0; k <= 200; ++k) {
            const int m = max_alices(n, k / 200.0);
            EXPECT_GE(m, previous) << "N=" << n << " mu=" << k / 200.0;
            previous = m;
        }
        EXPECT_EQ(max_alices(n, 0.0), 0);
    }
}

TEST(SharpnessRanges, MatchFrozenOracleValues) {
    for (const auto &row : frozen_rows()) {
        SCOPED_TRACE("N=" + std::to_string(row.n) + " N_A=" + std::to_string(row.n_alices));
        const auto ranges = sharpness_ranges(row.n, row.n_alices, 1.0);
        ASSERT_TRUE(ranges.has_value());
        const std::size_t expect_size = static_cast<std::size_t>(row.n_alices) + 1;
        ASSERT_EQ(ranges->size(), expect_size);
        for (std::size_t k = 0; k < row.free.size(); ++k) {
            EXPECT_EQ((*ranges)[k].observer, "A" + std::to_string(k + 1));
            EXPECT_NEAR((*ranges)[k].lo, row.free[k].first, kFrozenTol);
            EXPECT_NEAR((*ranges)[k].hi, row.free[k].second, kFrozenTol);
        }
        if (row.n_alices >= 2) {
            const auto &last = (*ranges)[static_cast<std::size_t>(row.n_alices - 1)];
            EXPECT_DOUBLE_EQ(last.lo, 1.0);
            EXPECT_DOUBLE_EQ(last.hi, 1.0);
        }
        const auto &bob = ranges->back();
        EXPECT_EQ(bob.observer, "B1");
        EXPECT_NEAR(bob.lo, row.eta_lo, kFrozenTol);
        EXPECT_DOUBLE_EQ(bob.hi, 1.0);
    }
}

TEST(SharpnessRanges, PublishedTwoSettingRow) {
    const auto r = *sharpness_ranges(2, 2, 1.0);
    EXPECT_NEAR(r[0].lo, 0.7072, 5e-4);
    EXPECT_NEAR(r[0].hi, 0.9101, 5e-4);
    EXPECT_NEAR(r[2].lo, 0.8841, 5e-4);
}

TEST(SharpnessRanges, IntervalsAreValid) {
    for (int n : kSupportedSettings) {
        for (int m = 1; m <= max_alices(n, 1.0); ++m) {
            for (const auto &iv : *sharpness_ranges(n, m, 1.0)) {
                EXPECT_LE(0.0, iv.lo);
                EXPECT_LE(iv.lo, iv.hi);
                EXPECT_LE(iv.hi, 1.0);
            }
        }
    }
}

TEST(SharpnessRanges, EndpointsAreBoundarySolutions) {
    for (int n : kSupportedSettings) {
        for (int m = 2; m <= max_alices(n, 1.0); ++m) {
            const auto r = *sharpness_ranges(n, m, 1.0);
            // lower end: A_1 sits on the bound against a sharp Bob
            EXPECT_NEAR(r[0].lo, classical_bound(n), 1e-5);
            // upper end: the chain is feasible just inside and fails just outside
            EXPECT_TRUE(chain_with_first(n, m, r[0].hi - 1e-6)) << n << ' ' << m;
            if (r[0].hi < 1.0) {
                EXPECT_FALSE(chain_with_first(n, m, r[0].hi + 1e-6)) << n << ' ' << m;
            }
        }
    }
}

TEST(SharpnessRanges, FirstIntervalNests) {
    for (int n : kSupportedSettings) {
        const int top = max_alices(n, 1.0);
        for (int m = 1; m < top; ++m) {
            const auto wide = (*sharpness_ranges(n, m, 1.0))[0];
            const auto narrow = (*sharpness_ranges(n, m + 1, 1.0))[0];
            EXPECT_LE(wide.lo, narrow.lo + 1e-12);
            EXPECT_GE(wide.hi, narrow.hi - 1e-12);
        }
    }
}

TEST(SharpnessRanges, Infeasible) {
    EXPECT_FALSE(sharpness_ranges(2, 3, 1.0).has_value());
    EXPECT_FALSE(sharpness_ranges(16, 6, 1.0).has_value());
    EXPECT_FALSE(sharpness_ranges(3, 1, 0.5).has_value());
    EXPECT_THROW(sharpness_ranges(3, 0, 1.0), DomainError);
}

TEST(MinPurity, SinglePairEqualsBound) {
    for (int n : kSupportedSettings) {
        EXPECT_NEAR(*min_purity(n, 1, 1), classical_bound(n), 1e-10) << n;
    }
}

TEST(MinPurity, FrozenOracleValues) {
    for (const auto &row : frozen_rows()) {
        EXPECT_NEAR(*min_purity(row.n, row.n_alices, 1), row.mu_min, kFrozenTol)
            << "N=" << row.n << " N_A=" << row.n_alices;
    }
}

TEST(MinPurity, PublishedExamplesWhereReproducible) {
    EXPECT_NEAR(*min_purity(2, 1, 1), 0.7072, 5e-4);
    EXPECT_NEAR(*min_purity(16, 2, 1), 0.6587, 5e-4);
    // the published 16/5 and 10/3 thresholds (0.9795, 0.8160) are not reproduced
    EXPECT_GT(std::abs(*min_purity(16, 5, 1) - 0.9795), 5e-4);
    EXPECT_GT(std::abs(*min_purity(10, 3, 1) - 0.8160), 5e-4);
}

TEST(MinPurity, TwoBobs) {
    EXPECT_NEAR(*min_purity(3, 2, 2), 0.98507579, kFrozenTol);
    EXPECT_NEAR(*min_purity(6, 2, 2), 0.92015437, kFrozenTol);
    EXPECT_NEAR(*min_purity(10, 2, 2), 0.89336701, kFrozenTol);
    EXPECT_NEAR(*min_purity(16, 2, 2), 0.85821926, kFrozenTol);
    EXPECT_FALSE(min_purity(2, 2, 2).has_value());
    EXPECT_NEAR(*min_purity(3, 1, 2), *min_purity(3, 2, 1), 1e-12);
    EXPECT_FALSE(min_purity(16, 3, 2).has_value());
    EXPECT_THROW(min_purity(3, 1, 3), DomainError);
}

TEST(RegionScan, ThreeSettingExtent) {
    const RegionScan scan = region_scan_2x2(3, 1.0, 0.002);
    ASSERT_TRUE(scan.lambda_extent.has_value());
    EXPECT_NEAR(scan.lambda_extent->lo, 0.75598306, 0.002);
    EXPECT_NEAR(scan.lambda_extent->hi, 0.80251093, 0.002);
    EXPECT_NEAR(scan.lambda_extent->lo, 0.7561, 0.002);
    EXPECT_NEAR(scan.lambda_extent->hi, 0.8025, 0.002);
    ASSERT_TRUE(scan.diagonal_extent.has_value());
    EXPECT_NEAR(scan.diagonal_extent->lo, 0.75983569, 0.002);
    EXPECT_NEAR(scan.diagonal_extent->hi, 0.79622522, 0.002);
    EXPECT_EQ(scan.points.size(), 501u * 501u);
}

TEST(RegionScan, CellsSymmetricUnderExchange) {
    for (int n : {3, 6, 16}) {
        const RegionScan scan = region_scan_2x2(n, 1.0, 0.005);
        const std::size_t g = 201;
        ASSERT_EQ(scan.points.size(), g * g);
        for (std::size_t a = 0; a < g; ++a) {
            for (std::size_t b = 0; b < g; ++b) {
                EXPECT_EQ(scan.points[a * g + b].in_region, scan.points[b * g + a].in_region);
            }
        }
    }
}

TEST(RegionScan, CellsSatisfyAllFourPairs) {
    const RegionScan scan = region_scan_2x2(6, 1.0, 0.01);
    for (const auto &pt : scan.points) {
        const Scenario s{1.0, 6, {pt.lambda1, 1.0}, {pt.eta1, 1.0}};
        const SteeringReport r = evaluate(s);
        EXPECT_EQ(pt.in_region, r.violation_count() == 4);
        EXPECT_NEAR(pt.s[0], r.values[0][0], 1e-15);
        EXPECT_NEAR(pt.s[3], r.values[1][1], 1e-15);
    }
}

TEST(RegionScan, BoundaryCurvesSitOnTheBound) {
    const RegionScan scan = region_scan_2x2(10, 1.0, 0.01);
    for (std::size_t k = 0; k < 4; ++k) {
        ASSERT_FALSE(scan.boundary_curves[k].empty());
        for (const auto &pt : scan.boundary_curves[k]) {
            const auto &[i, p] = detail::kPairs2x2[k];
            const double s = steering_parameter_closed(Scenario{1.0, 10, {pt.lambda1, 1.0}, {pt.eta1, 1.0}}, i, p);
            EXPECT_NEAR(s, scan.bound, 1e-9);
        }
    }
}

TEST(RegionScan, TwoSettingsEmptyAndGrowthWithN) {
    const RegionScan two = region_scan_2x2(2, 1.0, 0.002);
    EXPECT_TRUE(two.cells().empty());
    EXPECT_FALSE(two.lambda_extent.has_value());
    const RegionScan three = region_scan_2x2(3, 1.0, 0.002);
    const RegionScan sixteen = region_scan_2x2(16, 1.0, 0.002);
    EXPECT_NEAR(sixteen.lambda_extent->lo, 0.65862874, 0.002);
    EXPECT_NEAR(sixteen.lambda_extent->hi, 0.90148557, 0.002);
    const double area_ratio = static_cast<double>(sixteen.cells().size()) / static_cast<double>(three.cells().size());
    EXPECT_GT(area_ratio, 10.0);
    const double extent_ratio = sixteen.lambda_extent->width() / three.lambda_extent->width();
    EXPECT_NEAR(extent_ratio, 5.22, 0.3);
}

TEST(RegionScan, RejectsBadGridStep) {
    EXPECT_THROW(region_scan_2x2(3, 1.0, 0.0), DomainError);
    EXPECT_THROW(region_scan_2x2(3, 1.0, 0.7), DomainError);
}

TEST(Overlap3x2, NoSharingWithTwoBobs) {
    EXPECT_FALSE(check_3x2_overlap(16, 1.0, 0.005));
    EXPECT_FALSE(check_3x2_overlap(3, 1.0, 0.01));
}

TEST(Overlap3x2, ThreeAlicesOneBobIsFeasible) {
    EXPECT_TRUE(check_3x2_overlap(16, 1.0, 0.005, MonitoredPairs::first_bob_only));
    EXPECT_FALSE(check_3x2_overlap(2, 1.0, 0.01, MonitoredPairs::first_bob_only));
}

TEST(Parallel, DeterministicAcrossThreadCounts) {
    std::vector<double> one(1000);
    std::vector<double> many(1000);
    parallel_for(one.size(), [&](std::size_t k) { one[k] = std::sin(static_cast<double>(k)); }, 1);
    parallel_for(many.size(), [&](std::size_t k) { many[k] = std::sin(static_cast<double>(k)); }, 7);
    EXPECT_EQ(one, many);
    EXPECT_THROW(parallel_for(
                     100, [](std::size_t k) { if (k == 57) throw std::runtime_error("boom"); }, 4),
                 std::runtime_error);
}

TEST(Parallel, RegionScanIndependentOfThreads) {
    ::setenv(kThreadsEnv, "1", 1);
    const RegionScan serial = region_scan_2x2(6, 1.0, 0.01);
    ::setenv(kThreadsEnv, "5", 1);
    const RegionScan threaded = region_scan_2x2(6, 1.0, 0.01);
    ::unsetenv(kThreadsEnv);
    ASSERT_EQ(serial.points.size(), threaded.points.size());
    for (std::size_t k = 0; k < serial.points.size(); ++k) {
        EXPECT_EQ(serial.points[k].in_region, threaded.points[k].in_region);
        EXPECT_EQ(serial.points[k].s, threaded.points[k].s);
    }
    EXPECT_EQ(serial.cells(), threaded.cells());
}

TEST(Parallel, InvalidThreadEnv) {
    ::setenv(kThreadsEnv, "0", 1);
    EXPECT_THROW(scan_threads(), std::invalid_argument);
    ::setenv(kThreadsEnv, "four", 1);
    EXPECT_THROW(scan_threads(), std::invalid_argument);
    ::unsetenv(kThreadsEnv);
    EXPECT_GE(scan_threads(), 1u);
}

TEST(Table1, ReferenceHasEighteenPrintedRows) {
    EXPECT_EQ(table1_reference().size(), 18u);
    EXPECT_EQ(reproduce_table1().size(), 21u);
}

TEST(Table1, ReproducibleColumnsMatchPublished) {
    // every interval column of the one- to three-Alice rows agrees to the published precision,
    // as do the single-pair thresholds
    for (const auto &row : reproduce_table1()) {
        const int m = row.reference->n_alices;
        for (const auto &e : row.entries) {
            if (m <= 3 && (e.column != "mu_min" || m == 1)) {
                EXPECT_LE(e.deviation(), 5e-4) << "N=" << row.n << " N_A=" << m << ' ' << e.column;
            }
        }
    }
}

TEST(Table1, FourAndFiveAliceRowsDeviate) {
    for (const auto &row : reproduce_table1()) {
        if (row.reference->n_alices >= 4) {
            EXPECT_GT(row.max_deviation(), 1e-2) << "N=" << row.n;
        }
    }
}
