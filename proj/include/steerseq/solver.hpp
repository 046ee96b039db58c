#pragma once

/**
 * @file
 * Searches over observer sharpness for simultaneous steering violations.
 *
 * All searches go through detail::closed_form(). They rely on two
 * monotonicity facts of the steering parameter: it grows with the current
 * observers' sharpness, and it shrinks as any predecessor's sharpness grows.
 * The cheapest admissible predecessor therefore always leaves the most room
 * for the observers that follow it.
 */

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "parallel.hpp"
#include "steering.hpp"

namespace steerseq {

/// Absolute slack when testing S >= C_N on values that were solved to sit on the bound.
inline constexpr double kBoundarySlack = 1e-12;
inline constexpr double kBisectionTol = 1e-12;

inline constexpr double kDefaultRegionStep = 0.002;
inline constexpr double kDefaultOverlapStep = 0.005;

struct SharpnessInterval {
    std::string observer; ///< "A1", "A2", ..., "B1"
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double width() const { return hi - lo; }
    friend bool operator==(const SharpnessInterval &, const SharpnessInterval &) = default;
};

namespace detail {

inline bool meets_bound(double s, double bound) { return s >= bound - kBoundarySlack; }

inline void require_unit_interval(double v, const char *what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError(std::string(what) + " = " + std::to_string(v) + " outside [0, 1]");
    }
}

/// Largest x in [lo, hi] with pred(x), given pred(lo) and !pred(hi).
inline double bisect_last_true(const std::function<bool(double)> &pred, double lo, double hi) {
    while (hi - lo > kBisectionTol) {
        const double mid = 0.5 * (lo + hi);
        (pred(mid) ? lo : hi) = mid;
    }
    return lo;
}

/// Smallest x in [lo, hi] with pred(x), given !pred(lo) and pred(hi).
inline double bisect_first_true(const std::function<bool(double)> &pred, double lo, double hi) {
    while (hi - lo > kBisectionTol) {
        const double mid = 0.5 * (lo + hi);
        (pred(mid) ? hi : lo) = mid;
    }
    return hi;
}

/**
 * m Alices against a single Bob. The last Alice is pinned sharp when
 * last_sharp is set; every other Alice is free in [0, 1].
 */
struct AliceChain {
    int n_settings;
    double mu;
    double eta;
    int n_alices;
    bool last_sharp;

    [[nodiscard]] int free_alices() const { return last_sharp ? n_alices - 1 : n_alices; }

    /**
     * True if the given leading sharpness values violate at every stage and
     * the chain can be completed. Unfixed free Alices take the smallest
     * violating sharpness.
     */
    [[nodiscard]] bool feasible(std::span<const double> prefix) const {
        const double bound = classical_bound(n_settings);
        double weight = mu * eta; // S of the next Alice divided by her sharpness
        int placed = 0;
        for (double lam : prefix) {
            if (!meets_bound(weight * lam, bound)) {
                return false;
            }
            weight *= one_sided_factor(n_settings, quality(lam));
            ++placed;
        }
        for (; placed < free_alices(); ++placed) {
            if (!meets_bound(weight, bound)) {
                return false;
            }
            weight *= one_sided_factor(n_settings, quality(std::min(1.0, bound / weight)));
        }
        return placed == n_alices || meets_bound(weight, bound);
    }

    /// Smallest-sharpness completion of the free Alices (assumes feasibility).
    [[nodiscard]] std::vector<double> greedy() const {
        const double bound = classical_bound(n_settings);
        std::vector<double> lams;
        double weight = mu * eta;
        for (int k = 0; k < free_alices(); ++k) {
            const double lam = std::min(1.0, bound / weight);
            lams.push_back(lam);
            weight *= one_sided_factor(n_settings, quality(lam));
        }
        return lams;
    }
};

inline constexpr std::array<std::pair<int, int>, 4> kPairs2x2{{{1, 1}, {1, 2}, {2, 1}, {2, 2}}};

/// S^{i,p} for the four pairs of two Alices and two Bobs with A_2, B_2 sharp.
inline std::array<double, 4> values_2x2(int n_settings, double mu, double lam1, double eta1) {
    const std::array<double, 2> alice{lam1, 1.0};
    const std::array<double, 2> bob{eta1, 1.0};
    std::array<double, 4> s{};
    for (std::size_t k = 0; k < kPairs2x2.size(); ++k) {
        s[k] = closed_form(n_settings, mu, alice, bob, kPairs2x2[k].first, kPairs2x2[k].second);
    }
    return s;
}

inline double margin_2x2(int n_settings, double mu, double lam1, double eta1) {
    const auto s = values_2x2(n_settings, mu, lam1, eta1);
    return *std::min_element(s.begin(), s.end()) - classical_bound(n_settings);
}

/// Maximizer of a quasi-concave function on [lo, hi] by golden-section search.
inline std::pair<double, double> golden_max(const std::function<double(double)> &f, double lo,
                                            double hi) {
    const double inv_phi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > 1e-13) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        }
    }
    double best_x = 0.5 * (a + b);
    double best = f(best_x);
    for (double x : {lo, hi}) {
        if (const double v = f(x); v > best) {
            best = v;
            best_x = x;
        }
    }
    return {best_x, best};
}

/**
 * Best worst-pair margin over eta1 for a fixed lam1. On a column the pairs
 * (1,1), (2,1) grow with eta1 and (1,2), (2,2) shrink, so the minimum over
 * pairs is quasi-concave in eta1.
 */
inline double column_margin_2x2(int n_settings, double mu, double lam1) {
    return golden_max([&](double eta) { return margin_2x2(n_settings, mu, lam1, eta); }, 0.0, 1.0)
        .second;
}

/// max over (lam1, eta1) of the worst-pair margin: dense scan, then local refinement.
inline double best_margin_2x2(int n_settings, double mu) {
    constexpr int kScan = 2000;
    int best_k = 0;
    double best = -1.0;
    for (int k = 0; k <= kScan; ++k) {
        const double v = column_margin_2x2(n_settings, mu, static_cast<double>(k) / kScan);
        if (v > best) {
            best = v;
            best_k = k;
        }
    }
    const double lo = std::max(0, best_k - 1) / static_cast<double>(kScan);
    const double hi = std::min(kScan, best_k + 1) / static_cast<double>(kScan);
    const auto refined = golden_max(
        [&](double lam) { return column_margin_2x2(n_settings, mu, lam); }, lo, hi);
    return std::max(best, refined.second);
}

inline void require_grid_step(double step) {
    if (!(step > 0.0 && step <= 0.5)) {
        throw DomainError("grid step " + std::to_string(step) + " outside (0, 0.5]");
    }
}

inline std::vector<double> unit_grid(double step) {
    require_grid_step(step);
    const auto count = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
    std::vector<double> grid(count + 1);
    for (std::size_t k = 0; k <= count; ++k) {
        grid[k] = std::min(1.0, static_cast<double>(k) * step);
    }
    return grid;
}

} // namespace detail

/**
 * Smallest sharpness for the next Alice that still violates against a Bob of
 * sharpness eta, after the given predecessors. S is linear in the current
 * sharpness, so the threshold is C_N / (mu * eta * prod of predecessor
 * factors). Returns nullopt when even a sharp measurement falls short.
 */
inline std::optional<double> min_sharpness_for_violation(int n, double mu,
                                                         std::span<const double> predecessors,
                                                         double eta = 1.0) {
    require_supported_setting_count(n);
    detail::require_unit_interval(mu, "mu");
    detail::require_unit_interval(eta, "eta");
    double weight = mu * eta;
    for (double lam : predecessors) {
        detail::require_unit_interval(lam, "predecessor sharpness");
        weight *= detail::one_sided_factor(n, detail::quality(lam));
    }
    const double bound = classical_bound(n);
    if (!detail::meets_bound(weight, bound)) {
        return std::nullopt;
    }
    return std::min(1.0, bound / weight);
}

/// Number of Alices that can steer one sharp Bob when each takes its minimal violating sharpness.
inline int max_alices(int n, double mu) {
    require_supported_setting_count(n);
    detail::require_unit_interval(mu, "mu");
    std::vector<double> chain;
    // the weight shrinks by at least (1 + 2F)/3 < 1 per Alice, so this terminates well before 64
    while (chain.size() < 64) {
        const auto next = min_sharpness_for_violation(n, mu, chain);
        if (!next) {
            break;
        }
        chain.push_back(*next);
    }
    return static_cast<int>(chain.size());
}

/**
 * Sharpness ranges for n_alices Alices sharing steering with one Bob.
 *
 * With two or more Alices the last one is sharp; with three or more the Bob is
 * sharp too, otherwise his sharpness is ranged. Each interval is the set of
 * values the observer can take while some choice of the remaining free
 * observers keeps every stage violating.
 */
inline std::optional<std::vector<SharpnessInterval>> sharpness_ranges(int n, int n_alices,
                                                                      double mu) {
    require_supported_setting_count(n);
    detail::require_unit_interval(mu, "mu");
    if (n_alices < 1) {
        throw DomainError("sharpness_ranges: need at least one Alice");
    }
    const bool bob_sharp = n_alices >= 3;
    const detail::AliceChain chain{n, mu, 1.0, n_alices, n_alices >= 2};
    if (!chain.feasible({})) {
        return std::nullopt;
    }

    std::vector<SharpnessInterval> out;
    const std::vector<double> cheapest = chain.greedy();
    for (int j = 0; j < chain.free_alices(); ++j) {
        std::vector<double> prefix(cheapest.begin(), cheapest.begin() + j);
        auto with = [&](double lam) {
            prefix.resize(static_cast<std::size_t>(j));
            prefix.push_back(lam);
            return chain.feasible(prefix);
        };
        const double lo = cheapest[static_cast<std::size_t>(j)];
        const double hi = with(1.0) ? 1.0 : detail::bisect_last_true(with, lo, 1.0);
        out.push_back({"A" + std::to_string(j + 1), lo, hi});
    }
    if (chain.last_sharp) {
        out.push_back({"A" + std::to_string(n_alices), 1.0, 1.0});
    }
    if (bob_sharp) {
        out.push_back({"B1", 1.0, 1.0});
    } else {
        auto with_eta = [&](double eta) {
            detail::AliceChain c = chain;
            c.eta = eta;
            return c.feasible({});
        };
        out.push_back({"B1", detail::bisect_first_true(with_eta, 0.0, 1.0), 1.0});
    }
    return out;
}

enum class MonitoredPairs { all, first_bob_only };

/**
 * Whether three Alices and two Bobs can all violate at once, with A_3 and B_2
 * sharp, by scanning (lam1, lam2, eta1) on a grid. first_bob_only drops the
 * B_2 pairs, reducing the check to three Alices against one Bob.
 */
inline bool check_3x2_overlap(int n, double mu, double grid_step,
                              MonitoredPairs monitored = MonitoredPairs::all) {
    require_supported_setting_count(n);
    detail::require_unit_interval(mu, "mu");
    const std::vector<double> grid = detail::unit_grid(grid_step);
    const double bound = classical_bound(n);
    const int n_bobs = monitored == MonitoredPairs::all ? 2 : 1;
    std::atomic<bool> found{false};
    parallel_for(grid.size(), [&](std::size_t a) {
        if (found.load(std::memory_order_relaxed)) {
            return;
        }
        std::array<double, 3> alice{grid[a], 0.0, 1.0};
        std::array<double, 2> bob{0.0, 1.0};
        for (double lam2 : grid) {
            alice[1] = lam2;
            for (double eta1 : grid) {
                bob[0] = eta1;
                bool all = true;
                for (int i = 1; i <= 3 && all; ++i) {
                    for (int p = 1; p <= n_bobs && all; ++p) {
                        all = detail::closed_form(n, mu, alice, bob, i, p) >= bound;
                    }
                }
                if (all) {
                    found.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        }
    });
    return found.load();
}

/**
 * Infimum of the initial Werner weight for which n_alices Alices and n_bobs
 * Bobs can all violate, with the last observer on each side sharp. Found by
 * bisection over mu; nullopt when infeasible even for the pure singlet.
 */
inline std::optional<double> min_purity(int n, int n_alices, int n_bobs) {
    require_supported_setting_count(n);
    if (n_alices < 1 || n_bobs < 1 || n_bobs > 2) {
        throw DomainError("min_purity: supports >= 1 Alice with one or two Bobs, got " +
                          std::to_string(n_alices) + " x " + std::to_string(n_bobs));
    }
    std::function<bool(double)> feasible;
    if (n_bobs == 1 || (n_bobs == 2 && n_alices == 1)) {
        // one Alice with two Bobs is the mirror image of two Alices with one Bob
        const int chain_length = n_bobs == 1 ? n_alices : 2;
        feasible = [=](double mu) {
            return detail::AliceChain{n, mu, 1.0, chain_length, chain_length >= 2}.feasible({});
        };
    } else if (n_alices == 2) {
        feasible = [=](double mu) { return detail::best_margin_2x2(n, mu) >= -kBoundarySlack; };
    } else {
        // any feasible k x 2 configuration with k >= 3 contains a feasible 3 x 2 one
        if (!check_3x2_overlap(n, 1.0, kDefaultOverlapStep)) {
            return std::nullopt;
        }
        throw DomainError("min_purity: three or more Alices with two Bobs is not supported");
    }
    if (!feasible(1.0)) {
        return std::nullopt;
    }
    return detail::bisect_first_true(feasible, 0.0, 1.0);
}

struct RegionPoint {
    double lambda1 = 0.0;
    double eta1 = 0.0;
    std::array<double, 4> s{}; ///< S^{1,1}, S^{1,2}, S^{2,1}, S^{2,2}
    bool in_region = false;
};

struct IsoPoint {
    double lambda1 = 0.0;
    double eta1 = 0.0;
};

struct ValueRange {
    double lo = 0.0;
    double hi = 0.0;
    [[nodiscard]] double width() const { return hi - lo; }
};

/// Two Alices and two Bobs with A_2, B_2 sharp, sampled over (lambda1, eta1).
struct RegionScan {
    int n_settings = 0;
    double mu = 0.0;
    double grid_step = 0.0;
    double bound = 0.0;
    /// Every grid point, lambda1-major.
    std::vector<RegionPoint> points;
    /// Per pair in RegionPoint::s order: points with S^{i,p} = C_N, one per lambda1 column that crosses.
    std::array<std::vector<IsoPoint>, 4> boundary_curves;
    /**
     * lambda1 values on the grid for which some eta1 in [0, 1] puts the point in
     * the region (eta1 solved exactly, not sampled). By exchange symmetry this
     * is also the eta1 range.
     */
    std::optional<ValueRange> lambda_extent;
    /// Grid points with lambda1 = eta1 inside the region.
    std::optional<ValueRange> diagonal_extent;

    [[nodiscard]] std::vector<std::pair<double, double>> cells() const {
        std::vector<std::pair<double, double>> out;
        for (const auto &pt : points) {
            if (pt.in_region) {
                out.emplace_back(pt.lambda1, pt.eta1);
            }
        }
        return out;
    }
};

inline RegionScan region_scan_2x2(int n, double mu, double grid_step = kDefaultRegionStep) {
    require_supported_setting_count(n);
    detail::require_unit_interval(mu, "mu");
    const std::vector<double> grid = detail::unit_grid(grid_step);
    const std::size_t g = grid.size();

    RegionScan scan;
    scan.n_settings = n;
    scan.mu = mu;
    scan.grid_step = grid_step;
    scan.bound = classical_bound(n);
    scan.points.resize(g * g);

    std::vector<char> column_feasible(g, 0);
    std::vector<std::array<std::optional<double>, 4>> crossings(g);
    parallel_for(g, [&](std::size_t a) {
        const double lam = grid[a];
        for (std::size_t b = 0; b < g; ++b) {
            RegionPoint &pt = scan.points[a * g + b];
            pt.lambda1 = lam;
            pt.eta1 = grid[b];
            pt.s = detail::values_2x2(n, mu, lam, grid[b]);
            pt.in_region = std::all_of(pt.s.begin(), pt.s.end(),
                                       [&](double s) { return s >= scan.bound; });
        }
        column_feasible[a] = detail::column_margin_2x2(n, mu, lam) >= -kBoundarySlack;
        // each S is monotone in eta1 along a column, so a sign change brackets the single root
        for (std::size_t k = 0; k < 4; ++k) {
            auto excess = [&](double eta) { return detail::values_2x2(n, mu, lam, eta)[k] - scan.bound; };
            const double at0 = excess(0.0);
            const double at1 = excess(1.0);
            if ((at0 < 0.0) == (at1 < 0.0)) {
                continue;
            }
            const bool rising = at1 > at0;
            crossings[a][k] = detail::bisect_first_true(
                [&](double eta) { return (excess(eta) >= 0.0) == rising; }, 0.0, 1.0);
        }
    });

    for (std::size_t a = 0; a < g; ++a) {
        for (std::size_t k = 0; k < 4; ++k) {
            if (crossings[a][k]) {
                scan.boundary_curves[k].push_back({grid[a], *crossings[a][k]});
            }
        }
        if (column_feasible[a]) {
            if (!scan.lambda_extent) {
                scan.lambda_extent = ValueRange{grid[a], grid[a]};
            }
            scan.lambda_extent->hi = grid[a];
        }
        if (scan.points[a * g + a].in_region) {
            if (!scan.diagonal_extent) {
                scan.diagonal_extent = ValueRange{grid[a], grid[a]};
            }
            scan.diagonal_extent->hi = grid[a];
        }
    }
    return scan;
}

} // namespace steerseq
