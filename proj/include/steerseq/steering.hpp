#pragma once

/**
 * @file
 * N-setting linear steering parameters for sequential Alices and Bobs.
 *
 * Two independent evaluation paths are provided:
 *  - steering_parameter_closed(): product formulas in the quality factors
 *    F = sqrt(1 - lambda^2) of the preceding observers;
 *  - steering_parameter_oracle(): builds the shared two-qubit state by
 *    applying every predecessor's Lueders channel to the Werner matrix and
 *    measures the correlation directly.
 *
 * Observers are labelled from 1 (A_1, B_1, ...), matching the physical
 * ordering of the sequence.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "measurements.hpp"
#include "state.hpp"

namespace steerseq {

/// Local-hidden-state bound C_N of the N-setting linear steering inequality.
inline double classical_bound(int n) {
    switch (n) {
    case 2:
        return std::numbers::sqrt2 / 2.0;
    case 3:
    case 4:
        return std::numbers::inv_sqrt3;
    case 6:
        return 0.5393;
    case 10:
        return 0.5236;
    case 16:
        return 0.503;
    default:
        throw DomainError("classical_bound: unsupported number of settings " +
                          std::to_string(n));
    }
}

/// All (N, C_N) pairs in increasing N.
inline std::array<std::pair<int, double>, kSupportedSettings.size()> classical_bound_table() {
    std::array<std::pair<int, double>, kSupportedSettings.size()> table{};
    for (std::size_t k = 0; k < kSupportedSettings.size(); ++k) {
        table[k] = {kSupportedSettings[k], classical_bound(kSupportedSettings[k])};
    }
    return table;
}

/// Initial Werner purity, setting count and the ordered sharpness of every observer.
struct Scenario {
    double mu = 1.0;
    int n_settings = 3;
    std::vector<double> alice_sharpness;
    std::vector<double> bob_sharpness;

    [[nodiscard]] int n_alices() const { return static_cast<int>(alice_sharpness.size()); }
    [[nodiscard]] int n_bobs() const { return static_cast<int>(bob_sharpness.size()); }

    void validate() const {
        (void)WernerParams{mu};
        require_supported_setting_count(n_settings);
        if (alice_sharpness.empty() || bob_sharpness.empty()) {
            throw DomainError("Scenario: needs at least one Alice and one Bob");
        }
        auto check = [](const std::vector<double> &v, const char *who) {
            for (std::size_t k = 0; k < v.size(); ++k) {
                if (!(v[k] >= 0.0 && v[k] <= 1.0)) {
                    throw DomainError(std::string("Scenario: ") + who + "[" +
                                      std::to_string(k + 1) + "] sharpness " +
                                      std::to_string(v[k]) + " outside [0, 1]");
                }
            }
        };
        check(alice_sharpness, "alice");
        check(bob_sharpness, "bob");
    }

    /// Alice and Bob lists exchanged.
    [[nodiscard]] Scenario swapped() const {
        return Scenario{mu, n_settings, bob_sharpness, alice_sharpness};
    }
};

namespace detail {

inline double quality(double sharpness) { return UnsharpMeasurement::quality_factor(sharpness); }

/// Werner-weight retained after one unpaired observer with quality factor f.
inline double one_sided_factor(int n_settings, double f) {
    return n_settings == 2 ? 0.5 * (1.0 + f) : (1.0 + 2.0 * f) / 3.0;
}

/// Weight retained after a matched Alice/Bob round with quality factors fa, fb.
inline double matched_factor(int n_settings, double fa, double fb) {
    return one_sided_factor(n_settings, fa * fb);
}

/**
 * Closed form for i >= p (1-based): predecessors A_1..A_{i-p} act alone, then
 * A_{j+i-p} is paired with B_j for j = 1..p-1.
 */
inline double closed_form_ordered(int n_settings, double mu, std::span<const double> longer,
                                  std::span<const double> shorter, int i, int p) {
    double s = mu * longer[static_cast<std::size_t>(i - 1)] *
               shorter[static_cast<std::size_t>(p - 1)];
    for (int j = 1; j <= p - 1; ++j) {
        s *= matched_factor(n_settings, quality(longer[static_cast<std::size_t>(j + i - p - 1)]),
                            quality(shorter[static_cast<std::size_t>(j - 1)]));
    }
    for (int l = 1; l <= i - p; ++l) {
        s *= one_sided_factor(n_settings, quality(longer[static_cast<std::size_t>(l - 1)]));
    }
    return s;
}

/// Unvalidated closed form; the hot path for parameter scans.
inline double closed_form(int n_settings, double mu, std::span<const double> alice,
                          std::span<const double> bob, int i, int p) {
    if (i >= p) {
        return closed_form_ordered(n_settings, mu, alice, bob, i, p);
    }
    return closed_form_ordered(n_settings, mu, bob, alice, p, i);
}

inline void require_pair_index(const Scenario &s, int i, int p) {
    if (i < 1 || i > s.n_alices() || p < 1 || p > s.n_bobs()) {
        throw DomainError("observer pair (A_" + std::to_string(i) + ", B_" + std::to_string(p) +
                          ") outside scenario with " + std::to_string(s.n_alices()) +
                          " Alices and " + std::to_string(s.n_bobs()) + " Bobs");
    }
}

} // namespace detail

/**
 * State shared by A_i and B_p after every earlier observer has measured and
 * been averaged out. For i >= p the first i-p Alices measure on their own,
 * then the remaining predecessors act as matched pairs (A_{j+i-p}, B_j).
 * The p > i case mirrors this with the roles exchanged.
 */
inline DensityMatrix shared_state(const Scenario &scenario, int i, int p,
                                  const SettingSet &settings) {
    scenario.validate();
    detail::require_pair_index(scenario, i, p);
    DensityMatrix rho = werner_state(scenario.mu);
    const auto &lam = scenario.alice_sharpness;
    const auto &eta = scenario.bob_sharpness;
    if (i >= p) {
        for (int l = 1; l <= i - p; ++l) {
            rho = luders_one_side(rho, lam[static_cast<std::size_t>(l - 1)], settings,
                                  Side::alice);
        }
        for (int j = 1; j <= p - 1; ++j) {
            rho = luders_matched_pair(rho, lam[static_cast<std::size_t>(j + i - p - 1)],
                                      eta[static_cast<std::size_t>(j - 1)], settings);
        }
    } else {
        for (int l = 1; l <= p - i; ++l) {
            rho = luders_one_side(rho, eta[static_cast<std::size_t>(l - 1)], settings, Side::bob);
        }
        for (int j = 1; j <= i - 1; ++j) {
            rho = luders_matched_pair(rho, lam[static_cast<std::size_t>(j - 1)],
                                      eta[static_cast<std::size_t>(j + p - i - 1)], settings);
        }
    }
    return rho;
}

/// Density-matrix evaluation with an explicit (possibly rotated) axis set.
inline double steering_parameter_oracle(const Scenario &scenario, int i, int p,
                                        const SettingSet &settings) {
    if (settings.n_settings() != scenario.n_settings) {
        throw ContractError("steering_parameter_oracle: setting set size mismatch");
    }
    const DensityMatrix rho = shared_state(scenario, i, p, settings);
    const double lam = scenario.alice_sharpness[static_cast<std::size_t>(i - 1)];
    const double eta = scenario.bob_sharpness[static_cast<std::size_t>(p - 1)];
    double sum = 0.0;
    for (std::size_t k = 0; k < settings.alice_dirs().size(); ++k) {
        sum += two_qubit_correlation(rho, settings.alice_dirs()[k], settings.bob_dirs()[k]);
    }
    return lam * eta * sum / static_cast<double>(settings.n_settings());
}

/// S_N^{i,p} = (1/N) sum_k lambda_i eta_p Tr[rho^{i,p} (m_k.sigma (x) n_k.sigma)].
inline double steering_parameter_oracle(const Scenario &scenario, int i, int p) {
    scenario.validate();
    return steering_parameter_oracle(scenario, i, p, polyhedron_settings(scenario.n_settings));
}

/// S_N^{i,p} from the product formulas in the predecessors' quality factors.
inline double steering_parameter_closed(const Scenario &scenario, int i, int p) {
    scenario.validate();
    detail::require_pair_index(scenario, i, p);
    return detail::closed_form(scenario.n_settings, scenario.mu, scenario.alice_sharpness,
                               scenario.bob_sharpness, i, p);
}

struct SteeringReport {
    int n_settings = 0;
    double mu = 0.0;
    double bound = 0.0;
    std::vector<std::vector<double>> values; ///< values[i-1][p-1] = S_N^{i,p}
    std::vector<std::vector<bool>> violated;
    std::vector<std::vector<double>> margin; ///< S - C_N
    /// Largest |closed - oracle| over all cells, present when verification ran.
    std::optional<double> oracle_max_deviation;

    [[nodiscard]] int violation_count() const {
        int count = 0;
        for (const auto &row : violated) {
            count += static_cast<int>(std::count(row.begin(), row.end(), true));
        }
        return count;
    }
};

/// Evaluates every (A_i, B_p) pair; with verify set, re-derives each cell from the oracle.
inline SteeringReport evaluate(const Scenario &scenario, bool verify = false) {
    scenario.validate();
    SteeringReport report;
    report.n_settings = scenario.n_settings;
    report.mu = scenario.mu;
    report.bound = classical_bound(scenario.n_settings);
    const auto m = static_cast<std::size_t>(scenario.n_alices());
    const auto n = static_cast<std::size_t>(scenario.n_bobs());
    report.values.assign(m, std::vector<double>(n, 0.0));
    report.margin.assign(m, std::vector<double>(n, 0.0));
    report.violated.assign(m, std::vector<bool>(n, false));
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < n; ++p) {
            const int ii = static_cast<int>(i + 1);
            const int pp = static_cast<int>(p + 1);
            const double s = steering_parameter_closed(scenario, ii, pp);
            report.values[i][p] = s;
            report.margin[i][p] = s - report.bound;
            report.violated[i][p] = s >= report.bound;
            if (verify) {
                worst = std::max(worst, std::abs(s - steering_parameter_oracle(scenario, ii, pp)));
            }
        }
    }
    if (verify) {
        report.oracle_max_deviation = worst;
    }
    return report;
}

} // namespace steerseq
