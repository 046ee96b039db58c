#pragma once

/**
 * @file
 * Two-outcome unsharp qubit measurements and the outcome-averaged state
 * updates produced by sequential observers.
 *
 * Every observer picks one of the N axes of a SettingSet uniformly at random,
 * so each channel below carries a 1/N weight and is trace preserving.
 */

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "bloch.hpp"
#include "matrix.hpp"
#include "state.hpp"

namespace steerseq {

/// Setting counts backed by a regular-polyhedron axis set.
inline constexpr std::array<int, 6> kSupportedSettings{2, 3, 4, 6, 10, 16};

inline bool is_supported_setting_count(int n) {
    for (int s : kSupportedSettings) {
        if (s == n) {
            return true;
        }
    }
    return false;
}

inline void require_supported_setting_count(int n) {
    if (!is_supported_setting_count(n)) {
        throw DomainError("unsupported number of measurement settings: " + std::to_string(n));
    }
}

/// Matched measurement axes: Bob measures along -m_k whenever Alice measures along m_k.
class SettingSet {
  public:
    static constexpr double kAxisTol = 1e-9;

    explicit SettingSet(std::vector<BlochVector> alice_dirs) : alice_(std::move(alice_dirs)) {
        require_supported_setting_count(static_cast<int>(alice_.size()));
        for (std::size_t i = 0; i < alice_.size(); ++i) {
            for (std::size_t j = i + 1; j < alice_.size(); ++j) {
                if (std::abs(alice_[i].dot(alice_[j])) > 1.0 - kAxisTol) {
                    throw ContractError("SettingSet: axes " + std::to_string(i) + " and " +
                                        std::to_string(j) + " are (anti)parallel");
                }
            }
        }
        bob_.reserve(alice_.size());
        for (const auto &m : alice_) {
            bob_.push_back(-m);
        }
    }

    [[nodiscard]] int n_settings() const { return static_cast<int>(alice_.size()); }
    [[nodiscard]] const std::vector<BlochVector> &alice_dirs() const { return alice_; }
    [[nodiscard]] const std::vector<BlochVector> &bob_dirs() const { return bob_; }

    /// Same set after a common rotation of every Alice axis.
    [[nodiscard]] SettingSet rotated(const std::array<std::array<double, 3>, 3> &r) const {
        std::vector<BlochVector> dirs;
        dirs.reserve(alice_.size());
        for (const auto &m : alice_) {
            dirs.push_back(m.rotated(r));
        }
        return SettingSet(std::move(dirs));
    }

  private:
    std::vector<BlochVector> alice_;
    std::vector<BlochVector> bob_;
};

namespace detail {

inline std::vector<BlochVector> icosahedron_axes() {
    const double phi = std::numbers::phi;
    // vertices (0, +-1, +-phi) and cyclic permutations, one per antipodal pair
    return {BlochVector::normalized(0.0, 1.0, phi),  BlochVector::normalized(0.0, 1.0, -phi),
            BlochVector::normalized(1.0, phi, 0.0),  BlochVector::normalized(1.0, -phi, 0.0),
            BlochVector::normalized(phi, 0.0, 1.0),  BlochVector::normalized(-phi, 0.0, 1.0)};
}

inline std::vector<BlochVector> cube_diagonals() {
    return {BlochVector::normalized(1.0, 1.0, 1.0), BlochVector::normalized(1.0, 1.0, -1.0),
            BlochVector::normalized(1.0, -1.0, 1.0), BlochVector::normalized(-1.0, 1.0, 1.0)};
}

inline std::vector<BlochVector> dodecahedron_axes() {
    const double phi = std::numbers::phi;
    const double inv = 1.0 / phi;
    std::vector<BlochVector> axes = cube_diagonals();
    for (const auto &v : {BlochVector::normalized(0.0, inv, phi),
                          BlochVector::normalized(0.0, inv, -phi),
                          BlochVector::normalized(inv, phi, 0.0),
                          BlochVector::normalized(inv, -phi, 0.0),
                          BlochVector::normalized(phi, 0.0, inv),
                          BlochVector::normalized(-phi, 0.0, inv)}) {
        axes.push_back(v);
    }
    return axes;
}

} // namespace detail

/**
 * Canonical axis set through antipodal vertex pairs of a regular solid:
 * square (2), octahedron (3), cube (4), icosahedron (6), dodecahedron (10),
 * and icosahedron + dodecahedron combined (16).
 */
inline SettingSet polyhedron_settings(int n) {
    require_supported_setting_count(n);
    switch (n) {
    case 2:
        return SettingSet({BlochVector::x_axis(), BlochVector::z_axis()});
    case 3:
        return SettingSet({BlochVector::x_axis(), BlochVector::y_axis(), BlochVector::z_axis()});
    case 4:
        return SettingSet(detail::cube_diagonals());
    case 6:
        return SettingSet(detail::icosahedron_axes());
    case 10:
        return SettingSet(detail::dodecahedron_axes());
    default: {
        auto axes = detail::icosahedron_axes();
        for (const auto &v : detail::dodecahedron_axes()) {
            axes.push_back(v);
        }
        return SettingSet(std::move(axes));
    }
    }
}

enum class Outcome { zero = 0, one = 1 };
inline constexpr std::array<Outcome, 2> kOutcomes{Outcome::zero, Outcome::one};

inline double outcome_sign(Outcome a) { return a == Outcome::zero ? 1.0 : -1.0; }

/// Two-outcome measurement along dir with sharpness in [0, 1].
class UnsharpMeasurement {
  public:
    UnsharpMeasurement(BlochVector dir, double sharpness) : dir_(dir), sharpness_(sharpness) {
        if (!(sharpness >= 0.0 && sharpness <= 1.0)) {
            throw DomainError("UnsharpMeasurement: sharpness " + std::to_string(sharpness) +
                              " outside [0, 1]");
        }
    }

    [[nodiscard]] const BlochVector &dir() const { return dir_; }
    [[nodiscard]] double sharpness() const { return sharpness_; }
    /// Precision G; equal to the sharpness.
    [[nodiscard]] double precision() const { return sharpness_; }
    /// Quality factor F = sqrt(1 - G^2).
    [[nodiscard]] double quality() const { return quality_factor(sharpness_); }

    static double quality_factor(double sharpness) {
        return std::sqrt(std::max(0.0, 1.0 - sharpness * sharpness));
    }

  private:
    BlochVector dir_;
    double sharpness_;
};

/// (I + (-1)^a lambda m.sigma)/2
inline Matrix2 effect(const UnsharpMeasurement &meas, Outcome a) {
    const double g = 0.5 * outcome_sign(a) * meas.sharpness();
    const auto &m = meas.dir();
    return pauli_combination(0.5, g * m.x(), g * m.y(), g * m.z());
}

/// Positive square root of the effect; the Lueders instrument's Kraus operator.
inline Matrix2 kraus(const UnsharpMeasurement &meas, Outcome a) {
    return positive_sqrt_2x2(effect(meas, a));
}

enum class Side { alice, bob };

/**
 * Outcome- and setting-averaged Lueders update by one observer:
 * rho -> (1/N) sum_k sum_a (K_a|m_k (x) I) rho (K_a|m_k (x) I)^dagger,
 * or the same on the second factor with Bob's axes.
 */
inline DensityMatrix luders_one_side(const DensityMatrix &rho, double sharpness,
                                     const SettingSet &settings, Side side) {
    const auto &dirs = side == Side::alice ? settings.alice_dirs() : settings.bob_dirs();
    const Matrix2 id = Matrix2::identity();
    Matrix4 acc;
    for (const auto &dir : dirs) {
        const UnsharpMeasurement meas(dir, sharpness);
        for (Outcome a : kOutcomes) {
            const Matrix2 k = kraus(meas, a);
            const Matrix4 op = side == Side::alice ? tensor(k, id) : tensor(id, k);
            acc += op * rho.matrix() * adjoint(op);
        }
    }
    return DensityMatrix(acc * (1.0 / static_cast<double>(dirs.size())));
}

/// Averaged update when Alice (sharpness lam) and Bob (sharpness eta) measure matched axes.
inline DensityMatrix luders_matched_pair(const DensityMatrix &rho, double lam, double eta,
                                         const SettingSet &settings) {
    Matrix4 acc;
    const auto n = static_cast<std::size_t>(settings.n_settings());
    for (std::size_t k = 0; k < n; ++k) {
        const UnsharpMeasurement ma(settings.alice_dirs()[k], lam);
        const UnsharpMeasurement mb(settings.bob_dirs()[k], eta);
        for (Outcome a : kOutcomes) {
            const Matrix2 ka = kraus(ma, a);
            for (Outcome b : kOutcomes) {
                const Matrix4 op = tensor(ka, kraus(mb, b));
                acc += op * rho.matrix() * adjoint(op);
            }
        }
    }
    return DensityMatrix(acc * (1.0 / static_cast<double>(n)));
}

} // namespace steerseq
