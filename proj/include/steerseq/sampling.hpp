#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "bloch.hpp"
#include "steering.hpp"

namespace steerseq {

/// Uniform direction on the sphere.
inline BlochVector random_bloch(std::mt19937_64 &rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (;;) {
        const double x = gauss(rng);
        const double y = gauss(rng);
        const double z = gauss(rng);
        if (x * x + y * y + z * z > 1e-12) {
            return BlochVector::normalized(x, y, z);
        }
    }
}

/// Rotation by angle about a unit axis (Rodrigues), row-major.
inline std::array<std::array<double, 3>, 3> rotation_matrix(const BlochVector &axis, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double t = 1.0 - c;
    const double x = axis.x();
    const double y = axis.y();
    const double z = axis.z();
    return {{{t * x * x + c, t * x * y - s * z, t * x * z + s * y},
             {t * x * y + s * z, t * y * y + c, t * y * z - s * x},
             {t * x * z - s * y, t * y * z + s * x, t * z * z + c}}};
}

inline std::array<std::array<double, 3>, 3> random_rotation(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    return rotation_matrix(random_bloch(rng), angle(rng));
}

/// Random setting count, purity and 1..max observers per side with uniform sharpness.
inline Scenario random_scenario(std::mt19937_64 &rng, int max_alices = 3, int max_bobs = 3) {
    std::uniform_int_distribution<std::size_t> pick_n(0, kSupportedSettings.size() - 1);
    std::uniform_int_distribution<int> pick_m(1, max_alices);
    std::uniform_int_distribution<int> pick_b(1, max_bobs);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Scenario s;
    s.n_settings = kSupportedSettings[pick_n(rng)];
    s.mu = unit(rng);
    s.alice_sharpness.resize(static_cast<std::size_t>(pick_m(rng)));
    s.bob_sharpness.resize(static_cast<std::size_t>(pick_b(rng)));
    for (auto &v : s.alice_sharpness) {
        v = unit(rng);
    }
    for (auto &v : s.bob_sharpness) {
        v = unit(rng);
    }
    return s;
}

/// Largest |closed form - oracle| over every pair of `samples` random scenarios.
inline double oracle_sweep_max_deviation(std::mt19937_64 &rng, int samples, int max_alices = 3,
                                         int max_bobs = 3) {
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Scenario s = random_scenario(rng, max_alices, max_bobs);
        const auto report = evaluate(s, true);
        worst = std::max(worst, *report.oracle_max_deviation);
    }
    return worst;
}

} // namespace steerseq
