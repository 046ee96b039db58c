#pragma once

#include <array>
#include <cmath>
#include <string>

#include "matrix.hpp"

namespace steerseq {

/// Unit direction on the Bloch sphere.
class BlochVector {
  public:
    static constexpr double kNormTol = 1e-12;

    /// Accepts (x, y, z) only if it is already unit length.
    static BlochVector unit(double x, double y, double z) {
        const double n2 = x * x + y * y + z * z;
        if (!std::isfinite(n2) || std::abs(n2 - 1.0) > kNormTol) {
            throw DomainError("BlochVector: squared norm " + std::to_string(n2) +
                              " is not 1");
        }
        return BlochVector(x, y, z);
    }

    /// Scales a nonzero (x, y, z) onto the sphere.
    static BlochVector normalized(double x, double y, double z) {
        const double n = std::sqrt(x * x + y * y + z * z);
        if (!std::isfinite(n) || n == 0.0) {
            throw DomainError("BlochVector: cannot normalize a zero vector");
        }
        return BlochVector(x / n, y / n, z / n);
    }

    static BlochVector x_axis() { return BlochVector(1.0, 0.0, 0.0); }
    static BlochVector y_axis() { return BlochVector(0.0, 1.0, 0.0); }
    static BlochVector z_axis() { return BlochVector(0.0, 0.0, 1.0); }

    [[nodiscard]] double x() const { return c_[0]; }
    [[nodiscard]] double y() const { return c_[1]; }
    [[nodiscard]] double z() const { return c_[2]; }
    [[nodiscard]] const std::array<double, 3> &components() const { return c_; }

    [[nodiscard]] double dot(const BlochVector &o) const {
        return c_[0] * o.c_[0] + c_[1] * o.c_[1] + c_[2] * o.c_[2];
    }

    BlochVector operator-() const { return BlochVector(-c_[0], -c_[1], -c_[2]); }

    /// m . sigma
    [[nodiscard]] Matrix2 sigma() const { return pauli_combination(0.0, c_[0], c_[1], c_[2]); }

    /// Applies a 3x3 rotation (row-major) and renormalizes against drift.
    [[nodiscard]] BlochVector rotated(const std::array<std::array<double, 3>, 3> &r) const {
        std::array<double, 3> v{};
        for (std::size_t i = 0; i < 3; ++i) {
            v[i] = r[i][0] * c_[0] + r[i][1] * c_[1] + r[i][2] * c_[2];
        }
        return normalized(v[0], v[1], v[2]);
    }

    friend bool operator==(const BlochVector &, const BlochVector &) = default;

  private:
    BlochVector(double x, double y, double z) : c_{x, y, z} {}
    std::array<double, 3> c_;
};

} // namespace steerseq
