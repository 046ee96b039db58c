#pragma once

/**
 * @file
 * Fixed-size dense complex matrices for one- and two-qubit operators.
 *
 * Only the 2x2 and 4x4 cases are instantiated. The dimension is a template
 * parameter, so mixing operands of different sizes is rejected at compile
 * time rather than at run time.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace steerseq {

using Complex = std::complex<double>;

/// Raised when an operation is called outside its documented precondition.
class ContractError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Raised when a real-valued parameter lies outside its physical domain.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Raised when an operator expected to be positive semidefinite is not.
class NotPsdError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdClampTol = 1e-12;
inline constexpr double kPsdErrorTol = 1e-9;

template <std::size_t Dim> class Matrix {
    static_assert(Dim == 2 || Dim == 4, "only one- and two-qubit operators");

  public:
    static constexpr std::size_t dim = Dim;

    constexpr Matrix() = default;

    /// Row-major construction; the list must hold exactly Dim*Dim entries.
    Matrix(std::initializer_list<Complex> entries) {
        if (entries.size() != Dim * Dim) {
            throw ContractError("Matrix: expected " + std::to_string(Dim * Dim) +
                                " entries, got " + std::to_string(entries.size()));
        }
        std::copy(entries.begin(), entries.end(), data_.begin());
    }

    static Matrix identity() {
        Matrix m;
        for (std::size_t i = 0; i < Dim; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static Matrix diagonal(const std::array<double, Dim> &d) {
        Matrix m;
        for (std::size_t i = 0; i < Dim; ++i) {
            m(i, i) = d[i];
        }
        return m;
    }

    Complex &operator()(std::size_t row, std::size_t col) { return data_[row * Dim + col]; }
    const Complex &operator()(std::size_t row, std::size_t col) const {
        return data_[row * Dim + col];
    }

    [[nodiscard]] const std::array<Complex, Dim * Dim> &data() const { return data_; }

    Matrix &operator+=(const Matrix &rhs) {
        for (std::size_t k = 0; k < Dim * Dim; ++k) {
            data_[k] += rhs.data_[k];
        }
        return *this;
    }
    Matrix &operator-=(const Matrix &rhs) {
        for (std::size_t k = 0; k < Dim * Dim; ++k) {
            data_[k] -= rhs.data_[k];
        }
        return *this;
    }
    Matrix &operator*=(Complex s) {
        for (auto &v : data_) {
            v *= s;
        }
        return *this;
    }

    friend Matrix operator+(Matrix lhs, const Matrix &rhs) { return lhs += rhs; }
    friend Matrix operator-(Matrix lhs, const Matrix &rhs) { return lhs -= rhs; }
    friend Matrix operator*(Matrix m, Complex s) { return m *= s; }
    friend Matrix operator*(Complex s, Matrix m) { return m *= s; }
    friend Matrix operator*(Matrix m, double s) { return m *= Complex{s, 0.0}; }
    friend Matrix operator*(double s, Matrix m) { return m *= Complex{s, 0.0}; }

    friend Matrix operator*(const Matrix &a, const Matrix &b) {
        Matrix out;
        for (std::size_t i = 0; i < Dim; ++i) {
            for (std::size_t k = 0; k < Dim; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{}) {
                    continue;
                }
                for (std::size_t j = 0; j < Dim; ++j) {
                    out(i, j) += aik * b(k, j);
                }
            }
        }
        return out;
    }

    friend bool operator==(const Matrix &, const Matrix &) = default;

  private:
    std::array<Complex, Dim * Dim> data_{};
};

using Matrix2 = Matrix<2>;
using Matrix4 = Matrix<4>;

template <std::size_t Dim> Matrix<Dim> adjoint(const Matrix<Dim> &m) {
    Matrix<Dim> out;
    for (std::size_t i = 0; i < Dim; ++i) {
        for (std::size_t j = 0; j < Dim; ++j) {
            out(i, j) = std::conj(m(j, i));
        }
    }
    return out;
}

template <std::size_t Dim> Complex trace(const Matrix<Dim> &m) {
    Complex t{};
    for (std::size_t i = 0; i < Dim; ++i) {
        t += m(i, i);
    }
    return t;
}

/// Largest entry-wise modulus of a - b.
template <std::size_t Dim> double max_abs_diff(const Matrix<Dim> &a, const Matrix<Dim> &b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < Dim * Dim; ++k) {
        worst = std::max(worst, std::abs(a.data()[k] - b.data()[k]));
    }
    return worst;
}

template <std::size_t Dim> bool is_finite(const Matrix<Dim> &m) {
    return std::all_of(m.data().begin(), m.data().end(), [](const Complex &z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

template <std::size_t Dim> bool is_hermitian(const Matrix<Dim> &m, double tol = kHermitianTol) {
    return max_abs_diff(m, adjoint(m)) <= tol;
}

/// Kronecker product: result(2i+k, 2j+l) = a(i,j) * b(k,l).
inline Matrix4 tensor(const Matrix2 &a, const Matrix2 &b) {
    Matrix4 out;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t k = 0; k < 2; ++k) {
                for (std::size_t l = 0; l < 2; ++l) {
                    out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

namespace pauli {
inline Matrix2 x() { return Matrix2{0.0, 1.0, 1.0, 0.0}; }
inline Matrix2 y() { return Matrix2{0.0, Complex{0.0, -1.0}, Complex{0.0, 1.0}, 0.0}; }
inline Matrix2 z() { return Matrix2{1.0, 0.0, 0.0, -1.0}; }
} // namespace pauli

/// a0*I + ax*X + ay*Y + az*Z.
inline Matrix2 pauli_combination(double a0, double ax, double ay, double az) {
    return Matrix2{Complex{a0 + az, 0.0}, Complex{ax, -ay}, Complex{ax, ay},
                   Complex{a0 - az, 0.0}};
}

/// Spectral data of a 2x2 Hermitian operator, eigenvalues in descending order.
struct Eigen2 {
    std::array<double, 2> values{};
    std::array<Matrix2, 2> projectors{};
};

/**
 * Closed-form eigendecomposition of a 2x2 Hermitian operator.
 *
 * Writes h = a0*I + a.sigma, so the eigenvalues are a0 +/- |a| with
 * projectors (I +/- a.sigma/|a|)/2. A degenerate spectrum is split along z.
 */
inline Eigen2 eig_hermitian_2x2(const Matrix2 &h) {
    if (!is_finite(h) || !is_hermitian(h)) {
        throw ContractError("eig_hermitian_2x2: operator is not Hermitian");
    }
    const double a0 = 0.5 * (h(0, 0).real() + h(1, 1).real());
    double ax = h(1, 0).real();
    double ay = h(1, 0).imag();
    double az = 0.5 * (h(0, 0).real() - h(1, 1).real());
    const double r = std::sqrt(ax * ax + ay * ay + az * az);

    Eigen2 out;
    out.values = {a0 + r, a0 - r};
    if (r == 0.0) {
        ax = 0.0;
        ay = 0.0;
        az = 1.0;
    } else {
        ax /= r;
        ay /= r;
        az /= r;
    }
    out.projectors[0] = pauli_combination(0.5, 0.5 * ax, 0.5 * ay, 0.5 * az);
    out.projectors[1] = pauli_combination(0.5, -0.5 * ax, -0.5 * ay, -0.5 * az);
    return out;
}

/// Unique Hermitian positive square root of a 2x2 PSD operator.
inline Matrix2 positive_sqrt_2x2(const Matrix2 &p) {
    const Eigen2 eig = eig_hermitian_2x2(p);
    Matrix2 root;
    for (std::size_t k = 0; k < 2; ++k) {
        double v = eig.values[k];
        if (v < -kPsdErrorTol) {
            throw NotPsdError("positive_sqrt_2x2: eigenvalue " + std::to_string(v) +
                              " is negative");
        }
        // everything in [-kPsdErrorTol, 0) is round-off from channel compositions
        v = std::max(v, 0.0);
        root += eig.projectors[k] * std::sqrt(v);
    }
    return root;
}

/**
 * Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
 *
 * Only used to validate positivity of two-qubit states, not as a general
 * spectral tool. Values are returned in ascending order.
 */
template <std::size_t Dim> std::array<double, Dim> hermitian_eigenvalues(Matrix<Dim> a) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < Dim; ++p) {
            for (std::size_t q = p + 1; q < Dim; ++q) {
                off += std::norm(a(p, q));
            }
        }
        if (off < 1e-30) {
            break;
        }
        for (std::size_t p = 0; p < Dim; ++p) {
            for (std::size_t q = p + 1; q < Dim; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag < 1e-300) {
                    continue;
                }
                // rotate in the (p,q) plane after removing the phase of a(p,q)
                const Complex phase = a(p, q) / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = 0.5 * std::atan2(2.0 * mag, aqq - app);
                const double c = std::cos(theta);
                const double s = std::sin(theta);
                // A <- J^H A J with J = diag(1, conj(phase)) * [[c, s], [-s, c]]
                for (std::size_t k = 0; k < Dim; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = c * akp - s * std::conj(phase) * akq;
                    a(k, q) = s * akp + c * std::conj(phase) * akq;
                }
                for (std::size_t k = 0; k < Dim; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = c * apk - s * phase * aqk;
                    a(q, k) = s * apk + c * phase * aqk;
                }
            }
        }
    }
    std::array<double, Dim> values{};
    for (std::size_t i = 0; i < Dim; ++i) {
        values[i] = a(i, i).real();
    }
    std::sort(values.begin(), values.end());
    return values;
}

} // namespace steerseq
