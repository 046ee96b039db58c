#pragma once

/**
 * @file
 * Two-qubit density matrices and the Werner family.
 *
 * Basis order is |00>, |01>, |10>, |11>; the first factor is Alice's qubit.
 */

#include <algorithm>
#include <cmath>
#include <string>

#include "bloch.hpp"
#include "matrix.hpp"

namespace steerseq {

inline constexpr double kStateTol = 1e-10;

/// A validated two-qubit state: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
  public:
    explicit DensityMatrix(const Matrix4 &mat) : mat_(mat) {
        if (!is_finite(mat_)) {
            throw ContractError("DensityMatrix: non-finite entry");
        }
        if (!is_hermitian(mat_, kStateTol)) {
            throw ContractError("DensityMatrix: not Hermitian");
        }
        const Complex tr = trace(mat_);
        if (std::abs(tr - Complex{1.0, 0.0}) > kStateTol) {
            throw ContractError("DensityMatrix: trace " + std::to_string(tr.real()) +
                                " is not 1");
        }
        const double lowest = hermitian_eigenvalues(mat_)[0];
        if (lowest < -kPsdErrorTol) {
            throw NotPsdError("DensityMatrix: eigenvalue " + std::to_string(lowest) +
                              " is negative");
        }
    }

    [[nodiscard]] const Matrix4 &matrix() const { return mat_; }
    [[nodiscard]] const Complex &operator()(std::size_t r, std::size_t c) const {
        return mat_(r, c);
    }

    static DensityMatrix maximally_mixed() { return DensityMatrix(Matrix4::identity() * 0.25); }

  private:
    Matrix4 mat_;
};

/// Mixing weight of the singlet in a Werner state.
class WernerParams {
  public:
    explicit WernerParams(double mu) : mu_(mu) {
        if (!(mu >= 0.0 && mu <= 1.0)) {
            throw DomainError("WernerParams: mu = " + std::to_string(mu) + " outside [0, 1]");
        }
    }
    [[nodiscard]] double mu() const { return mu_; }

  private:
    double mu_;
};

/// |psi><psi| for psi = (|01> - |10>)/sqrt(2).
inline Matrix4 singlet_projector() {
    Matrix4 s;
    s(1, 1) = 0.5;
    s(2, 2) = 0.5;
    s(1, 2) = -0.5;
    s(2, 1) = -0.5;
    return s;
}

/// mu |psi><psi| + (1 - mu) I/4.
inline DensityMatrix werner_state(double mu) {
    const WernerParams params(mu);
    return DensityMatrix(singlet_projector() * params.mu() +
                         Matrix4::identity() * (0.25 * (1.0 - params.mu())));
}

struct WernerFit {
    WernerParams params;
    double distance; ///< max-entry distance to werner_state(params.mu())
};

/**
 * Projects a state onto the Werner family through its singlet fidelity:
 * mu = (4 <psi|rho|psi> - 1)/3, clamped to [0, 1].
 */
inline WernerFit nearest_werner(const DensityMatrix &rho) {
    const double fidelity = trace(singlet_projector() * rho.matrix()).real();
    const double mu = std::clamp((4.0 * fidelity - 1.0) / 3.0, 0.0, 1.0);
    const DensityMatrix fit = werner_state(mu);
    return WernerFit{WernerParams(mu), max_abs_diff(rho.matrix(), fit.matrix())};
}

/// Tr[rho (m.sigma (x) n.sigma)].
inline double two_qubit_correlation(const DensityMatrix &rho, const BlochVector &m,
                                    const BlochVector &n) {
    return trace(rho.matrix() * tensor(m.sigma(), n.sigma())).real();
}

} // namespace steerseq
