#include <cmath>

#include <gtest/gtest.h>

#include <steerseq/measurements.hpp>
#include <steerseq/state.hpp>

#include "test_support.hpp"

using namespace steerseq;
using steerseq::testing::kSeed;
using steerseq::testing::uniform;

TEST(Werner, FullyMixed) {
    const DensityMatrix rho = werner_state(0.0);
    EXPECT_LT(max_abs_diff(rho.matrix(), Matrix4::identity() * 0.25), 1e-15);
}

TEST(Werner, PureSinglet) {
    const DensityMatrix rho = werner_state(1.0);
    EXPECT_NEAR(rho(1, 1).real(), 0.5, 1e-15);
    EXPECT_NEAR(rho(2, 2).real(), 0.5, 1e-15);
    EXPECT_NEAR(rho(1, 2).real(), -0.5, 1e-15);
    EXPECT_NEAR(rho(2, 1).real(), -0.5, 1e-15);
    EXPECT_NEAR(std::abs(rho(0, 0)) + std::abs(rho(3, 3)) + std::abs(rho(0, 3)), 0.0, 1e-15);
}

TEST(Werner, HalfMixed) {
    const DensityMatrix rho = werner_state(0.5);
    const std::array<double, 4> diag{0.125, 0.375, 0.375, 0.125};
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(rho(k, k).real(), diag[k], 1e-15);
    }
    EXPECT_NEAR(rho(1, 2).real(), -0.25, 1e-15);
}

TEST(Werner, DomainErrors) {
    EXPECT_THROW(werner_state(-0.01), DomainError);
    EXPECT_THROW(werner_state(1.01), DomainError);
    EXPECT_THROW(WernerParams(std::nan("")), DomainError);
}

TEST(Werner, ValidDensityMatrixForRandomMu) {
    std::mt19937_64 rng(kSeed);
    for (int trial = 0; trial < 1000; ++trial) {
        const double mu = uniform(rng);
        // re-validating through the constructor checks every invariant
        EXPECT_NO_THROW(DensityMatrix{werner_state(mu).matrix()});
        const auto w = hermitian_eigenvalues(werner_state(mu).matrix());
        EXPECT_NEAR(w[0], (1.0 - mu) / 4.0, 1e-12);
        EXPECT_NEAR(w[3], (1.0 + 3.0 * mu) / 4.0, 1e-12);
    }
}

TEST(DensityMatrix, RejectsInvalidInput) {
    EXPECT_THROW(DensityMatrix{Matrix4::identity()}, ContractError);   // trace 4
    EXPECT_THROW(DensityMatrix{Matrix4::diagonal({1.2, -0.2, 0, 0})}, NotPsdError);
    Matrix4 skew = Matrix4::identity() * 0.25;
    skew(0, 1) = 0.1;
    EXPECT_THROW(DensityMatrix{skew}, ContractError);
    Matrix4 nan = Matrix4::identity() * 0.25;
    nan(2, 2) = std::nan("");
    EXPECT_THROW(DensityMatrix{nan}, ContractError);
}

TEST(NearestWerner, RoundTrip) {
    const WernerFit fit = nearest_werner(werner_state(0.7));
    EXPECT_NEAR(fit.params.mu(), 0.7, 1e-12);
    EXPECT_LT(fit.distance, 1e-15);
    const WernerFit mixed = nearest_werner(DensityMatrix::maximally_mixed());
    EXPECT_NEAR(mixed.params.mu(), 0.0, 1e-15);
    EXPECT_LT(mixed.distance, 1e-15);
    std::mt19937_64 rng(kSeed + 1);
    for (int trial = 0; trial < 1000; ++trial) {
        const double mu = uniform(rng);
        EXPECT_NEAR(nearest_werner(werner_state(mu)).params.mu(), mu, 1e-12);
    }
}

TEST(NearestWerner, SharpThreeSettingAverageGivesOneThird) {
    const DensityMatrix out = luders_one_side(werner_state(1.0), 1.0, polyhedron_settings(3), Side::alice);
    const WernerFit fit = nearest_werner(out);
    EXPECT_NEAR(fit.params.mu(), 1.0 / 3.0, 1e-12);
    EXPECT_LT(fit.distance, 1e-12);
}

TEST(NearestWerner, NonWernerStateHasDistance) {
    // |00><00| has singlet fidelity 0 and is far from I/4
    const WernerFit fit = nearest_werner(DensityMatrix{Matrix4::diagonal({1, 0, 0, 0})});
    EXPECT_DOUBLE_EQ(fit.params.mu(), 0.0);
    EXPECT_NEAR(fit.distance, 0.75, 1e-15);
}

TEST(Correlation, Examples) {
    const BlochVector z = BlochVector::z_axis();
    EXPECT_NEAR(two_qubit_correlation(werner_state(1.0), z, z), -1.0, 1e-15);
    std::mt19937_64 rng(kSeed + 2);
    for (int trial = 0; trial < 200; ++trial) {
        const BlochVector m = random_bloch(rng);
        const BlochVector n = random_bloch(rng);
        const double mu = uniform(rng);
        EXPECT_NEAR(two_qubit_correlation(werner_state(mu), m, -m), mu, 1e-12);
        EXPECT_NEAR(two_qubit_correlation(DensityMatrix::maximally_mixed(), m, n), 0.0, 1e-15);
    }
}

TEST(Correlation, WernerIsotropy) {
    std::mt19937_64 rng(kSeed + 3);
    for (int trial = 0; trial < 1000; ++trial) {
        const BlochVector m = random_bloch(rng);
        const BlochVector n = random_bloch(rng);
        const double mu = uniform(rng);
        EXPECT_NEAR(two_qubit_correlation(werner_state(mu), m, n), -mu * m.dot(n), 1e-12);
    }
}
