#include <gtest/gtest.h>

#include <complex>

#include "frf/dynamics.hpp"
#include "frf/filtercorr.hpp"

using namespace frf;

namespace {

EmitterParams drive(double rabi) {
    EmitterParams e;
    e.rabi = rabi;
    return e;
}

// Resonant two-level g2 in closed form (gamma = 1, Omega > 1/4).
double g2_closed(double rabi, double tau) {
    const double w = std::sqrt(rabi * rabi - 1.0 / 16.0);
    return 1.0 - std::exp(-0.75 * tau) * (std::cos(w * tau) + 0.75 / w * std::sin(w * tau));
}

// Bloch equations in (rho_ee, rho_eg) integrated by RK4 from the ground state.
double bloch_excited(double rabi, double t, double h) {
    using C = std::complex<double>;
    const C i(0.0, 1.0);
    double ee = 0.0;
    C eg = 0.0;
    auto f = [&](double a, C b, double& da, C& db) {
        da = (-i * (rabi / 2.0) * (std::conj(b) - b)).real() - a;
        db = -i * (rabi / 2.0) * (1.0 - 2.0 * a) - 0.5 * b;
    };
    const int n = static_cast<int>(std::round(t / h));
    for (int s = 0; s < n; ++s) {
        double a1, a2, a3, a4;
        C b1, b2, b3, b4;
        f(ee, eg, a1, b1);
        f(ee + 0.5 * h * a1, eg + 0.5 * h * b1, a2, b2);
        f(ee + 0.5 * h * a2, eg + 0.5 * h * b2, a3, b3);
        f(ee + h * a3, eg + h * b3, a4, b4);
        ee += h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
        eg += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    }
    return ee;
}

} // namespace

TEST(SteadyState, IsAPhysicalDensityMatrix) {
    const SystemModel m(drive(1.5), {SensorConfig{0.0, 0.3, 3e-4, 0.0}, SensorConfig{0.0, 0.3, 3e-4, 0.0}});
    const SteadyState ss = steady_state(build_liouvillian(m), sensor_frame(m));
    EXPECT_NEAR(std::abs(ss.rho.trace() - 1.0), 0.0, 1e-12);
    EXPECT_TRUE(ss.rho.is_hermitian(0.0));
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(ss.rho.matrix());
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-14);
    EXPECT_LE(ss.clipped, 1e-8);
}

TEST(UnfilteredG2, MatchesClosedFormAtResonance) {
    const std::vector<double> taus = uniform_grid(0.0, 15.0, 301);
    for (double rabi : {0.5, 2.0, 5.0}) {
        const CorrelationTrace tr = unfiltered_g2(drive(rabi), taus);
        for (std::size_t k = 0; k < taus.size(); ++k)
            EXPECT_NEAR(tr.values[k], g2_closed(rabi, taus[k]), 1e-10) << rabi << " " << taus[k];
    }
}

TEST(UnfilteredG2, MatchesBlochIntegrationAtHalfLifetime) {
    const EmitterParams e = drive(2.0);
    const std::vector<double> taus{0.5};
    const double rho_ss = 0.25 * 4.0 / (0.25 + 0.5 * 4.0);
    const double ref = bloch_excited(2.0, 0.5, 1e-4) / rho_ss;
    EXPECT_NEAR(unfiltered_g2(e, taus).values[0], ref, 1e-8);
}

TEST(UnfilteredG2, LimitsAtZeroAndLongDelay) {
    const std::vector<double> taus{0.0, 60.0};
    const CorrelationTrace tr = unfiltered_g2(drive(0.7), taus);
    EXPECT_NEAR(tr.values[0], 0.0, 1e-12);
    EXPECT_NEAR(tr.values[1], 1.0, 1e-10);
    EXPECT_THROW(unfiltered_g2(drive(0.0), taus), InvalidArgument);
}

TEST(FirstOrderCoherence, StartsAtPopulationAndDecaysToCoherentPart) {
    const EmitterParams e = drive(0.9);
    const std::vector<double> taus{0.0, 80.0};
    const auto g1 = first_order_coherence(e, taus);
    const SystemModel m(e);
    const SteadyState ss = steady_state(build_liouvillian(m));
    EXPECT_NEAR(std::abs(g1[0] - ss.rho(1, 1)), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(g1[1] - std::norm(ss.expect(m.sigma()))), 0.0, 1e-12);
}

TEST(TwoTimeCorrelator, FrameDoesNotChangePhysicalResult) {
    const SystemModel m(drive(1.1), {SensorConfig{0.0, 0.6, 0.05, 0.0}, SensorConfig{0.0, 0.6, 0.05, 0.0}});
    const Superoperator l = build_liouvillian(m);
    const std::vector<double> taus = uniform_grid(0.0, 5.0, 11);
    const auto plain = two_time_correlator(l, m.theta(0), m.theta(0).adjoint(), m.number(1), taus);
    const auto framed = two_time_correlator(l, m.theta(0), m.theta(0).adjoint(), m.number(1), taus, sensor_frame(m));
    for (std::size_t k = 0; k < taus.size(); ++k) EXPECT_LT(std::abs(plain[k] - framed[k]), 1e-9 * std::abs(plain[k]));
}

TEST(Grids, DefaultSpanAndValidation) {
    const auto g = default_tau_grid(1.0, 0.1, 0.0);
    EXPECT_EQ(g.size(), 2001u);
    EXPECT_DOUBLE_EQ(g.back(), 200.0);
    EXPECT_DOUBLE_EQ(default_tau_grid(1.0, 5.0, 0.0).back(), 20.0);
    const std::vector<double> descending{1.0, 0.5};
    EXPECT_THROW(validate_taus(descending), InvalidArgument);
    const std::vector<double> negative{-1.0, 0.5};
    EXPECT_THROW(validate_taus(negative), InvalidArgument);
    EXPECT_THROW(uniform_grid(1.0, 0.0, 5), InvalidArgument);
}
