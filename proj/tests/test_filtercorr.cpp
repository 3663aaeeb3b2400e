#include <gtest/gtest.h>

#include "frf/filtercorr.hpp"

using namespace frf;

namespace {

EmitterParams drive(double rabi, double gamma = 1.0) {
    EmitterParams e;
    e.gamma = gamma;
    e.rabi = rabi;
    return e;
}

} // namespace

TEST(FilteredG2, WideFilterRecoversAntibunching) {
    EXPECT_LT(filtered_g2_zero(drive(0.5), FilterSpec{150.0}, 0.0), 0.02);
}

TEST(FilteredG2, NarrowFilterIsPoissonian) {
    EXPECT_NEAR(filtered_g2_zero(drive(0.5), FilterSpec{0.01}, 0.0), 1.0, 0.05);
}

TEST(FilteredG2, StrongDriveNarrowFilterBunches) {
    EXPECT_GT(filtered_g2_zero(drive(2.0), FilterSpec{0.29}, 0.0), 1.0);
}

TEST(FilteredG2, ConvergesToUnfilteredForVeryWideFilters) {
    for (double rabi : {0.5, 2.0}) {
        const auto taus = default_tau_grid(1.0, 500.0, 0.0, 401);
        const auto f = filtered_g2(drive(rabi), FilterSpec{500.0}, 0.0, taus);
        const auto u = unfiltered_g2(drive(rabi), taus);
        for (std::size_t k = 0; k < taus.size(); ++k) EXPECT_NEAR(f.values[k], u.values[k], 0.02);
    }
}

TEST(FilteredG2, TraceIsNonNegativeAndTendsToOne) {
    for (double width : {0.29, 1.0, 23.0}) {
        const auto taus = default_tau_grid(1.0, width, 0.0);
        const auto tr = filtered_g2(drive(0.5), FilterSpec{width}, 0.0, taus);
        for (double v : tr.values) EXPECT_GE(v, -1e-9);
        EXPECT_NEAR(tr.values.back(), 1.0, 2e-2) << width;
        EXPECT_DOUBLE_EQ(tr.meta.width, width);
        EXPECT_GT(tr.meta.eta, 0.0);
    }
}

TEST(FilteredG2, SensorSwapLeavesCorrelationUnchanged) {
    const auto s = detail::solve_sensors(drive(2.0), FilterSpec{0.5}, 5e-4, 0.0);
    const auto taus = uniform_grid(0.0, 8.0, 17);
    const auto fwd = two_time_correlator(s.generator, s.ss, s.model.theta(0), s.model.theta(0).adjoint(),
                                         s.model.number(1), taus, s.frame);
    const auto rev = two_time_correlator(s.generator, s.ss, s.model.theta(1), s.model.theta(1).adjoint(),
                                         s.model.number(0), taus, s.frame);
    for (std::size_t k = 0; k < taus.size(); ++k) EXPECT_LT(std::abs(fwd[k] - rev[k]), 1e-9 * std::abs(fwd[k]));
}

TEST(FilteredG2, EnergyTimeScalingInvariance) {
    const double s = 2.5;
    const auto taus = uniform_grid(0.0, 10.0, 21);
    std::vector<double> scaled(taus.size());
    for (std::size_t k = 0; k < taus.size(); ++k) scaled[k] = taus[k] / s;
    const auto a = filtered_g2(drive(0.8), FilterSpec{0.4}, 0.1, taus);
    const auto b = filtered_g2(drive(0.8 * s, s), FilterSpec{0.4 * s}, 0.1, scaled);
    for (std::size_t k = 0; k < taus.size(); ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-7);
}

TEST(FilteredG2, PureBackgroundIsPoissonian) {
    // No drive: the emitter stays in its ground state and only the laser
    // background reaches the sensors.
    const auto s = detail::solve_sensors(drive(0.0), FilterSpec{0.5}, 1e-3, 5.0);
    const auto taus = uniform_grid(0.0, 20.0, 41);
    for (double v : detail::g2_trace(s, taus, {})) EXPECT_NEAR(v, 1.0, 1e-3);
}

TEST(FilteredG2, RejectsInvalidInputs) {
    const std::vector<double> taus{0.0, 1.0};
    EXPECT_THROW(filtered_g2(drive(0.5), FilterSpec{0.0}, 0.0, taus), InvalidArgument);
    EXPECT_THROW(filtered_g2(drive(0.5), FilterSpec{-1.0}, 0.0, taus), InvalidArgument);
    EXPECT_THROW(filtered_g2(drive(0.5), FilterSpec{1.0}, 0.25, taus), InvalidArgument);
    EXPECT_THROW(filtered_g2(drive(0.5), FilterSpec{1.0}, -0.1, taus), InvalidArgument);
}

TEST(FilteredG2, WarnsForExtremelyNarrowFilters) {
    const std::vector<double> taus{0.0};
    const auto tr = filtered_g2(drive(0.5), FilterSpec{5e-5}, 0.0, taus);
    EXPECT_FALSE(tr.meta.warnings.empty());
    EXPECT_TRUE(filtered_g2(drive(0.5), FilterSpec{0.5}, 0.0, taus).meta.warnings.empty());
}

TEST(FilteredG2, CrossCorrelationOfMollowSidebandsBunches) {
    const double rabi = 6.0;
    const double split = std::sqrt(rabi * rabi - 1.0 / 16.0);
    FilterSpec f{0.5, -split, split};
    const auto s = detail::solve_sensors(drive(rabi), f, 5e-4, 0.0);
    EXPECT_GT(detail::g2_zero(s), 1.0);
}

TEST(EtaConvergence, AcceptsDefaultCouplingAtReferencePoints) {
    const std::pair<double, double> points[] = {{0.5, 0.01}, {0.5, 0.29}, {0.5, 23.0}, {0.5, 150.0},
                                                {2.0, 0.29}, {2.0, 5.0},  {4.0, 0.29}};
    for (const auto& [rabi, width] : points) {
        const auto c = eta_convergence(drive(rabi), FilterSpec{width}, 0.0);
        EXPECT_TRUE(c.accepted);
        EXPECT_EQ(c.halvings, 0) << rabi << " " << width;
        EXPECT_LT(std::abs(c.g2_eta - c.g2_half), 1e-3 * std::max(1.0, c.g2_half));
    }
}

TEST(EtaConvergence, LargeCouplingFailsTheFirstCheck) {
    G2Options o;
    o.eta = 0.5;
    try {
        const auto c = eta_convergence(drive(2.0), FilterSpec{0.29}, 0.0, 0.0, o);
        EXPECT_GT(c.halvings, 0);
        EXPECT_LT(c.eta, 0.5);
    } catch (const NumericalError&) {
        SUCCEED();
    }
    o.max_halvings = 0;
    EXPECT_THROW(eta_convergence(drive(2.0), FilterSpec{0.29}, 0.0, 0.0, o), NumericalError);
}

TEST(EtaConvergence, ContinuousAtZeroBackground) {
    const double a = filtered_g2_zero(drive(2.0), FilterSpec{0.29}, 0.0);
    const double b = filtered_g2_zero(drive(2.0), FilterSpec{0.29}, 1e-9);
    EXPECT_LT(std::abs(a - b), 1e-6);
}

TEST(CalibrateBackground, ZeroFractionMeansNoBackground) {
    const auto c = calibrate_background(drive(2.0), FilterSpec{0.29}, 0.0);
    EXPECT_EQ(c.solved_b, 0.0);
    EXPECT_EQ(c.beta, 0.0);
}

TEST(CalibrateBackground, ForwardCheckReproducesFraction) {
    const EmitterParams e = drive(2.0);
    const FilterSpec f{0.29};
    const auto c = calibrate_background(e, f, 0.2);
    EXPECT_GT(c.solved_b, 0.0);
    const double eta = detail::default_eta(e, f);
    EXPECT_NEAR(detail::background_ratio(e, f, eta, c.solved_b), 0.2, 1e-6);
}

TEST(CalibrateBackground, FractionIsMonotoneInAmplitude) {
    const EmitterParams e = drive(0.5);
    const FilterSpec f{1.0};
    double prev = 0.0;
    for (double b : {0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0}) {
        const double r = detail::background_ratio(e, f, 1e-3, b);
        EXPECT_GT(r, prev) << b;
        prev = r;
    }
}

TEST(CalibrateBackground, ReportsUnbracketedRoot) {
    G2Options o;
    o.b_max = 1e-3;
    EXPECT_THROW(calibrate_background(drive(2.0), FilterSpec{0.29}, 0.2, o), NumericalError);
}

TEST(Sweep, SinglePointEqualsDirectComputation) {
    SweepSpec spec;
    spec.emitter = drive(2.0);
    spec.filter = FilterSpec{1.0};
    spec.beta_hi = 0.2;
    const auto rows = sweep_g2_zero(spec, std::vector<double>{0.29});
    ASSERT_EQ(rows.size(), 1u);
    const std::vector<double> zero{0.0, 1.0};
    EXPECT_EQ(rows[0].g2_ideal, filtered_g2(drive(2.0), FilterSpec{0.29}, 0.0, zero).values[0]);
    EXPECT_EQ(rows[0].g2_hi, filtered_g2(drive(2.0), FilterSpec{0.29}, 0.2, zero).values[0]);
    EXPECT_EQ(rows[0].g2_lo, rows[0].g2_ideal);
}

TEST(Sweep, RabiAxisAndIrfVariants) {
    SweepSpec spec;
    spec.emitter = drive(1.0);
    spec.filter = FilterSpec{0.29};
    spec.axis = SweepAxis::rabi;
    spec.irf = GaussianIRF{1.14};
    const auto rows = sweep_g2_zero(spec, std::vector<double>{0.5, 2.0});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_DOUBLE_EQ(rows[1].g2_ideal, filtered_g2_zero(drive(2.0), FilterSpec{0.29}, 0.0));
    ASSERT_TRUE(rows[1].irf_ideal.has_value());
    // IRF averaging pulls g2(0) towards the neighbouring delays.
    EXPECT_LT(std::abs(*rows[1].irf_ideal - 1.0), std::abs(rows[1].g2_ideal - 1.0));
    EXPECT_THROW(sweep_g2_zero(spec, std::vector<double>{}), InvalidArgument);
    EXPECT_THROW(sweep_g2_zero(spec, std::vector<double>{-1.0}), InvalidArgument);
}
