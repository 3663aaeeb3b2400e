#include <gtest/gtest.h>

#include "frf/dynamics.hpp"
#include "frf/system.hpp"

using namespace frf;

namespace {

EmitterParams drive(double rabi, double detuning = 0.0) {
    EmitterParams e;
    e.rabi = rabi;
    e.detuning = detuning;
    return e;
}

SensorConfig sensor(double width, double eta, double b = 0.0, double nu = 0.0) {
    return SensorConfig{nu, width, eta, b, true};
}

} // namespace

TEST(SystemModel, DimensionsAndOperators) {
    EXPECT_EQ(SystemModel(drive(1.0)).dim(), 2);
    EXPECT_EQ(SystemModel(drive(1.0), {sensor(1, 1e-3)}).dim(), 4);
    const SystemModel m(drive(1.0), {sensor(1, 1e-3), sensor(1, 1e-3)});
    EXPECT_EQ(m.dim(), 8);
    EXPECT_THROW(SystemModel(drive(1.0), {sensor(1, 1e-3), sensor(1, 1e-3), sensor(1, 1e-3)}), InvalidArgument);
    // sigma lowers the emitter bit (index e*4 + s1*2 + s2).
    EXPECT_EQ(m.sigma()(0, 4), cplx(1.0));
    EXPECT_EQ(m.theta(0)(0, 2), cplx(1.0));
    EXPECT_EQ(m.theta(1)(0, 1), cplx(1.0));
    EXPECT_EQ(m.sensor_excitation(6, 0), 1);
    EXPECT_EQ(m.sensor_excitation(6, 1), 0);
}

TEST(SystemModel, ValidatesParameters) {
    EmitterParams e;
    e.gamma = 0.0;
    EXPECT_THROW(SystemModel{e}, InvalidArgument);
    EXPECT_THROW(SystemModel(drive(1.0), {sensor(0.0, 1e-3)}), InvalidArgument);
    EXPECT_THROW(SystemModel(drive(1.0), {sensor(1.0, 0.0)}), InvalidArgument);
    EXPECT_THROW(SystemModel(drive(-1.0)), InvalidArgument);
}

TEST(Hamiltonian, IsHermitianWithExpectedEntries) {
    const SystemModel m(drive(1.4, 0.3), {sensor(0.5, 0.01, 2.0, 0.7), sensor(0.5, 0.01, 2.0, -0.2)});
    const Operator h = build_hamiltonian(m);
    EXPECT_TRUE(h.is_hermitian(0.0));
    EXPECT_NEAR(h(4, 4).real(), 0.3, 1e-15);          // |e,0,0>: detuning only
    EXPECT_NEAR(h(0, 4).real(), 0.7, 1e-15);          // Rabi coupling Omega/2
    EXPECT_NEAR(h(2, 4).real(), 0.01, 1e-15);         // eta sigma theta1^+
    EXPECT_NEAR(h(2, 0).real(), 0.02, 1e-15);         // background b eta
    EXPECT_NEAR(h(3, 3).real(), 0.7 - 0.2, 1e-15);    // both sensors excited
}

TEST(Liouvillian, PreservesTrace) {
    const SystemModel m(drive(2.0, 0.5), {sensor(0.3, 0.02, 1.0), sensor(0.3, 0.02, 1.0)});
    const Superoperator l = build_liouvillian(m);
    const CVector tr = trace_functional(Operator::identity(m.dim()));
    EXPECT_LT((tr.transpose() * l.matrix()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Liouvillian, ScalesLinearlyWithRates) {
    const double s = 3.5;
    EmitterParams e = drive(0.7, 0.2);
    EmitterParams es = e;
    es.gamma *= s;
    es.rabi *= s;
    es.detuning *= s;
    const Superoperator a = build_liouvillian(SystemModel(e, {sensor(0.4, 0.01, 0.5, 0.1)}));
    const Superoperator b = build_liouvillian(SystemModel(es, {sensor(0.4 * s, 0.01 * s, 0.5, 0.1 * s)}));
    EXPECT_LT((b.matrix() - s * a.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Liouvillian, BareEmitterPopulationMatchesBlochSolution) {
    for (double rabi : {0.1, 0.5, 2.0})
        for (double det : {0.0, 0.7}) {
            const SystemModel m(drive(rabi, det));
            const SteadyState ss = steady_state(build_liouvillian(m));
            const double expected = 0.25 * rabi * rabi / (det * det + 0.25 + 0.5 * rabi * rabi);
            EXPECT_NEAR(ss.rho(1, 1).real(), expected, 1e-13) << rabi << " " << det;
        }
}

TEST(Liouvillian, BackgroundOnlySensorMatchesDrivenTwoLevelSolution) {
    const double width = 0.4, eta = 0.01, b = 7.0;
    SensorConfig s{0.0, width, eta, b, false};
    const SystemModel m(drive(1.0), {s});
    const SteadyState ss = steady_state(build_liouvillian(m), sensor_frame(m));
    const double drive_amp = b * eta;
    const double expected = drive_amp * drive_amp / (width * width / 4.0 + 2.0 * drive_amp * drive_amp);
    EXPECT_NEAR(ss.expect(m.number(0)).real() / expected, 1.0, 1e-10);
}

TEST(SensorFrame, ScalesBySensorExcitations) {
    const SystemModel m(drive(1.0), {sensor(0.5, 1e-3), sensor(0.25, 1e-3)});
    const DiagonalFrame f = sensor_frame(m);
    const double q1 = 1e-3 / 0.5, q2 = 1e-3 / 0.25;
    EXPECT_DOUBLE_EQ(f.scales()(0), 1.0);
    EXPECT_DOUBLE_EQ(f.scales()(4), 1.0);
    EXPECT_DOUBLE_EQ(f.scales()(2), 1.0 / q1);
    EXPECT_DOUBLE_EQ(f.scales()(1), 1.0 / q2);
    EXPECT_DOUBLE_EQ(f.scales()(7), 1.0 / (q1 * q2));
    // Strongly excited sensors are left unscaled.
    const SystemModel strong(drive(1.0), {sensor(0.5, 0.4, 10.0)});
    EXPECT_TRUE((sensor_frame(strong).scales().array() == 1.0).all());
}

TEST(EmitterReduced, WeakSensorsLeaveEmitterUnchanged) {
    const EmitterParams e = drive(1.2);
    const SystemModel m(e, {sensor(0.5, 1e-4), sensor(0.5, 1e-4)});
    const SteadyState full = steady_state(build_liouvillian(m), sensor_frame(m));
    const SteadyState bare = steady_state(build_liouvillian(SystemModel(e)));
    const Operator red = emitter_reduced(m, full.rho);
    EXPECT_LT((red.matrix() - bare.rho.matrix()).cwiseAbs().maxCoeff(), 1e-6);
}
