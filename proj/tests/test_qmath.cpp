#include <gtest/gtest.h>

#include <random>

#include "frf/qmath.hpp"
#include "frf/system.hpp"

using namespace frf;

namespace {

CMatrix random_matrix(Index n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> d;
    CMatrix m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = cplx(d(rng), d(rng));
    return m;
}

// Classical RK4 for dv/dt = L v.
CVector rk4(const CMatrix& l, CVector v, double t, int steps) {
    const double h = t / steps;
    for (int s = 0; s < steps; ++s) {
        const CVector k1 = l * v;
        const CVector k2 = l * (v + 0.5 * h * k1);
        const CVector k3 = l * (v + 0.5 * h * k2);
        const CVector k4 = l * (v + h * k3);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return v;
}

Superoperator emitter_sensor_generator(double eta = 0.05) {
    EmitterParams e;
    e.rabi = 1.3;
    e.detuning = 0.2;
    return build_liouvillian(SystemModel(e, {SensorConfig{0.1, 0.7, eta, 0.0}}));
}

} // namespace

TEST(Operator, RejectsMalformedMatrices) {
    EXPECT_THROW(Operator(CMatrix(2, 3)), InvalidArgument);
    CMatrix bad = CMatrix::Identity(2, 2);
    bad(0, 1) = cplx(std::nan(""), 0.0);
    EXPECT_THROW(Operator{bad}, InvalidArgument);
}

TEST(Kron, MatchesElementwiseDefinition) {
    const CMatrix a = random_matrix(2, 1);
    const CMatrix b = random_matrix(3, 2);
    const CMatrix k = kron(Operator(a), Operator(b)).matrix();
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j)
            for (Index p = 0; p < 3; ++p)
                for (Index q = 0; q < 3; ++q) EXPECT_EQ(k(i * 3 + p, j * 3 + q), a(i, j) * b(p, q));
}

TEST(Vectorization, RoundTripsAndStacksColumns) {
    const Operator x(random_matrix(3, 3));
    const CVector v = vec(x);
    EXPECT_EQ(v(1), x(1, 0));
    EXPECT_EQ(v(3), x(0, 1));
    EXPECT_EQ(unvec(v).matrix(), x.matrix());
}

TEST(Superoperators, SandwichActsAsLeftRightProduct) {
    const Operator a(random_matrix(3, 4));
    const Operator b(random_matrix(3, 5));
    const Operator x(random_matrix(3, 6));
    const CVector lhs = sandwich(a, b).apply(vec(x));
    const CVector rhs = vec(a * x * b);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((spre(a).apply(vec(x)) - vec(a * x)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((spost(b).apply(vec(x)) - vec(x * b)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Superoperators, TraceFunctionalComputesTraceOfProduct) {
    const Operator p(random_matrix(4, 7));
    const Operator x(random_matrix(4, 8));
    const cplx got = trace_functional(p).transpose() * vec(x);
    EXPECT_NEAR(std::abs(got - (p * x).trace()), 0.0, 1e-12);
}

TEST(Propagator, EigenRouteMatchesRungeKutta) {
    const Superoperator l = emitter_sensor_generator();
    const CVector v0 = vec(Operator(random_matrix(4, 9)));
    const Propagator prop(l);
    ASSERT_EQ(prop.method(), PropagatorMethod::eigendecomposition);
    for (double t : {0.0, 0.37, 1.3, 4.0}) {
        const CVector ref = rk4(l.matrix(), v0, t, 4000);
        EXPECT_LT((prop.apply(v0, t) - ref).cwiseAbs().maxCoeff(), 1e-7) << "t = " << t;
    }
}

TEST(Propagator, PadeRouteAgreesWithEigenRoute) {
    const Superoperator l = emitter_sensor_generator();
    const CVector v0 = vec(Operator(random_matrix(4, 10)));
    const Propagator eig(l);
    const Propagator pade(l, PropagatorOptions{0.0});
    ASSERT_EQ(pade.method(), PropagatorMethod::pade);
    const std::vector<double> ts{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
    const auto stepped = pade.evolve(v0, ts);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        EXPECT_LT((stepped[k] - eig.apply(v0, ts[k])).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT((pade.apply(v0, ts[k]) - eig.apply(v0, ts[k])).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Propagator, FunctionalEqualsContractionOfAppliedVector) {
    const Superoperator l = emitter_sensor_generator();
    const CVector v0 = vec(Operator(random_matrix(4, 11)));
    const CVector w = trace_functional(Operator(random_matrix(4, 12)));
    const Propagator prop(l);
    const std::vector<double> ts{0.0, 0.3, 2.0};
    const auto got = prop.functional(w, v0, ts);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const cplx ref = w.transpose() * prop.apply(v0, ts[k]);
        EXPECT_LT(std::abs(got[k] - ref), 1e-11);
    }
}

TEST(Propagator, RescaledFrameGivesSamePhysicalEvolution) {
    EmitterParams e;
    e.rabi = 0.8;
    const SystemModel m(e, {SensorConfig{0.0, 0.5, 0.02, 0.0}, SensorConfig{0.0, 0.5, 0.02, 0.0}});
    const Superoperator l = build_liouvillian(m);
    const CVector v0 = vec(Operator(random_matrix(8, 13)));
    const Propagator plain(l);
    const Propagator framed(l, {}, sensor_frame(m));
    for (double t : {0.2, 1.7}) {
        const CVector a = plain.apply(v0, t);
        EXPECT_LT((framed.apply(v0, t) - a).cwiseAbs().maxCoeff(), 1e-9 * a.cwiseAbs().maxCoeff());
    }
}

TEST(DiagonalFrame, TransformIsSimilarity) {
    const Superoperator l = emitter_sensor_generator();
    Eigen::VectorXd s(4);
    s << 1.0, 3.0, 0.5, 7.0;
    const DiagonalFrame f(s);
    const CVector v = vec(Operator(random_matrix(4, 14)));
    const CVector lhs = f.transform(l).apply(f.to_frame(v));
    const CVector rhs = f.to_frame(l.apply(v));
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((f.from_frame(f.to_frame(v)) - v).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_THROW(DiagonalFrame(Eigen::VectorXd::Zero(2)), InvalidArgument);
}

TEST(SteadyVector, FindsNormalizedNullVector) {
    const Superoperator l = emitter_sensor_generator();
    const CVector v = steady_vector(l);
    EXPECT_LT(l.apply(v).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(std::abs(unvec(v).trace() - 1.0), 0.0, 1e-12);
}

TEST(SteadyVector, ReportsMissingAndDegenerateNullSpaces) {
    EXPECT_THROW(steady_vector(Superoperator(2, -CMatrix::Identity(4, 4))), NumericalError);
    try {
        steady_vector(Superoperator::zero(2));
        FAIL() << "expected a degenerate null space error";
    } catch (const NumericalError& ex) {
        EXPECT_NE(std::string(ex.what()).find("dimension 4"), std::string::npos) << ex.what();
    }
}

TEST(ExpmApply, ZeroTimeIsIdentity) {
    const Superoperator l = emitter_sensor_generator();
    const CVector v = vec(Operator(random_matrix(4, 15)));
    EXPECT_LT((expm_apply(l, v, 0.0) - v).cwiseAbs().maxCoeff(), 1e-12);
}
