// dynamics.hpp: steady states and two-time correlations via quantum regression

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "frf/error.hpp"
#include "frf/qmath.hpp"
#include "frf/system.hpp"

namespace frf {

struct SteadyState {
    Operator rho;          // physical density operator, unit trace
    double residual = 0.0; // max |L vec(rho)|
    double clipped = 0.0;  // eigenvalue mass removed by the positivity fix-up

    cplx expect(const Operator& op) const { return (op * rho).trace(); }
};

/// Steady state of L with Hermiticity and positivity enforced.
///
/// The positivity check runs in the rescaled frame, where rho~ = S rho S
/// is congruent to rho and has order-one entries; negative eigenvalues
/// up to 1e-8 of the spectrum are clipped and the trace restored.
inline SteadyState steady_state(const Superoperator& generator, const DiagonalFrame& frame = {}) {
    constexpr double max_clip = 1e-8;
    const CVector v = steady_vector(generator, frame);

    CMatrix rho_f = unvec(frame.to_frame(v)).matrix();
    rho_f = 0.5 * (rho_f + rho_f.adjoint()).eval();

    Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho_f);
    if (eig.info() != Eigen::Success) throw NumericalError("steady_state: eigensolver failed");
    const Eigen::VectorXd lam = eig.eigenvalues();
    const double top = std::max(lam.maxCoeff(), 0.0);
    double negative = 0.0;
    for (Index i = 0; i < lam.size(); ++i)
        if (lam(i) < 0.0) negative += -lam(i);
    const double clipped = top > 0.0 ? negative / top : negative;
    if (clipped > max_clip)
        throw NumericalError("steady_state: unphysical steady state, negative eigenvalue mass " +
                             std::to_string(clipped) + " (min eigenvalue " + std::to_string(lam.minCoeff()) + ")");
    if (negative > 0.0) {
        const Eigen::VectorXd fixed = lam.cwiseMax(0.0);
        rho_f = eig.eigenvectors() * fixed.cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint();
        rho_f = 0.5 * (rho_f + rho_f.adjoint()).eval();
    }

    CVector out = frame.from_frame(vec(Operator(rho_f)));
    out /= weighted_trace(out, {});
    Operator rho = unvec(out);
    // Hermitian to rounding after the diagonal rescaling; make it exact.
    rho = Operator(0.5 * (rho.matrix() + rho.matrix().adjoint()));

    SteadyState ss{rho, 0.0, clipped};
    ss.residual = (generator.matrix() * vec(ss.rho)).cwiseAbs().maxCoeff();
    return ss;
}

/// n points uniformly spaced on [t0, t1].
inline std::vector<double> uniform_grid(double t0, double t1, std::size_t n) {
    detail::require(n >= 2 && t1 > t0, "uniform_grid: need n >= 2 and t1 > t0");
    std::vector<double> g(n);
    const double h = (t1 - t0) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = t0 + h * static_cast<double>(i);
    g.back() = t1;
    return g;
}

/// Default correlation grid: [0, max(20/gamma, 20/width, 10 * 2pi/rabi)], 2001 points.
/// Pass width <= 0 or rabi <= 0 to drop the corresponding term.
inline std::vector<double> default_tau_grid(double gamma, double width, double rabi, std::size_t n = 2001) {
    double span = 20.0 / gamma;
    if (width > 0.0) span = std::max(span, 20.0 / width);
    if (rabi > 0.0) span = std::max(span, 20.0 * std::numbers::pi / rabi);
    return uniform_grid(0.0, span, n);
}

inline void validate_taus(std::span<const double> taus) {
    detail::require(!taus.empty(), "tau grid must be non-empty");
    for (std::size_t i = 0; i < taus.size(); ++i) {
        detail::require(std::isfinite(taus[i]) && taus[i] >= 0.0, "tau grid must be finite and non-negative");
        if (i > 0) detail::require(taus[i] > taus[i - 1], "tau grid must be strictly ascending");
    }
}

/// tr[probe e^{L tau}(left rho_ss right)] for every tau.
inline std::vector<cplx> two_time_correlator(const Superoperator& generator, const SteadyState& ss,
                                             const Operator& left, const Operator& right, const Operator& probe,
                                             std::span<const double> taus, const DiagonalFrame& frame = {},
                                             PropagatorOptions opts = {}) {
    validate_taus(taus);
    detail::require(left.dim() == generator.hilbert_dim() && right.dim() == left.dim() && probe.dim() == left.dim(),
                    "two_time_correlator: operator dimensions must match the generator");
    const Operator x = left * ss.rho * right;
    const Propagator prop(generator, opts, frame);
    return prop.functional(trace_functional(probe), vec(x), taus);
}

inline std::vector<cplx> two_time_correlator(const Superoperator& generator, const Operator& left,
                                             const Operator& right, const Operator& probe,
                                             std::span<const double> taus, const DiagonalFrame& frame = {}) {
    return two_time_correlator(generator, steady_state(generator, frame), left, right, probe, taus, frame);
}

/// <sigma^+(tau) sigma(0)> in the steady state of the bare driven emitter.
inline std::vector<cplx> first_order_coherence(const EmitterParams& params, std::span<const double> taus) {
    const SystemModel model(params);
    const Superoperator l = build_liouvillian(model);
    const Operator& s = model.sigma();
    return two_time_correlator(l, s, Operator::identity(2), s.adjoint(), taus);
}

} // namespace frf
