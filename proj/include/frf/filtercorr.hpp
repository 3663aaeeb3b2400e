// filtercorr.hpp: frequency-filtered second-order correlations from the
// two-sensor master equation.
//
// g2_Gamma(tau) = tr[n2 e^{L tau}(theta1 rho_ss theta1^+)] / (<n1>_ss <n2>_ss)
//
// in the limit of vanishing sensor coupling eta. The limit is taken with a
// finite eta ladder: eta0 = 1e-3 min(gamma, Gamma), accepted once halving
// eta moves g2 by less than 1e-3 max(1, g2).

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frf/dynamics.hpp"
#include "frf/error.hpp"
#include "frf/instrument.hpp"
#include "frf/qmath.hpp"
#include "frf/system.hpp"
#include "frf/trace.hpp"

namespace frf {

/// Both sensors share width and center (auto-correlation of one filter).
/// `center2` lets callers detune the second sensor for cross-correlations.
struct FilterSpec {
    double width = 1.0;
    double center = 0.0;
    std::optional<double> center2;

    double second_center() const { return center2.value_or(center); }
};

struct G2Options {
    std::optional<double> eta;     // starting coupling; default 1e-3 min(gamma, width)
    bool check_eta = true;         // run the halving protocol before computing traces
    int max_halvings = 4;
    double eta_tolerance = 1e-3;   // relative to max(1, g2)
    double b_max = 1e3;            // bisection bracket for the background amplitude
    PropagatorOptions propagator{};
};

inline constexpr double max_background_fraction = 0.2;

struct BackgroundCalibration {
    double beta = 0.0;     // requested background fraction
    double solved_b = 0.0; // amplitude b in the sensor drive b * eta
    double achieved = 0.0; // forward-evaluated fraction at solved_b
};

struct EtaConvergence {
    double eta = 0.0;      // accepted coupling
    double g2_eta = 0.0;   // g2 at eta
    double g2_half = 0.0;  // g2 at eta / 2
    int halvings = 0;      // halvings applied to the starting coupling
    bool accepted = false;
};

namespace detail {

inline void validate_filter(const EmitterParams& emitter, const FilterSpec& filter) {
    emitter.validate();
    require(std::isfinite(filter.width) && filter.width > 0.0, "filter width must be positive");
    require(std::isfinite(filter.center) && std::isfinite(filter.second_center()), "filter center must be finite");
}

inline void validate_beta(double beta) {
    require(std::isfinite(beta) && beta >= 0.0 && beta <= max_background_fraction,
            "background fraction beta must lie in [0, 0.2]");
}

inline double default_eta(const EmitterParams& emitter, const FilterSpec& filter) {
    return 1e-3 * std::min(emitter.gamma, filter.width);
}

/// Steady state of the emitter plus two identical-width sensors.
struct SensorSolution {
    SystemModel model;
    Superoperator generator;
    DiagonalFrame frame;
    SteadyState ss;
    double n1 = 0.0;
    double n2 = 0.0;
};

inline SensorSolution solve_sensors(const EmitterParams& emitter, const FilterSpec& filter, double eta, double b,
                                    bool couple_emitter = true) {
    SensorConfig s1{filter.center, filter.width, eta, b, couple_emitter};
    SensorConfig s2{filter.second_center(), filter.width, eta, b, couple_emitter};
    SystemModel model(emitter, {s1, s2});
    Superoperator l = build_liouvillian(model);
    DiagonalFrame frame = sensor_frame(model);
    SteadyState ss = steady_state(l, frame);
    const double n1 = ss.expect(model.number(0)).real();
    const double n2 = ss.expect(model.number(1)).real();
    if (!(n1 > 0.0 && n2 > 0.0)) throw NumericalError("filtered g2: sensors are not excited (zero population)");
    return {std::move(model), std::move(l), std::move(frame), std::move(ss), n1, n2};
}

inline double real_checked(cplx v, const char* what) {
    if (!(std::abs(v.imag()) < 1e-9 * std::max(1.0, std::abs(v.real()))))
        throw NumericalError(std::string(what) + ": imaginary part " + std::to_string(v.imag()) +
                             " exceeds 1e-9; convention or propagation error");
    return v.real();
}

inline double g2_zero(const SensorSolution& s) {
    const Operator& th1 = s.model.theta(0);
    const cplx num = (s.model.number(1) * th1 * s.ss.rho * th1.adjoint()).trace();
    return real_checked(num / (s.n1 * s.n2), "filtered g2(0)");
}

inline std::vector<double> g2_trace(const SensorSolution& s, std::span<const double> taus,
                                    const PropagatorOptions& opts) {
    const Operator& th1 = s.model.theta(0);
    const auto raw = two_time_correlator(s.generator, s.ss, th1, th1.adjoint(), s.model.number(1), taus, s.frame, opts);
    std::vector<double> out;
    out.reserve(raw.size());
    for (const cplx& v : raw) out.push_back(real_checked(v / (s.n1 * s.n2), "filtered g2(tau)"));
    // tau = 0 needs no propagation; use the same expression as g2_zero.
    if (!taus.empty() && taus.front() == 0.0) out.front() = g2_zero(s);
    return out;
}

inline double g2_at(const EmitterParams& emitter, const FilterSpec& filter, double eta, double b, double tau,
                    const PropagatorOptions& opts) {
    const SensorSolution s = solve_sensors(emitter, filter, eta, b);
    if (tau == 0.0) return g2_zero(s);
    const double t[1] = {tau};
    return g2_trace(s, t, opts).front();
}

/// Fraction of sensor-1 population due to the background drive alone.
inline double background_ratio(const EmitterParams& emitter, const FilterSpec& filter, double eta, double b) {
    if (b == 0.0) return 0.0;
    const double bg = solve_sensors(emitter, filter, eta, b, false).n1;
    const double total = solve_sensors(emitter, filter, eta, b, true).n1;
    return bg / total;
}

inline EtaConvergence eta_ladder(const EmitterParams& emitter, const FilterSpec& filter, double b, double tau_probe,
                                 const G2Options& opts) {
    double eta = opts.eta.value_or(default_eta(emitter, filter));
    require(std::isfinite(eta) && eta > 0.0, "eta must be positive");
    double g_eta = g2_at(emitter, filter, eta, b, tau_probe, opts.propagator);
    for (int h = 0; h <= opts.max_halvings; ++h) {
        const double g_half = g2_at(emitter, filter, 0.5 * eta, b, tau_probe, opts.propagator);
        if (std::abs(g_eta - g_half) < opts.eta_tolerance * std::max(1.0, g_half))
            return {eta, g_eta, g_half, h, true};
        eta *= 0.5;
        g_eta = g_half;
    }
    throw NumericalError("eta convergence failed after " + std::to_string(opts.max_halvings) +
                         " halvings (eta now " + std::to_string(eta) +
                         "); sensor back-action is not negligible or numerics broke down");
}

} // namespace detail

/// Solve for the background amplitude b that makes the background-only
/// sensor population a fraction beta of the total sensor population.
inline BackgroundCalibration calibrate_background(const EmitterParams& emitter, const FilterSpec& filter, double beta,
                                                  const G2Options& opts = {}) {
    detail::validate_filter(emitter, filter);
    detail::validate_beta(beta);
    if (beta == 0.0) return {};
    const double eta = opts.eta.value_or(detail::default_eta(emitter, filter));

    double lo = 0.0;
    double hi = opts.b_max;
    const double at_hi = detail::background_ratio(emitter, filter, eta, hi);
    if (!(at_hi > beta))
        throw NumericalError("calibrate_background: root not bracketed (fraction " + std::to_string(at_hi) +
                             " at b_max = " + std::to_string(hi) + "); use a larger b_max");
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::background_ratio(emitter, filter, eta, mid) < beta)
            lo = mid;
        else
            hi = mid;
    }
    const double b = 0.5 * (lo + hi);
    const double achieved = detail::background_ratio(emitter, filter, eta, b);
    if (std::abs(achieved - beta) > 1e-6)
        throw NumericalError("calibrate_background: forward check failed (" + std::to_string(achieved) + ")");
    return {beta, b, achieved};
}

/// Run the eta halving protocol for g2 at tau_probe.
inline EtaConvergence eta_convergence(const EmitterParams& emitter, const FilterSpec& filter, double beta,
                                      double tau_probe = 0.0, const G2Options& opts = {}) {
    detail::validate_filter(emitter, filter);
    detail::validate_beta(beta);
    detail::require(std::isfinite(tau_probe) && tau_probe >= 0.0, "tau_probe must be non-negative");
    const double b = calibrate_background(emitter, filter, beta, opts).solved_b;
    return detail::eta_ladder(emitter, filter, b, tau_probe, opts);
}

/// Frequency-filtered g2 on the given tau grid.
inline CorrelationTrace filtered_g2(const EmitterParams& emitter, const FilterSpec& filter, double beta,
                                   std::span<const double> taus, const G2Options& opts = {}) {
    detail::validate_filter(emitter, filter);
    detail::validate_beta(beta);
    validate_taus(taus);

    CorrelationTrace out;
    if (filter.width < 1e-4 * emitter.gamma)
        out.meta.warnings.push_back("filter width below 1e-4 gamma: check that the tau grid spans the filter response");

    const BackgroundCalibration cal = calibrate_background(emitter, filter, beta, opts);
    double eta = opts.eta.value_or(detail::default_eta(emitter, filter));
    if (opts.check_eta) eta = detail::eta_ladder(emitter, filter, cal.solved_b, 0.0, opts).eta;

    const detail::SensorSolution s = detail::solve_sensors(emitter, filter, eta, cal.solved_b);
    out.taus.assign(taus.begin(), taus.end());
    out.values = detail::g2_trace(s, taus, opts.propagator);
    out.meta.rabi = emitter.rabi;
    out.meta.gamma = emitter.gamma;
    out.meta.width = filter.width;
    out.meta.nu1 = filter.center;
    out.meta.nu2 = filter.second_center();
    out.meta.eta = eta;
    out.meta.beta = beta;
    out.meta.background = cal.solved_b;
    return out;
}

/// Filtered g2(0) only; no propagation needed.
inline double filtered_g2_zero(const EmitterParams& emitter, const FilterSpec& filter, double beta,
                               const G2Options& opts = {}) {
    detail::validate_filter(emitter, filter);
    detail::validate_beta(beta);
    const double b = calibrate_background(emitter, filter, beta, opts).solved_b;
    if (opts.check_eta) return detail::eta_ladder(emitter, filter, b, 0.0, opts).g2_eta;
    return detail::g2_at(emitter, filter, opts.eta.value_or(detail::default_eta(emitter, filter)), b, 0.0,
                         opts.propagator);
}

/// Unfiltered g2 of the bare emitter, <s+(0) s+(tau) s(tau) s(0)> / <s+ s>^2.
inline CorrelationTrace unfiltered_g2(const EmitterParams& emitter, std::span<const double> taus) {
    emitter.validate();
    validate_taus(taus);
    const SystemModel model(emitter);
    const Superoperator l = build_liouvillian(model);
    const SteadyState ss = steady_state(l);
    const Operator& s = model.sigma();
    const Operator n = s.adjoint() * s;
    const double pop = ss.expect(n).real();
    if (!(pop > 0.0)) throw InvalidArgument("unfiltered_g2: emitter is not excited (zero drive)");
    const auto raw = two_time_correlator(l, ss, s, s.adjoint(), n, taus);

    CorrelationTrace out;
    out.taus.assign(taus.begin(), taus.end());
    for (const cplx& v : raw) out.values.push_back(detail::real_checked(v / (pop * pop), "unfiltered g2"));
    out.meta.rabi = emitter.rabi;
    out.meta.gamma = emitter.gamma;
    out.meta.nu1 = out.meta.nu2 = emitter.detuning;
    return out;
}

enum class SweepAxis { filter_width, rabi };

struct SweepRow {
    double x = 0.0;
    double g2_ideal = 0.0; // beta = 0
    double g2_lo = 0.0;    // beta = beta_lo
    double g2_hi = 0.0;    // beta = beta_hi
    std::optional<double> irf_ideal;
    std::optional<double> irf_lo;
    std::optional<double> irf_hi;
};

struct SweepSpec {
    EmitterParams emitter;
    FilterSpec filter;
    SweepAxis axis = SweepAxis::filter_width;
    double beta_lo = 0.0;
    double beta_hi = 0.0;
    std::optional<GaussianIRF> irf; // fwhm in the same time units as 1/gamma
    G2Options options{};
};

/// tau grid on [0, 6 sigma] for evaluating the convolved g2 at tau = 0.
/// The spacing resolves both the kernel and the fastest system rate.
inline std::vector<double> irf_window_grid(const GaussianIRF& irf, double fastest_rate) {
    detail::require(fastest_rate > 0.0, "irf_window_grid: rate must be positive");
    const double h = std::min(irf.fwhm / 40.0, 0.1 / fastest_rate);
    const auto n = static_cast<std::size_t>(std::ceil(6.0 * irf.sigma() / h)) + 1;
    return uniform_grid(0.0, h * static_cast<double>(n - 1), n);
}

/// g2(0) after IRF convolution.
inline double irf_g2_zero(const EmitterParams& emitter, const FilterSpec& filter, double beta,
                          const GaussianIRF& irf, const G2Options& opts = {}) {
    const double rate = std::max({emitter.gamma, filter.width, emitter.rabi});
    const std::vector<double> taus = irf_window_grid(irf, rate);
    return irf_convolve(filtered_g2(emitter, filter, beta, taus, opts), irf).values.front();
}

/// One sweep point; independent of all others.
inline SweepRow sweep_point(const SweepSpec& spec, double x) {
    detail::require(std::isfinite(x) && x > 0.0, "sweep values must be positive");
    detail::validate_beta(spec.beta_lo);
    detail::validate_beta(spec.beta_hi);
    EmitterParams e = spec.emitter;
    FilterSpec f = spec.filter;
    if (spec.axis == SweepAxis::filter_width)
        f.width = x;
    else
        e.rabi = x;

    SweepRow row;
    row.x = x;
    row.g2_ideal = filtered_g2_zero(e, f, 0.0, spec.options);
    row.g2_lo = spec.beta_lo == 0.0 ? row.g2_ideal : filtered_g2_zero(e, f, spec.beta_lo, spec.options);
    row.g2_hi = spec.beta_hi == spec.beta_lo ? row.g2_lo : filtered_g2_zero(e, f, spec.beta_hi, spec.options);
    if (spec.irf) {
        row.irf_ideal = irf_g2_zero(e, f, 0.0, *spec.irf, spec.options);
        row.irf_lo = spec.beta_lo == 0.0 ? *row.irf_ideal : irf_g2_zero(e, f, spec.beta_lo, *spec.irf, spec.options);
        row.irf_hi = spec.beta_hi == spec.beta_lo ? *row.irf_lo : irf_g2_zero(e, f, spec.beta_hi, *spec.irf, spec.options);
    }
    return row;
}

/// g2(0) against filter width or Rabi frequency, in input order.
inline std::vector<SweepRow> sweep_g2_zero(const SweepSpec& spec, std::span<const double> points) {
    detail::require(!points.empty(), "sweep needs at least one point");
    std::vector<SweepRow> rows;
    rows.reserve(points.size());
    for (double x : points) rows.push_back(sweep_point(spec, x));
    return rows;
}

} // namespace frf
