// spectrum.hpp: resonance-fluorescence spectrum by Liouvillian pole
// decomposition, coherent fraction and filter transmission.
//
// S(w) = (1/pi) Re int_0^inf <s+(tau) s(0)> e^{-i w tau} dtau, with w measured
// from the laser. The fluctuating part is a sum of complex Lorentzians
//   Re[c_k / (pi (kappa_k + i (w - Omega_k)))],  lambda_k = -kappa_k + i Omega_k,
// and the coherent part |<s>|^2 is a Lorentzian of the laser linewidth.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frf/dynamics.hpp"
#include "frf/error.hpp"
#include "frf/qmath.hpp"
#include "frf/system.hpp"

namespace frf {

enum class ComponentKind { coherent, rayleigh, mollow_red, mollow_blue, other };

inline std::string_view to_string(ComponentKind k) {
    switch (k) {
    case ComponentKind::coherent: return "coherent";
    case ComponentKind::rayleigh: return "rayleigh";
    case ComponentKind::mollow_red: return "mollow_red";
    case ComponentKind::mollow_blue: return "mollow_blue";
    case ComponentKind::other: return "other";
    }
    return "other";
}

struct SpectralComponent {
    ComponentKind kind = ComponentKind::other;
    double center = 0.0; // from the laser
    double hwhm = 0.0;
    double weight = 0.0; // fractional area, Re(residue) / <s+ s>
    cplx residue{};      // c_k, in units of <s+ s>; |<s>|^2 for the coherent line
};

enum class SpectrumSampling {
    bin_average, // mean of S over the cell around each grid point (area preserving)
    point,       // S evaluated at each grid point
};

struct SpectrumSamples {
    std::vector<double> omegas;
    std::vector<double> total;
    std::vector<double> coherent;
    std::vector<double> incoherent;
};

struct SpectrumDecomposition {
    std::vector<SpectralComponent> components;
    SpectrumSamples sampled;
    EmitterParams emitter;
    double population = 0.0; // <s+ s>, the area of S
    cplx coherence{};        // <s>

    double weight(ComponentKind k) const {
        double w = 0.0;
        for (const auto& c : components)
            if (c.kind == k) w += c.weight;
        return w;
    }
};

/// 1 / (1 + 2 Omega^2 / gamma^2); equals |<s>|^2 / <s+ s> at resonance.
inline double coherent_fraction(const EmitterParams& emitter) {
    const double r = emitter.rabi / emitter.gamma;
    return 1.0 / (1.0 + 2.0 * r * r);
}

/// Mollow splitting sqrt(Omega^2 - (gamma/4)^2); zero at or below threshold.
inline double mollow_splitting(const EmitterParams& emitter) {
    const double q = emitter.gamma / 4.0;
    return emitter.rabi > q ? std::sqrt(emitter.rabi * emitter.rabi - q * q) : 0.0;
}

/// Fraction of a unit-area Lorentzian (FWHM w, offset delta) transmitted by
/// a peak-normalized Lorentzian filter of FWHM width.
inline double lorentzian_transmission(double line_fwhm, double filter_fwhm, double offset = 0.0) {
    detail::require(std::isfinite(line_fwhm) && line_fwhm >= 0.0, "lorentzian_transmission: line width must be >= 0");
    detail::require(std::isfinite(filter_fwhm) && filter_fwhm > 0.0,
                    "lorentzian_transmission: filter width must be positive");
    if (std::isinf(offset)) return 0.0;
    const double s = line_fwhm + filter_fwhm;
    return filter_fwhm * s / (s * s + 4.0 * offset * offset);
}

namespace detail {

inline ComponentKind classify(const EmitterParams& emitter, double center) {
    const double split = mollow_splitting(emitter);
    if (split == 0.0 || std::abs(center) < 0.5 * split) return ComponentKind::rayleigh;
    return center < 0.0 ? ComponentKind::mollow_red : ComponentKind::mollow_blue;
}

/// int_a^b Re[c / (pi (kappa + i (w - center)))] dw.
inline double lineshape_area(cplx c, double kappa, double center, double a, double b) {
    const cplx za(kappa, a - center);
    const cplx zb(kappa, b - center);
    const cplx d = std::log(zb / za); // continuous: both in the right half plane
    return (c * cplx(0.0, -1.0) * d).real() / std::numbers::pi;
}

inline double lineshape_value(cplx c, double kappa, double center, double w) {
    return (c / (std::numbers::pi * cplx(kappa, w - center))).real();
}

inline double coherent_area(double amplitude, double hwhm, double center, double a, double b) {
    if (hwhm > 0.0) return amplitude * (std::atan((b - center) / hwhm) - std::atan((a - center) / hwhm)) / std::numbers::pi;
    // Monochromatic line: all weight in the cell that contains it, split on a boundary.
    if (center > a && center < b) return amplitude;
    if (center == a || center == b) return 0.5 * amplitude;
    return 0.0;
}

} // namespace detail

/// Pole decomposition of the bare-emitter spectrum (no sampling).
inline SpectrumDecomposition decompose_spectrum(const EmitterParams& emitter) {
    emitter.validate();
    const SystemModel model(emitter);
    const Superoperator l = build_liouvillian(model);
    const SteadyState ss = steady_state(l);
    const Operator& s = model.sigma();
    const double pop = ss.expect(s.adjoint() * s).real();
    if (!(pop > 1e-300)) throw InvalidArgument("emission_spectrum: emitter is not excited (zero drive)");
    const cplx coh = ss.expect(s);

    // Fluctuation source: s rho - <s> rho, which has zero trace.
    const CVector x = vec(s * ss.rho) - coh * vec(ss.rho);
    const CVector w = trace_functional(s.adjoint());

    Eigen::ComplexEigenSolver<CMatrix> eig(l.matrix(), true);
    if (eig.info() != Eigen::Success) throw NumericalError("emission_spectrum: eigensolver failed");
    const CMatrix& v = eig.eigenvectors();
    const CMatrix vinv = v.partialPivLu().inverse();
    const double cond = v.cwiseAbs().colwise().sum().maxCoeff() * vinv.cwiseAbs().colwise().sum().maxCoeff();
    if (!(cond < 1e10))
        throw NumericalError("emission_spectrum: Liouvillian is near an exceptional point (eigenvector condition " +
                             std::to_string(cond) + "); shift the Rabi frequency slightly off Omega = gamma/4");

    const CVector left = (w.transpose() * v).transpose();
    const CVector right = vinv * x;

    SpectrumDecomposition out;
    out.emitter = emitter;
    out.population = pop;
    out.coherence = coh;
    out.components.push_back({ComponentKind::coherent, 0.0, 0.5 * emitter.laser_linewidth, std::norm(coh) / pop,
                              cplx(std::norm(coh))});
    const double scale = l.norm();
    for (Index k = 0; k < v.cols(); ++k) {
        const cplx lam = eig.eigenvalues()(k);
        const cplx c = left(k) * right(k);
        if (std::abs(lam) < 1e-10 * scale) {
            if (std::abs(c) > 1e-10 * pop)
                throw NumericalError("emission_spectrum: steady-state pole carries incoherent weight");
            continue;
        }
        SpectralComponent comp;
        comp.center = lam.imag();
        comp.hwhm = -lam.real();
        comp.residue = c / pop;
        comp.weight = c.real() / pop;
        comp.kind = detail::classify(emitter, comp.center);
        out.components.push_back(comp);
    }
    return out;
}

/// Minimum half-span of the frequency grid, max(5 gamma, 2 Omega + 5 gamma) about the laser.
inline double min_spectrum_halfspan(const EmitterParams& emitter) {
    return std::max(5.0 * emitter.gamma, 2.0 * emitter.rabi + 5.0 * emitter.gamma) + std::abs(emitter.detuning);
}

/// Sampled spectrum plus its decomposition. S integrates to <s+ s>.
inline SpectrumDecomposition emission_spectrum(const EmitterParams& emitter, std::span<const double> omegas,
                                               SpectrumSampling sampling = SpectrumSampling::bin_average) {
    emitter.validate();
    detail::require(omegas.size() >= 2, "emission_spectrum: need at least two grid points");
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        detail::require(std::isfinite(omegas[i]), "emission_spectrum: grid must be finite");
        if (i > 0) detail::require(omegas[i] > omegas[i - 1], "emission_spectrum: grid must be strictly ascending");
    }
    const double need = min_spectrum_halfspan(emitter);
    if (omegas.front() > -need || omegas.back() < need)
        throw InvalidArgument("emission_spectrum: grid too narrow; it must span at least +-" + std::to_string(need));

    SpectrumDecomposition out = decompose_spectrum(emitter);
    const double pop = out.population;
    const std::size_t n = omegas.size();
    SpectrumSamples& sm = out.sampled;
    sm.omegas.assign(omegas.begin(), omegas.end());
    sm.coherent.assign(n, 0.0);
    sm.incoherent.assign(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const double lo = i == 0 ? omegas[0] - 0.5 * (omegas[1] - omegas[0]) : 0.5 * (omegas[i - 1] + omegas[i]);
        const double hi = i + 1 == n ? omegas[n - 1] + 0.5 * (omegas[n - 1] - omegas[n - 2])
                                     : 0.5 * (omegas[i] + omegas[i + 1]);
        for (const auto& c : out.components) {
            if (c.kind == ComponentKind::coherent) {
                const double amp = c.residue.real();
                if (sampling == SpectrumSampling::bin_average || c.hwhm == 0.0)
                    sm.coherent[i] += detail::coherent_area(amp, c.hwhm, c.center, lo, hi) / (hi - lo);
                else
                    sm.coherent[i] += amp * c.hwhm / (std::numbers::pi * ((omegas[i] - c.center) * (omegas[i] - c.center) + c.hwhm * c.hwhm));
            } else if (sampling == SpectrumSampling::bin_average) {
                sm.incoherent[i] += detail::lineshape_area(c.residue * pop, c.hwhm, c.center, lo, hi) / (hi - lo);
            } else {
                sm.incoherent[i] += detail::lineshape_value(c.residue * pop, c.hwhm, c.center, omegas[i]);
            }
        }
    }
    sm.total.resize(n);
    for (std::size_t i = 0; i < n; ++i) sm.total[i] = sm.coherent[i] + sm.incoherent[i];
    return out;
}

/// Share of each component's area passed by a peak-normalized Lorentzian
/// filter of FWHM `filter_fwhm` centered at `filter_center`. Dispersive
/// parts of complex residues are included exactly.
inline double filtered_weight(const SpectralComponent& c, double filter_fwhm, double filter_center = 0.0) {
    detail::require(std::isfinite(filter_fwhm) && filter_fwhm > 0.0, "filtered_weight: filter width must be positive");
    if (c.kind == ComponentKind::coherent)
        return c.weight * lorentzian_transmission(2.0 * c.hwhm, filter_fwhm, c.center - filter_center);
    const double g = 0.5 * filter_fwhm;
    return (c.residue * g / cplx(c.hwhm + g, -(c.center - filter_center))).real();
}

/// Fraction of the filtered spectrum carried by each component kind.
inline std::map<ComponentKind, double> filtered_fractions(const EmitterParams& emitter, double filter_fwhm,
                                                          double filter_center = 0.0) {
    const SpectrumDecomposition d = decompose_spectrum(emitter);
    std::map<ComponentKind, double> out{{ComponentKind::coherent, 0.0},
                                        {ComponentKind::rayleigh, 0.0},
                                        {ComponentKind::mollow_red, 0.0},
                                        {ComponentKind::mollow_blue, 0.0}};
    double total = 0.0;
    for (const auto& c : d.components) {
        const double t = filtered_weight(c, filter_fwhm, filter_center);
        out[c.kind] += t;
        total += t;
    }
    if (!(total > 0.0)) throw NumericalError("filtered_fractions: nothing transmitted by the filter");
    for (auto& [k, v] : out) v /= total;
    return out;
}

} // namespace frf
