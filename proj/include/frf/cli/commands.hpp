// commands.hpp: the computations behind each subcommand of `frf`.
//
// Each command turns a resolved RunConfig into a ResultTable. Internal
// units are gamma = 1; lab units are attached on output.

#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <vector>

#include "frf/cli/config.hpp"
#include "frf/cli/output.hpp"
#include "frf/cli/pool.hpp"
#include "frf/filtercorr.hpp"
#include "frf/instrument.hpp"
#include "frf/spectrum.hpp"
#include "frf/units.hpp"

namespace frf::cli {

inline EmitterParams emitter_of(const RunConfig& c) {
    EmitterParams e;
    e.gamma = 1.0;
    e.rabi = c.rabi_over_gamma;
    e.detuning = c.detuning_over_gamma;
    e.laser_linewidth = c.laser_linewidth_over_gamma();
    return e;
}

inline FilterSpec filter_of(const RunConfig& c) { return FilterSpec{c.filter_width(), c.center_over_gamma, {}}; }

inline G2Options g2_options_of(const RunConfig& c) {
    G2Options o;
    o.eta = c.eta;
    return o;
}

inline double default_tau_max(const RunConfig& c) { return std::max(20.0, 20.0 / c.filter_width()); }

inline double default_omega_max(const RunConfig& c) {
    return 2.0 * c.rabi_over_gamma + 10.0 + std::abs(c.detuning_over_gamma);
}

inline std::vector<double> default_sweep_values(const std::string& command, SweepAxis axis) {
    auto logspace = [](double a, double b, std::size_t n) {
        std::vector<double> v(n);
        for (std::size_t k = 0; k < n; ++k) v[k] = a * std::pow(b / a, static_cast<double>(k) / static_cast<double>(n - 1));
        v.back() = b;
        return v;
    };
    auto linspace = [](double a, double b, std::size_t n) {
        std::vector<double> v(n);
        for (std::size_t k = 0; k < n; ++k) v[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
        v.back() = b;
        return v;
    };
    if (command == "transmission") return logspace(1e-5, 1e3, 81);
    if (axis == SweepAxis::rabi) return linspace(0.2, 6.0, 30);
    return logspace(0.01, 150.0, 30);
}

namespace detail {

inline void common_notes(ResultTable& t, const RunConfig& c) {
    t.notes.emplace_back("gamma", format_number(c.gamma_ueV) + " ueV (1/gamma = " +
                                      format_number(units::to_ps(1.0, c.gamma_ueV)) + " ps)");
    if (!c.preset.empty())
        t.notes.emplace_back("filter", c.preset + ", FWHM " + format_number(find_preset(c.preset).fwhm_ueV) + " ueV");
}

inline std::string error_status(const std::exception& ex) { return std::string("error: ") + ex.what(); }

/// IRF-convolved trace on `taus` (uniform from 0). When the grid is too
/// coarse for the kernel it is refined by an integer factor and subsampled.
inline std::vector<double> irf_trace(const EmitterParams& e, const FilterSpec& f, double beta,
                                     const std::vector<double>& taus, const GaussianIRF& irf, const G2Options& o) {
    const double h = taus[1] - taus[0];
    const auto r = static_cast<std::size_t>(std::max(1.0, std::ceil(h / (irf.fwhm / 10.0))));
    const std::vector<double> fine = r == 1 ? taus : uniform_grid(0.0, taus.back(), (taus.size() - 1) * r + 1);
    const CorrelationTrace conv = irf_convolve(filtered_g2(e, f, beta, fine, o), irf);
    std::vector<double> out(taus.size());
    for (std::size_t k = 0; k < taus.size(); ++k) out[k] = conv.values[k * r];
    return out;
}

} // namespace detail

inline ResultTable run_g2_trace(const RunConfig& c) {
    const EmitterParams e = emitter_of(c);
    const FilterSpec f = filter_of(c);
    const G2Options o = g2_options_of(c);
    const double tau_max = c.tau_max.value_or(default_tau_max(c));
    const std::vector<double> taus = uniform_grid(0.0, tau_max, c.n_tau);
    const bool band = c.beta_hi > 0.0;
    const GaussianIRF irf{c.irf_fwhm_over_gamma()};

    ResultTable t;
    t.command = "g2-trace";
    t.columns = {{"tau_ps", "ps"}, {"tau", "1/gamma"}, {"g2", "dimensionless"}};
    std::vector<std::vector<double>> cols;
    const CorrelationTrace ideal = filtered_g2(e, f, 0.0, taus, o);
    cols.push_back(ideal.values);
    t.notes.emplace_back("eta", format_number(ideal.meta.eta) + " gamma");
    for (const auto& w : ideal.meta.warnings) t.notes.emplace_back("warning", w);
    if (c.irf_enabled) {
        t.columns.push_back({"g2_irf", "dimensionless"});
        cols.push_back(detail::irf_trace(e, f, 0.0, taus, irf, o));
    }
    if (band) {
        t.columns.push_back({"g2_lo", "dimensionless"});
        t.columns.push_back({"g2_hi", "dimensionless"});
        const CorrelationTrace lo = filtered_g2(e, f, c.beta_lo, taus, o);
        const CorrelationTrace hi = filtered_g2(e, f, c.beta_hi, taus, o);
        cols.push_back(lo.values);
        cols.push_back(hi.values);
        t.notes.emplace_back("background_b", "lo " + format_number(lo.meta.background) + ", hi " +
                                                 format_number(hi.meta.background));
        if (c.irf_enabled) {
            t.columns.push_back({"g2_irf_lo", "dimensionless"});
            t.columns.push_back({"g2_irf_hi", "dimensionless"});
            cols.push_back(detail::irf_trace(e, f, c.beta_lo, taus, irf, o));
            cols.push_back(detail::irf_trace(e, f, c.beta_hi, taus, irf, o));
        }
    }
    for (std::size_t k = 0; k < taus.size(); ++k) {
        std::vector<double> row{units::to_ps(taus[k], c.gamma_ueV), taus[k]};
        for (const auto& col : cols) row.push_back(col[k]);
        t.rows.push_back(std::move(row));
    }
    detail::common_notes(t, c);
    t.config = config_items(c, c.values, tau_max, c.omega_max);
    return t;
}

inline ResultTable run_g2_sweep(const RunConfig& c, unsigned workers) {
    SweepSpec spec;
    spec.emitter = emitter_of(c);
    spec.filter = filter_of(c);
    spec.axis = c.axis == SweepAxis::rabi ? frf::SweepAxis::rabi : frf::SweepAxis::filter_width;
    spec.beta_lo = c.beta_lo;
    spec.beta_hi = c.beta_hi;
    if (c.irf_enabled) spec.irf = GaussianIRF{c.irf_fwhm_over_gamma()};
    spec.options = g2_options_of(c);
    const std::vector<double> values = c.values.empty() ? default_sweep_values("g2-sweep", c.axis) : c.values;

    struct Point {
        SweepRow row;
        std::string status;
    };
    const auto results = parallel_map<Point>(
        values.size(),
        [&](std::size_t i) {
            try {
                return Point{sweep_point(spec, values[i]), "ok"};
            } catch (const std::exception& ex) {
                return Point{SweepRow{values[i]}, detail::error_status(ex)};
            }
        },
        workers);

    ResultTable t;
    t.command = "g2-sweep";
    const bool width_axis = c.axis == SweepAxis::filter_width;
    t.columns = {{width_axis ? "width" : "rabi", "gamma"},
                 {width_axis ? "width_ueV" : "rabi_ueV", "ueV"},
                 {"g2_ideal", "dimensionless"},
                 {"g2_lo", "dimensionless"},
                 {"g2_hi", "dimensionless"}};
    if (c.irf_enabled)
        for (const char* n : {"g2_irf_ideal", "g2_irf_lo", "g2_irf_hi"}) t.columns.push_back({n, "dimensionless"});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& p : results) {
        const bool ok = p.status == "ok";
        std::vector<double> row{p.row.x, units::to_ueV(p.row.x, c.gamma_ueV), ok ? p.row.g2_ideal : nan,
                                ok ? p.row.g2_lo : nan, ok ? p.row.g2_hi : nan};
        if (c.irf_enabled)
            for (const auto& v : {p.row.irf_ideal, p.row.irf_lo, p.row.irf_hi}) row.push_back(ok ? v.value_or(nan) : nan);
        t.rows.push_back(std::move(row));
        t.status.push_back(p.status);
    }
    t.notes.emplace_back("quantity", "g2(0); ideal = no background, lo/hi = background fractions beta_lo/beta_hi");
    detail::common_notes(t, c);
    t.config = config_items(c, values, c.tau_max, c.omega_max);
    return t;
}

inline ResultTable run_spectrum(const RunConfig& c) {
    const EmitterParams e = emitter_of(c);
    const double w = c.omega_max.value_or(default_omega_max(c));
    const std::vector<double> omegas = uniform_grid(-w, w, c.n_omega);
    const SpectrumDecomposition d = emission_spectrum(e, omegas);
    const double pop = d.population;

    std::vector<double> smoothed;
    if (c.spectral_irf_ueV > 0.0)
        smoothed = spectral_irf_convolve(d.sampled.total, omegas[1] - omegas[0],
                                         GaussianIRF{units::from_ueV(c.spectral_irf_ueV, c.gamma_ueV)});

    ResultTable t;
    t.command = "spectrum";
    t.columns = {{"omega_ueV", "ueV"},
                 {"omega", "gamma"},
                 {"S_total", "1/gamma, unit area"},
                 {"S_coherent", "1/gamma, unit area"},
                 {"S_incoherent", "1/gamma, unit area"}};
    if (!smoothed.empty()) t.columns.push_back({"S_total_irf", "1/gamma, unit area"});
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        std::vector<double> row{units::to_ueV(omegas[k], c.gamma_ueV), omegas[k], d.sampled.total[k] / pop,
                                d.sampled.coherent[k] / pop, d.sampled.incoherent[k] / pop};
        if (!smoothed.empty()) row.push_back(smoothed[k] / pop);
        t.rows.push_back(std::move(row));
    }
    SideTable comps;
    comps.name = "components";
    comps.columns = {{"kind", "-"},         {"center", "gamma"},       {"center_ueV", "ueV"},
                     {"hwhm", "gamma"},     {"hwhm_ueV", "ueV"},       {"weight", "dimensionless"},
                     {"residue_re", "dimensionless"}, {"residue_im", "dimensionless"}};
    for (const auto& s : d.components)
        comps.rows.push_back({std::string(to_string(s.kind)), format_number(s.center),
                              format_number(units::to_ueV(s.center, c.gamma_ueV)), format_number(s.hwhm),
                              format_number(units::to_ueV(s.hwhm, c.gamma_ueV)), format_number(s.weight),
                              format_number(s.residue.real()), format_number(s.residue.imag())});
    t.side = std::move(comps);
    t.notes.emplace_back("sampling", "cell averages of S over each grid cell");
    t.notes.emplace_back("coherent_fraction", format_number(d.weight(ComponentKind::coherent)));
    detail::common_notes(t, c);
    t.config = config_items(c, c.values, c.tau_max, w);
    return t;
}

inline ResultTable run_transmission(const RunConfig& c) {
    if (c.axis != SweepAxis::filter_width)
        throw ConfigError("transmission: sweep.axis must be filter-width (transmission is a function of the filter width)");
    const EmitterParams e = emitter_of(c);
    const std::vector<double> values = c.values.empty() ? default_sweep_values("transmission", c.axis) : c.values;
    std::optional<SpectrumDecomposition> d;
    if (e.rabi > 0.0) d = decompose_spectrum(e);

    ResultTable t;
    t.command = "transmission";
    t.columns = {{"width", "gamma"},
                 {"width_ueV", "ueV"},
                 {"T_coherent", "dimensionless"},
                 {"T_incoherent", "dimensionless"},
                 {"T_incoherent_spectrum", "dimensionless"}};
    for (double g : values) {
        double full = std::numeric_limits<double>::quiet_NaN();
        if (d) {
            double passed = 0.0;
            double total = 0.0;
            for (const auto& s : d->components) {
                if (s.kind == ComponentKind::coherent) continue;
                passed += filtered_weight(s, g, c.center_over_gamma);
                total += s.weight;
            }
            full = passed / total;
        }
        t.rows.push_back({g, units::to_ueV(g, c.gamma_ueV),
                          lorentzian_transmission(e.laser_linewidth, g, c.center_over_gamma),
                          lorentzian_transmission(1.0, g, c.center_over_gamma), full});
    }
    t.notes.emplace_back("T_coherent", "laser-linewidth Lorentzian through the filter");
    t.notes.emplace_back("T_incoherent", "Lorentzian of FWHM gamma through the filter");
    t.notes.emplace_back("T_incoherent_spectrum", "full incoherent spectrum at the configured Rabi frequency");
    detail::common_notes(t, c);
    t.config = config_items(c, values, c.tau_max, c.omega_max);
    return t;
}

inline ResultTable run_fractions(const RunConfig& c, unsigned workers) {
    const std::vector<double> values = c.values.empty() ? default_sweep_values("fractions", c.axis) : c.values;
    const EmitterParams base = emitter_of(c);
    const double width = c.filter_width();
    const ComponentKind kinds[] = {ComponentKind::coherent, ComponentKind::rayleigh, ComponentKind::mollow_red,
                                   ComponentKind::mollow_blue};
    struct Point {
        std::vector<double> fractions;
        std::string status;
    };
    const auto results = parallel_map<Point>(
        values.size(),
        [&](std::size_t i) {
            try {
                EmitterParams e = base;
                double g = width;
                if (c.axis == SweepAxis::rabi)
                    e.rabi = values[i];
                else
                    g = values[i];
                const auto f = filtered_fractions(e, g, c.center_over_gamma);
                Point p{{}, "ok"};
                for (auto k : kinds) p.fractions.push_back(f.at(k));
                return p;
            } catch (const std::exception& ex) {
                return Point{std::vector<double>(4, std::numeric_limits<double>::quiet_NaN()), detail::error_status(ex)};
            }
        },
        workers);

    ResultTable t;
    t.command = "fractions";
    const bool width_axis = c.axis == SweepAxis::filter_width;
    t.columns = {{width_axis ? "width" : "rabi", "gamma"}, {width_axis ? "width_ueV" : "rabi_ueV", "ueV"}};
    for (auto k : kinds) t.columns.push_back({std::string(to_string(k)), "dimensionless"});
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::vector<double> row{values[i], units::to_ueV(values[i], c.gamma_ueV)};
        row.insert(row.end(), results[i].fractions.begin(), results[i].fractions.end());
        t.rows.push_back(std::move(row));
        t.status.push_back(results[i].status);
    }
    t.notes.emplace_back("quantity", "fraction of the filtered spectrum from each component");
    detail::common_notes(t, c);
    t.config = config_items(c, values, c.tau_max, c.omega_max);
    return t;
}

} // namespace frf::cli
