// instrument.hpp: detector timing response, spectral instrument response
// and the catalogue of lab filters.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frf/error.hpp"
#include "frf/trace.hpp"

namespace frf {

/// Gaussian response, I(t) = (2/fwhm) sqrt(ln2/pi) exp(-4 ln2 (t/fwhm)^2).
struct GaussianIRF {
    double fwhm = 1.0;

    double sigma() const { return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

    double density(double t) const {
        const double ln2 = std::log(2.0);
        return 2.0 / fwhm * std::sqrt(ln2 / std::numbers::pi) * std::exp(-4.0 * ln2 * (t / fwhm) * (t / fwhm));
    }

    /// Discrete kernel on spacing h, truncated at +-5 sigma and renormalized
    /// so the weights sum to one. Element m is the zero offset.
    std::vector<double> kernel(double h) const {
        detail::require(fwhm > 0.0 && std::isfinite(fwhm), "GaussianIRF: fwhm must be positive");
        detail::require(h > 0.0, "GaussianIRF: spacing must be positive");
        const auto m = static_cast<std::size_t>(std::ceil(5.0 * sigma() / h));
        std::vector<double> k(2 * m + 1);
        double total = 0.0;
        for (std::size_t j = 0; j < k.size(); ++j) {
            const double t = (static_cast<double>(j) - static_cast<double>(m)) * h;
            k[j] = density(t);
            total += k[j];
        }
        for (double& v : k) v /= total;
        return k;
    }
};

namespace detail {

inline double uniform_spacing(std::span<const double> grid, const char* what) {
    require(grid.size() >= 2, std::string(what) + ": need at least two grid points");
    const double h = grid[1] - grid[0];
    require(h > 0.0, std::string(what) + ": grid must be ascending");
    for (std::size_t i = 1; i < grid.size(); ++i)
        require(std::abs((grid[i] - grid[i - 1]) - h) <= 1e-9 * h * static_cast<double>(grid.size()),
                std::string(what) + ": grid must be uniform");
    return h;
}

} // namespace detail

/// Convolve sampled values with the IRF kernel on spacing h. `extend`
/// supplies the sample at any integer index outside [0, n).
template <class Extend>
std::vector<double> convolve_samples(std::span<const double> values, double h, const GaussianIRF& irf,
                                     Extend&& extend) {
    const std::vector<double> k = irf.kernel(h);
    const auto m = static_cast<long>(k.size() / 2);
    const auto n = static_cast<long>(values.size());
    std::vector<double> out(values.size(), 0.0);
    for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long j = -m; j <= m; ++j) {
            const long src = i - j;
            const double f = (src >= 0 && src < n) ? values[static_cast<std::size_t>(src)] : extend(src);
            acc += k[static_cast<std::size_t>(j + m)] * f;
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

/// Convolve a g2 trace with the detector IRF.
///
/// The trace is mirrored to negative tau (g2 is even in the steady state)
/// and padded beyond its end with `asymptote`. The grid must start at zero,
/// be uniform, and resolve the kernel (spacing < fwhm / 8).
inline CorrelationTrace irf_convolve(const CorrelationTrace& trace, const GaussianIRF& irf, double asymptote = 1.0) {
    detail::require(trace.taus.size() == trace.values.size(), "irf_convolve: taus and values differ in length");
    const double h = detail::uniform_spacing(trace.taus, "irf_convolve");
    detail::require(std::abs(trace.taus.front()) <= 1e-12 * h, "irf_convolve: grid must start at tau = 0");
    if (!(h < irf.fwhm / 8.0))
        throw InvalidArgument("irf_convolve: grid too coarse for the IRF (spacing " + std::to_string(h) +
                              " must be below fwhm/8 = " + std::to_string(irf.fwhm / 8.0) + ")");
    const auto n = static_cast<long>(trace.values.size());
    const std::span<const double> vals(trace.values);
    auto extend = [&](long src) {
        const long mirrored = src < 0 ? -src : src;
        return mirrored < n ? vals[static_cast<std::size_t>(mirrored)] : asymptote;
    };
    CorrelationTrace out = trace;
    out.values = convolve_samples(vals, h, irf, extend);
    out.meta.irf_applied = true;
    out.meta.irf_fwhm = irf.fwhm;
    return out;
}

/// Gaussian smoothing of a spectrum sampled on a uniform grid of spacing h.
/// Values beyond the grid repeat the edge samples.
inline std::vector<double> spectral_irf_convolve(std::span<const double> values, double h, const GaussianIRF& irf) {
    detail::require(values.size() >= 2, "spectral_irf_convolve: need at least two samples");
    detail::require(h > 0.0, "spectral_irf_convolve: spacing must be positive");
    if (!(h < irf.fwhm / 8.0))
        throw InvalidArgument("spectral_irf_convolve: grid too coarse for the IRF (spacing " + std::to_string(h) +
                              " must be below fwhm/8 = " + std::to_string(irf.fwhm / 8.0) + ")");
    const double first = values.front();
    const double last = values.back();
    return convolve_samples(values, h, irf, [&](long src) { return src < 0 ? first : last; });
}

/// Fabry-Perot style filter bandwidth from free spectral range and finesse.
inline double etalon_bandwidth(double fsr, double finesse) {
    detail::require(fsr > 0.0 && finesse > 0.0, "etalon_bandwidth: inputs must be positive");
    return fsr / finesse;
}

enum class FilterShape { lorentzian };

struct FilterPreset {
    std::string_view name;
    std::string_view alias;
    double fwhm_ueV;
    FilterShape shape = FilterShape::lorentzian;
};

/// The filters used in the measurements, bandwidths in ueV.
inline constexpr std::array<FilterPreset, 6> filter_presets{{
    {"Free-space Fabry-P\xC3\xA9rot", "free-space-fp", 0.25},
    {"Etalon - 1.6mm fused silica", "etalon", 5.8},
    {"Fibre Fabry-P\xC3\xA9rot", "fibre-fp", 17.0},
    {"1200 l mm^-1 grating spectrometer", "spectrometer", 97.0},
    {"4f tunable filter (narrow)", "4f-narrow", 454.0},
    {"4f tunable filter (broad)", "4f-broad", 3050.0},
}};

namespace detail {

inline std::string fold(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    // Accept a plain "e" for the accented one in Perot.
    for (std::size_t p = out.find("\xC3\xA9"); p != std::string::npos; p = out.find("\xC3\xA9")) out.replace(p, 2, "e");
    return out;
}

} // namespace detail

/// Case-insensitive lookup by full name or short alias.
inline const FilterPreset& find_preset(std::string_view name) {
    const std::string key = detail::fold(name);
    for (const auto& p : filter_presets)
        if (detail::fold(p.name) == key || detail::fold(p.alias) == key) return p;
    std::string known;
    for (const auto& p : filter_presets) known += "\n  " + std::string(p.name) + " (" + std::string(p.alias) + ")";
    throw InvalidArgument("unknown filter preset '" + std::string(name) + "'; known presets:" + known);
}

} // namespace frf
