// Filtered g2(0) across the lab filter presets, for a weak and a strong drive.

#include <algorithm>
#include <cstdio>

#include "frf/filtercorr.hpp"
#include "frf/instrument.hpp"
#include "frf/spectrum.hpp"
#include "frf/units.hpp"

int main() {
    const double gamma_ueV = 20.0;
    for (double rabi : {0.5, 2.0}) {
        frf::EmitterParams e;
        e.rabi = rabi;
        e.laser_linewidth = frf::units::from_ueV(0.01, gamma_ueV);
        std::printf("Rabi frequency %.2f gamma, coherent fraction %.3f\n", rabi, frf::coherent_fraction(e));
        std::printf("  %-36s %10s %10s %10s\n", "filter", "width/g", "g2(0)", "T_coh");
        for (const auto& p : frf::filter_presets) {
            const double w = frf::units::from_ueV(p.fwhm_ueV, gamma_ueV);
            const double g2 = frf::filtered_g2_zero(e, frf::FilterSpec{w}, 0.0);
            // Pad by displayed characters; the names contain UTF-8.
            const auto shown = std::count_if(p.name.begin(), p.name.end(), [](char c) { return (c & 0xC0) != 0x80; });
            std::printf("  %.*s%*s %10.4g %10.4f %10.4f\n", static_cast<int>(p.name.size()), p.name.data(),
                        static_cast<int>(36 - shown), "", w, g2, frf::lorentzian_transmission(e.laser_linewidth, w));
        }
    }
}
