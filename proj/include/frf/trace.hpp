// trace.hpp: sampled g2(tau) trace with the parameters that produced it

#pragma once

#include <string>
#include <vector>

namespace frf {

struct TraceMetadata {
    double rabi = 0.0;
    double gamma = 1.0;
    double width = 0.0; // filter width; 0 for unfiltered traces
    double nu1 = 0.0;
    double nu2 = 0.0;
    double eta = 0.0;
    double beta = 0.0;       // background fraction of the detected signal
    double background = 0.0; // solved amplitude b
    bool irf_applied = false;
    double irf_fwhm = 0.0;
    std::vector<std::string> warnings;
};

/// g2 samples on an ascending tau grid (internal time units, 1/gamma).
struct CorrelationTrace {
    std::vector<double> taus;
    std::vector<double> values;
    TraceMetadata meta;
};

} // namespace frf
