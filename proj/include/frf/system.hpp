// system.hpp: emitter and sensor Hilbert spaces, Hamiltonian and Liouvillian
//
// Composite ordering is emitter (x) sensor1 (x) sensor2. Each factor is a
// two-level system with basis {|g>, |e>} = {0, 1}, so the lowering
// operator is |g><e|. All energies are in units where the caller chooses
// (the library uses gamma = 1 internally; see units.hpp for lab units).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "frf/error.hpp"
#include "frf/qmath.hpp"

namespace frf {

struct EmitterParams {
    double gamma = 1.0;           // spontaneous emission rate
    double rabi = 0.0;            // Rabi frequency
    double detuning = 0.0;        // emitter minus laser frequency
    double laser_linewidth = 0.0; // FWHM; only enters the coherent spectral line

    void validate() const {
        detail::require(std::isfinite(gamma) && gamma > 0.0, "EmitterParams: gamma must be positive");
        detail::require(std::isfinite(rabi) && rabi >= 0.0, "EmitterParams: rabi must be non-negative");
        detail::require(std::isfinite(detuning), "EmitterParams: detuning must be finite");
        detail::require(std::isfinite(laser_linewidth) && laser_linewidth >= 0.0,
                        "EmitterParams: laser linewidth must be non-negative");
    }
};

struct SensorConfig {
    double nu = 0.0;         // sensor frequency relative to the laser
    double width = 1.0;      // filter width (sensor decay rate)
    double eta = 1e-3;       // emitter-sensor coupling
    double background = 0.0; // laser background amplitude b, drive strength b * eta
    bool couple_emitter = true; // false: sensor sees only the background drive

    void validate() const {
        detail::require(std::isfinite(nu), "SensorConfig: nu must be finite");
        detail::require(std::isfinite(width) && width > 0.0, "SensorConfig: width must be positive");
        detail::require(std::isfinite(eta) && eta > 0.0, "SensorConfig: eta must be positive");
        detail::require(std::isfinite(background) && background >= 0.0,
                        "SensorConfig: background must be non-negative");
    }
};

namespace ops {

inline Operator lowering() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return Operator(std::move(m));
}

inline Operator sigma_x() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return Operator(std::move(m));
}

inline Operator excited_projector() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(1, 1) = 1.0;
    return Operator(std::move(m));
}

/// Embed a single-site operator at `site` of an n-site chain of qubits.
inline Operator lift(const Operator& local, std::size_t site, std::size_t n_sites) {
    Operator out = site == 0 ? local : Operator::identity(2);
    for (std::size_t k = 1; k < n_sites; ++k) out = kron(out, k == site ? local : Operator::identity(2));
    return out;
}

} // namespace ops

/// Driven emitter plus up to two sensors, with the lifted operators cached.
class SystemModel {
public:
    explicit SystemModel(EmitterParams emitter, std::vector<SensorConfig> sensors = {})
        : emitter_(emitter), sensors_(std::move(sensors)) {
        emitter_.validate();
        detail::require(sensors_.size() <= 2, "SystemModel: at most two sensors are supported");
        for (const auto& s : sensors_) s.validate();

        const std::size_t sites = 1 + sensors_.size();
        sigma_ = ops::lift(ops::lowering(), 0, sites);
        for (std::size_t i = 0; i < sensors_.size(); ++i) {
            thetas_.push_back(ops::lift(ops::lowering(), i + 1, sites));
            numbers_.push_back(thetas_.back().adjoint() * thetas_.back());
        }
    }

    const EmitterParams& emitter() const { return emitter_; }
    const std::vector<SensorConfig>& sensors() const { return sensors_; }
    std::size_t sensor_count() const { return sensors_.size(); }
    Index dim() const { return Index{1} << (1 + sensors_.size()); }

    const Operator& sigma() const { return sigma_; }
    const Operator& theta(std::size_t i) const { return thetas_.at(i); }
    const Operator& number(std::size_t i) const { return numbers_.at(i); }

    /// Excitation number of `sensor` in composite basis state `state`.
    int sensor_excitation(Index state, std::size_t sensor) const {
        const auto shift = static_cast<int>(sensors_.size() - 1 - sensor);
        return static_cast<int>((state >> shift) & 1);
    }

private:
    EmitterParams emitter_;
    std::vector<SensorConfig> sensors_;
    Operator sigma_;
    std::vector<Operator> thetas_;
    std::vector<Operator> numbers_;
};

/// nu |e><e| + (Omega/2) sigma_x + sum_i [ nu_i n_i + eta_i (sigma theta_i^+ + h.c.)
///                                          + b_i eta_i (theta_i^+ + theta_i) ]
inline Operator build_hamiltonian(const SystemModel& model) {
    const auto& e = model.emitter();
    const Operator& s = model.sigma();
    const Operator sd = s.adjoint();
    CMatrix h = e.detuning * (sd * s).matrix() + 0.5 * e.rabi * (s + sd).matrix();
    for (std::size_t i = 0; i < model.sensor_count(); ++i) {
        const auto& cfg = model.sensors()[i];
        const Operator& th = model.theta(i);
        const Operator thd = th.adjoint();
        h += cfg.nu * model.number(i).matrix();
        if (cfg.couple_emitter) h += cfg.eta * (s * thd + sd * th).matrix();
        h += cfg.background * cfg.eta * (thd + th).matrix();
    }
    // Exact Hermitian symmetrization; every term above is Hermitian already.
    return Operator(0.5 * (h + h.adjoint()));
}

/// rate * (a rho a^+ - {a^+ a, rho} / 2)
inline Superoperator dissipator(const Operator& op, double rate) {
    detail::require(std::isfinite(rate) && rate > 0.0, "dissipator: rate must be positive");
    const Operator ad = op.adjoint();
    const Operator ada = ad * op;
    CMatrix m = sandwich(op, ad).matrix() - 0.5 * spre(ada).matrix() - 0.5 * spost(ada).matrix();
    return Superoperator(op.dim(), rate * m);
}

/// -i[H, rho]
inline Superoperator hamiltonian_generator(const Operator& h) {
    const cplx minus_i(0.0, -1.0);
    return Superoperator(h.dim(), minus_i * (spre(h).matrix() - spost(h).matrix()));
}

inline Superoperator build_liouvillian(const SystemModel& model) {
    Superoperator l = hamiltonian_generator(build_hamiltonian(model)) +
                      dissipator(model.sigma(), model.emitter().gamma);
    for (std::size_t i = 0; i < model.sensor_count(); ++i)
        l = l + dissipator(model.theta(i), model.sensors()[i].width);
    return l;
}

/// Rescaled frame for weakly coupled sensors.
///
/// Each sensor excitation carries a factor q_i = eta_i (1 + b_i) / width_i in
/// the physical density matrix; dividing it out (s = prod_i q_i^-n_i) keeps
/// every element of the rescaled steady state of order one, so linear solves
/// and eigendecompositions stay accurate at vanishing coupling. Sensors that
/// are not weakly excited (q_i >= 1) are left unscaled.
inline DiagonalFrame sensor_frame(const SystemModel& model) {
    if (model.sensor_count() == 0) return {};
    Eigen::VectorXd s(model.dim());
    for (Index k = 0; k < model.dim(); ++k) {
        double v = 1.0;
        for (std::size_t i = 0; i < model.sensor_count(); ++i) {
            const auto& cfg = model.sensors()[i];
            const double q = std::min(1.0, cfg.eta * (1.0 + cfg.background) / cfg.width);
            if (model.sensor_excitation(k, i) == 1) v /= q;
        }
        s(k) = v;
    }
    return DiagonalFrame(std::move(s));
}

/// Reduced density matrix of the emitter (traces out all sensors).
inline Operator emitter_reduced(const SystemModel& model, const Operator& rho) {
    const Index block = model.dim() / 2;
    CMatrix r = CMatrix::Zero(2, 2);
    for (Index a = 0; a < 2; ++a)
        for (Index b = 0; b < 2; ++b)
            for (Index k = 0; k < block; ++k) r(a, b) += rho(a * block + k, b * block + k);
    return Operator(std::move(r));
}

} // namespace frf
