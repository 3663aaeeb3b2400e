// qmath.hpp: dense complex linear algebra: operators, superoperators,
// propagators and steady-state null-space solves.
//
// Vectorization is column stacking throughout, so that the map
// rho -> A rho B is represented by kron(B^T, A) acting on vec(rho).
// Eigen stores matrices column-major, which makes vec/unvec a reshape.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "frf/error.hpp"

namespace frf {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Square complex matrix on a Hilbert space of dimension dim().
class Operator {
public:
    Operator() : m_(CMatrix::Zero(1, 1)) {}

    explicit Operator(CMatrix m) : m_(std::move(m)) {
        detail::require(m_.rows() >= 1 && m_.rows() == m_.cols(), "Operator: matrix must be square and non-empty");
        detail::require(m_.allFinite(), "Operator: entries must be finite");
    }

    static Operator identity(Index dim) { return Operator(CMatrix::Identity(dim, dim)); }
    static Operator zero(Index dim) { return Operator(CMatrix::Zero(dim, dim)); }

    Index dim() const { return m_.rows(); }
    const CMatrix& matrix() const { return m_; }
    cplx operator()(Index i, Index j) const { return m_(i, j); }

    Operator adjoint() const { return Operator(m_.adjoint()); }
    cplx trace() const { return m_.trace(); }

    bool is_hermitian(double tol) const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol; }

    friend Operator operator*(const Operator& a, const Operator& b) { return Operator(a.m_ * b.m_); }
    friend Operator operator+(const Operator& a, const Operator& b) { return Operator(a.m_ + b.m_); }
    friend Operator operator-(const Operator& a, const Operator& b) { return Operator(a.m_ - b.m_); }
    friend Operator operator*(cplx s, const Operator& a) { return Operator(s * a.m_); }
    friend Operator operator*(double s, const Operator& a) { return Operator(s * a.m_); }

private:
    CMatrix m_;
};

/// Linear map on vectorized d x d operators, stored as a d^2 x d^2 matrix.
class Superoperator {
public:
    Superoperator() : d_(1), m_(CMatrix::Zero(1, 1)) {}

    Superoperator(Index hilbert_dim, CMatrix m) : d_(hilbert_dim), m_(std::move(m)) {
        detail::require(d_ >= 1, "Superoperator: Hilbert dimension must be positive");
        detail::require(m_.rows() == d_ * d_ && m_.cols() == d_ * d_,
                        "Superoperator: matrix must be d^2 x d^2");
        detail::require(m_.allFinite(), "Superoperator: entries must be finite");
    }

    static Superoperator zero(Index hilbert_dim) {
        return Superoperator(hilbert_dim, CMatrix::Zero(hilbert_dim * hilbert_dim, hilbert_dim * hilbert_dim));
    }

    Index hilbert_dim() const { return d_; }
    Index size() const { return d_ * d_; }
    const CMatrix& matrix() const { return m_; }

    CVector apply(const CVector& v) const { return m_ * v; }

    /// Operator 1-norm (max absolute column sum).
    double norm() const { return m_.cwiseAbs().colwise().sum().maxCoeff(); }

    friend Superoperator operator+(const Superoperator& a, const Superoperator& b) {
        detail::require(a.d_ == b.d_, "Superoperator: dimension mismatch");
        return Superoperator(a.d_, a.m_ + b.m_);
    }
    friend Superoperator operator*(cplx s, const Superoperator& a) { return Superoperator(a.d_, s * a.m_); }
    friend Superoperator operator*(double s, const Superoperator& a) { return Superoperator(a.d_, s * a.m_); }

private:
    Index d_;
    CMatrix m_;
};

/// Kronecker product: result[(i,k),(j,l)] = a[i,j] * b[k,l].
inline Operator kron(const Operator& a, const Operator& b) {
    const Index na = a.dim();
    const Index nb = b.dim();
    CMatrix out(na * nb, na * nb);
    for (Index i = 0; i < na; ++i)
        for (Index j = 0; j < na; ++j)
            out.block(i * nb, j * nb, nb, nb) = a(i, j) * b.matrix();
    return Operator(std::move(out));
}

inline CVector vec(const Operator& op) {
    const CMatrix& m = op.matrix();
    return Eigen::Map<const CVector>(m.data(), m.size());
}

inline Operator unvec(const CVector& v) {
    const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    detail::require(d * d == v.size() && d >= 1, "unvec: vector length must be a perfect square");
    return Operator(Eigen::Map<const CMatrix>(v.data(), d, d));
}

/// rho -> A rho
inline Superoperator spre(const Operator& a) {
    const Index d = a.dim();
    return Superoperator(d, kron(Operator::identity(d), a).matrix());
}

/// rho -> rho B
inline Superoperator spost(const Operator& b) {
    const Index d = b.dim();
    return Superoperator(d, kron(Operator(b.matrix().transpose()), Operator::identity(d)).matrix());
}

/// rho -> A rho B
inline Superoperator sandwich(const Operator& a, const Operator& b) {
    detail::require(a.dim() == b.dim(), "sandwich: dimension mismatch");
    return Superoperator(a.dim(), kron(Operator(b.matrix().transpose()), a).matrix());
}

/// Row functional f with f . vec(X) = tr[P X] (no conjugation).
inline CVector trace_functional(const Operator& probe) {
    return vec(Operator(probe.matrix().transpose()));
}

/// Weighted trace sum_i w_i X_ii of a vectorized operator; empty weights mean
/// the ordinary trace.
inline cplx weighted_trace(const CVector& v, std::span<const double> weights) {
    const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    cplx tr = 0.0;
    for (Index i = 0; i < d; ++i)
        tr += (weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)]) * v(i * d + i);
    return tr;
}

/// Diagonal similarity rho~ = S rho S with S = diag(s).
///
/// Used to rescale basis states whose populations are many orders of
/// magnitude apart before solving or diagonalizing. Entries of a
/// generator transform as L~[a,b] = L[a,b] T_a / T_b with T_(i,j) = s_i s_j,
/// which is exact up to rounding of each entry. An empty frame is the
/// identity.
class DiagonalFrame {
public:
    DiagonalFrame() = default;

    explicit DiagonalFrame(Eigen::VectorXd scales) : s_(std::move(scales)) {
        detail::require((s_.array() > 0.0).all() && s_.allFinite(), "DiagonalFrame: scales must be positive");
    }

    bool is_identity() const { return s_.size() == 0; }
    const Eigen::VectorXd& scales() const { return s_; }

    Superoperator transform(const Superoperator& generator) const {
        if (is_identity()) return generator;
        check_dim(generator.hilbert_dim());
        const Eigen::VectorXd t = vec_scales();
        CMatrix m = generator.matrix();
        for (Index b = 0; b < m.cols(); ++b)
            for (Index a = 0; a < m.rows(); ++a)
                if (m(a, b) != cplx(0.0)) m(a, b) *= t(a) / t(b);
        return Superoperator(generator.hilbert_dim(), std::move(m));
    }

    CVector to_frame(const CVector& v) const {
        if (is_identity()) return v;
        return v.cwiseProduct(vec_scales().cast<cplx>());
    }

    CVector from_frame(const CVector& v) const {
        if (is_identity()) return v;
        return v.cwiseQuotient(vec_scales().cast<cplx>());
    }

    /// Row functional w~ with w~ . to_frame(v) = w . v.
    CVector functional_to_frame(const CVector& w) const {
        if (is_identity()) return w;
        return w.cwiseQuotient(vec_scales().cast<cplx>());
    }

    /// Weights w_i = 1/s_i^2 so that tr(rho) = sum_i w_i rho~_ii.
    std::vector<double> trace_weights() const {
        std::vector<double> w(static_cast<std::size_t>(s_.size()));
        for (Index i = 0; i < s_.size(); ++i) w[static_cast<std::size_t>(i)] = 1.0 / (s_(i) * s_(i));
        return w;
    }

private:
    void check_dim(Index d) const {
        detail::require(s_.size() == d, "DiagonalFrame: dimension mismatch");
    }

    Eigen::VectorXd vec_scales() const {
        const Index d = s_.size();
        Eigen::VectorXd t(d * d);
        for (Index j = 0; j < d; ++j)
            for (Index i = 0; i < d; ++i) t(j * d + i) = s_(i) * s_(j);
        return t;
    }

    Eigen::VectorXd s_;
};

enum class PropagatorMethod { eigendecomposition, pade };

struct PropagatorOptions {
    /// Eigenvector-matrix condition number above which the Pade
    /// scaling-and-squaring route is used instead.
    double max_condition = 1e12;
};

/// exp(L t) for a fixed generator, reused across many times.
///
/// The primary route diagonalizes L once (L = V diag(lambda) V^-1), after
/// which every time point costs one diagonal scaling. Near-defective
/// generators, where V is badly conditioned, fall back to Pade
/// scaling-and-squaring; on ascending uniform grids that route steps with
/// a single cached exp(L dt).
class Propagator {
public:
    explicit Propagator(const Superoperator& generator, PropagatorOptions opts = {}, DiagonalFrame frame = {})
        : generator_(frame.transform(generator).matrix()), frame_(std::move(frame)) {
        Eigen::ComplexEigenSolver<CMatrix> solver(generator_, true);
        if (solver.info() == Eigen::Success) {
            eigenvectors_ = solver.eigenvectors();
            eigenvalues_ = solver.eigenvalues();
            Eigen::PartialPivLU<CMatrix> lu(eigenvectors_);
            inverse_ = lu.inverse();
            const double nv = eigenvectors_.cwiseAbs().colwise().sum().maxCoeff();
            const double ni = inverse_.cwiseAbs().colwise().sum().maxCoeff();
            condition_ = nv * ni;
            if (!std::isfinite(condition_)) condition_ = std::numeric_limits<double>::infinity();
        } else {
            condition_ = std::numeric_limits<double>::infinity();
        }
        method_ = condition_ <= opts.max_condition ? PropagatorMethod::eigendecomposition : PropagatorMethod::pade;
    }

    PropagatorMethod method() const { return method_; }
    double condition() const { return condition_; }
    Index size() const { return generator_.rows(); }

    /// Eigenvalues of the generator (empty if the eigensolver failed).
    const CVector& eigenvalues() const { return eigenvalues_; }

    CVector apply(const CVector& v, double t) const {
        check_input(v, t);
        return frame_.from_frame(apply_in_frame(frame_.to_frame(v), t));
    }

    /// w . exp(L t) v for every t in ts.
    std::vector<cplx> functional(const CVector& w, const CVector& v, std::span<const double> ts) const {
        detail::require(w.size() == v.size() && v.size() == generator_.rows(), "Propagator: size mismatch");
        std::vector<cplx> out;
        out.reserve(ts.size());
        if (method_ == PropagatorMethod::eigendecomposition) {
            for (double t : ts) check_input(v, t);
            const CVector right = inverse_ * frame_.to_frame(v);
            const CVector left = (frame_.functional_to_frame(w).transpose() * eigenvectors_).transpose();
            const CVector amp = left.cwiseProduct(right);
            for (double t : ts) out.push_back((amp.array() * (eigenvalues_.array() * t).exp()).sum());
            return out;
        }
        for (const CVector& x : evolve(v, ts)) out.push_back(w.transpose() * x);
        return out;
    }

    std::vector<CVector> evolve(const CVector& v, std::span<const double> ts) const {
        std::vector<CVector> out;
        out.reserve(ts.size());
        if (method_ == PropagatorMethod::eigendecomposition) {
            for (double t : ts) out.push_back(apply(v, t));
            return out;
        }
        // Pade route: step through ascending grids, caching exp(L dt).
        CVector state = frame_.to_frame(v);
        double t_prev = 0.0;
        double dt_cached = -1.0;
        CMatrix step;
        for (double t : ts) {
            check_input(v, t);
            const double dt = t - t_prev;
            if (dt < 0.0) {
                out.push_back(apply(v, t));
                continue;
            }
            if (dt > 0.0) {
                if (std::abs(dt - dt_cached) > 1e-13 * std::max(dt, dt_cached)) {
                    step = (generator_ * dt).exp();
                    dt_cached = dt;
                }
                state = step * state;
            }
            t_prev = t;
            out.push_back(frame_.from_frame(state));
        }
        return out;
    }

private:
    CVector apply_in_frame(const CVector& v, double t) const {
        if (method_ == PropagatorMethod::eigendecomposition) {
            const CVector coeff = inverse_ * v;
            return eigenvectors_ * (coeff.array() * (eigenvalues_.array() * t).exp()).matrix();
        }
        const CMatrix step = (generator_ * t).exp();
        return step * v;
    }

    void check_input(const CVector& v, double t) const {
        detail::require(std::isfinite(t), "Propagator: time must be finite");
        detail::require(v.size() == generator_.rows(), "Propagator: vector length must equal d^2");
        detail::require(v.allFinite(), "Propagator: vector entries must be finite");
    }

    CMatrix generator_;
    DiagonalFrame frame_;
    CMatrix eigenvectors_;
    CMatrix inverse_;
    CVector eigenvalues_;
    double condition_ = 0.0;
    PropagatorMethod method_ = PropagatorMethod::pade;
};

/// exp(L t) v.
inline CVector expm_apply(const Superoperator& generator, const CVector& v, double t, PropagatorOptions opts = {}) {
    detail::require(v.allFinite() && std::isfinite(t), "expm_apply: inputs must be finite");
    return Propagator(generator, opts).apply(v, t);
}

struct SteadyVectorOptions {
    /// Relative pivot threshold used to count the null-space dimension.
    double rank_threshold = 1e-11;
    /// Accept when ||L v|| <= residual_tol * ||L|| * ||v||.
    double residual_tol = 1e-10;
};

/// Null vector of L normalized to unit (weighted) trace.
///
/// One diagonal row of L is replaced by the trace functional and the
/// resulting nonsingular system is solved. `trace_weights` (length d)
/// generalizes the trace to sum_i w_i X_ii, used when L has been brought
/// into a diagonally rescaled frame; empty means the ordinary trace.
inline CVector steady_vector(const Superoperator& generator, std::span<const double> trace_weights = {},
                             SteadyVectorOptions opts = {}) {
    const Index d = generator.hilbert_dim();
    const Index n = generator.size();
    detail::require(trace_weights.empty() || static_cast<Index>(trace_weights.size()) == d,
                    "steady_vector: trace weights must have length d");

    Eigen::FullPivLU<CMatrix> rank_lu(generator.matrix());
    rank_lu.setThreshold(opts.rank_threshold);
    const Index nullity = rank_lu.dimensionOfKernel();
    if (nullity == 0) throw NumericalError("steady_vector: generator has no null vector");
    if (nullity > 1)
        throw NumericalError("steady_vector: degenerate null space of dimension " + std::to_string(nullity));

    Index pivot_state = 0;
    if (!trace_weights.empty()) {
        for (Index i = 1; i < d; ++i)
            if (std::abs(trace_weights[static_cast<std::size_t>(i)]) >
                std::abs(trace_weights[static_cast<std::size_t>(pivot_state)]))
                pivot_state = i;
    }
    const Index row = pivot_state * d + pivot_state;

    CMatrix system = generator.matrix();
    system.row(row).setZero();
    for (Index i = 0; i < d; ++i)
        system(row, i * d + i) = trace_weights.empty() ? 1.0 : trace_weights[static_cast<std::size_t>(i)];
    CVector rhs = CVector::Zero(n);
    rhs(row) = 1.0;

    CVector v = system.partialPivLu().solve(rhs);
    if (!v.allFinite()) throw NumericalError("steady_vector: linear solve produced non-finite values");
    v /= weighted_trace(v, trace_weights);

    const double residual = (generator.matrix() * v).cwiseAbs().maxCoeff();
    const double scale = generator.norm() * std::max(1.0, v.cwiseAbs().maxCoeff());
    if (residual > opts.residual_tol * scale)
        throw NumericalError("steady_vector: residual " + std::to_string(residual) + " exceeds tolerance");
    return v;
}

/// Steady state of L computed in a rescaled frame and returned in the
/// physical basis with ordinary unit trace.
inline CVector steady_vector(const Superoperator& generator, const DiagonalFrame& frame,
                             SteadyVectorOptions opts = {}) {
    if (frame.is_identity()) return steady_vector(generator, std::span<const double>{}, opts);
    const std::vector<double> weights = frame.trace_weights();
    return frame.from_frame(steady_vector(frame.transform(generator), weights, opts));
}

} // namespace frf
