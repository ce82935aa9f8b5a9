// Bogoliubov maps between canonical mode sets and the occupation numbers
// they imply for a vacuum input state.
//
// For a basis (w_l, g_l) the mode operators are
//   a_l = ( sqrt(m w_l) g_l.X + i g_l.P / sqrt(m w_l) ) / sqrt(2 hbar),
// collected as W = T u with u = (X, P).  A propagator S between two static
// stages then gives (b, b+) = T_out S T_in^{-1} (a, a+), whose blocks are the
// alpha and beta matrices:  b_k = sum_l alpha_kl a_l + beta_kl a_l+.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <vector>

#include "casimir/propagate.hpp"
#include "casimir/quadratic.hpp"

namespace casimir {

struct BogoliubovMap {
    ComplexMatrix alpha;
    ComplexMatrix beta;

    int size() const { return static_cast<int>(alpha.rows()); }

    // max-norm of alpha alpha+ - beta beta+ - I
    double identity_defect() const {
        const int n = size();
        return (alpha * alpha.adjoint() - beta * beta.adjoint() -
                ComplexMatrix::Identity(n, n))
            .cwiseAbs()
            .maxCoeff();
    }

    // max-norm of alpha beta^T - (alpha beta^T)^T
    double symmetry_defect() const {
        const ComplexMatrix ab = alpha * beta.transpose();
        return (ab - ab.transpose()).cwiseAbs().maxCoeff();
    }
};

namespace detail {

// T such that (a, a+) = T (X, P); its inverse in closed form.
inline void mode_transforms(const ModeBasis& basis, double mass, ComplexMatrix& T,
                            ComplexMatrix& T_inv) {
    const int n = basis.size();
    const std::complex<double> I(0.0, 1.0);
    Vector dp = (mass * basis.frequencies.array()).sqrt();  // sqrt(m w)
    Matrix Gt = basis.vectors.transpose();

    T.resize(2 * n, 2 * n);
    T_inv.resize(2 * n, 2 * n);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    T.topLeftCorner(n, n) = (dp.asDiagonal() * Gt).cast<std::complex<double>>() * inv_sqrt2;
    T.topRightCorner(n, n) =
        (dp.cwiseInverse().asDiagonal() * Gt).cast<std::complex<double>>() * (I * inv_sqrt2);
    T.bottomLeftCorner(n, n) = T.topLeftCorner(n, n);
    T.bottomRightCorner(n, n) = -T.topRightCorner(n, n);

    Matrix G = basis.vectors;
    T_inv.topLeftCorner(n, n) =
        (G * dp.cwiseInverse().asDiagonal()).cast<std::complex<double>>() * inv_sqrt2;
    T_inv.topRightCorner(n, n) = T_inv.topLeftCorner(n, n);
    T_inv.bottomLeftCorner(n, n) =
        (G * dp.asDiagonal()).cast<std::complex<double>>() * (-I * inv_sqrt2);
    T_inv.bottomRightCorner(n, n) = -T_inv.bottomLeftCorner(n, n);
}

}  // namespace detail

// Bogoliubov map induced by a symplectic propagator between two mode bases.
inline BogoliubovMap bogoliubov(const SymplecticPropagator& S, const ModeBasis& basis_in,
                                const ModeBasis& basis_out, double mass = 1.0,
                                double defect_tol = 1e-6) {
    const int n = S.n_modes();
    if (basis_in.size() != n || basis_out.size() != n)
        throw invalid_argument_error("bogoliubov: basis dimensions do not match propagator");
    const double defect = S.symplectic_defect();
    if (defect > defect_tol) {
        std::ostringstream os;
        os << "bogoliubov: propagator symplectic defect " << defect
           << " exceeds tolerance " << defect_tol << ", refusing to build map";
        throw numerical_error(os.str());
    }

    ComplexMatrix T_out, T_out_inv, T_in, T_in_inv;
    detail::mode_transforms(basis_out, mass, T_out, T_out_inv);
    detail::mode_transforms(basis_in, mass, T_in, T_in_inv);

    const ComplexMatrix C = T_out * S.matrix * T_in_inv;
    BogoliubovMap map;
    map.alpha = C.topLeftCorner(n, n);
    map.beta = C.topRightCorner(n, n);
    return map;
}

// Mean occupations <n_k> = sum_l |beta_kl|^2 for vacuum input.
inline Vector occupations(const BogoliubovMap& map) {
    return map.beta.cwiseAbs2().rowwise().sum();
}

struct TimeseriesOptions {
    StepControl step_control;
    // Fixed analysis basis; by default the instantaneous basis at the frozen
    // stiffness of each sample time is used.
    std::optional<ModeBasis> basis_out;
};

// <n_l(t)> at each sample time, with the drive frozen at the sample time
// (instantaneous canonical basis).  Input state is the vacuum of the t0 basis.
inline std::vector<std::pair<double, Vector>> occupation_timeseries(
    const QuadraticSystem& sys, const StageProtocol& protocol,
    const std::vector<double>& sample_times, const TimeseriesOptions& opts = {}) {
    for (double ts : sample_times)
        if (ts < protocol.t0)
            throw invalid_argument_error("occupation_timeseries: sample before t0");

    const ModeBasis basis_in = normal_modes(sys, protocol.t0);
    const auto props = propagate_through(sys, protocol.t0, sample_times, opts.step_control);

    std::vector<std::pair<double, Vector>> out;
    out.reserve(sample_times.size());
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        const double t = sample_times[i];
        const ModeBasis basis_t =
            opts.basis_out ? *opts.basis_out : normal_modes(sys, t);
        const BogoliubovMap map = bogoliubov(props[i], basis_in, basis_t, sys.mass);
        out.emplace_back(t, occupations(map));
    }
    return out;
}

}  // namespace casimir
