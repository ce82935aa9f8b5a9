// Symplectic propagation of time-dependent quadratic Hamiltonians.
//
// Integrates dS/dt = A(t) S with A(t) = [[0, I/m], [-K(t), 0]] acting on
// phase-space columns (X, P).  The default integrator is an adaptive
// fourth-order Magnus scheme on two Gauss nodes; every step is a true matrix
// exponential of an element of sp(2N), so S stays symplectic to roundoff at
// any step size and the step control only tunes accuracy.  A fixed-step
// Magnus and a Strang-split leapfrog are available as fallbacks.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "casimir/quadratic.hpp"

namespace casimir {

struct StepControl {
    enum class Method { adaptive_magnus, fixed_magnus, fixed_leapfrog };

    Method method = Method::adaptive_magnus;
    double rel_tol = 1e-10;        // per-step local error target (adaptive)
    double initial_step = 0.0;     // 0 = auto
    double min_step = 0.0;         // 0 = auto (span * 1e-14)
    int fixed_steps = 0;           // 0 = auto for fixed-step methods
    double symplectic_tol = 1e-8;  // defect tolerance checked on the result
};

struct SymplecticPropagator {
    Matrix matrix;  // 2N x 2N, maps (X,P) at t_start to t_end
    double t_start = 0.0;
    double t_end = 0.0;

    int n_modes() const { return static_cast<int>(matrix.rows()) / 2; }

    // max-norm of S^T J S - J with J the standard symplectic form
    double symplectic_defect() const {
        const int n = n_modes();
        Matrix J = Matrix::Zero(2 * n, 2 * n);
        J.topRightCorner(n, n) = Matrix::Identity(n, n);
        J.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
        return (matrix.transpose() * J * matrix - J).cwiseAbs().maxCoeff();
    }
};

namespace detail {

inline Matrix hamiltonian_generator(const QuadraticSystem& sys, double t) {
    const int n = sys.n_modes;
    Matrix A = Matrix::Zero(2 * n, 2 * n);
    A.topRightCorner(n, n) = Matrix::Identity(n, n) / sys.mass;
    A.bottomLeftCorner(n, n) = -sys.stiffness_at(t);
    return A;
}

// Fourth-order Magnus step over [t, t+h] using two Gauss nodes.
inline Matrix magnus4_step(const QuadraticSystem& sys, double t, double h) {
    constexpr double gauss_off = 0.2886751345948128823;  // sqrt(3)/6
    const Matrix A1 = hamiltonian_generator(sys, t + (0.5 - gauss_off) * h);
    const Matrix A2 = hamiltonian_generator(sys, t + (0.5 + gauss_off) * h);
    const double c = std::sqrt(3.0) * h * h / 12.0;
    Matrix omega = 0.5 * h * (A1 + A2) - c * (A1 * A2 - A2 * A1);
    return omega.exp();
}

// Characteristic frequency scale used to seed the adaptive step size.
inline double frequency_scale(const QuadraticSystem& sys, double t) {
    const Matrix K = sys.stiffness_at(t);
    double diag_max = 0.0;
    for (int i = 0; i < sys.n_modes; ++i) diag_max = std::max(diag_max, std::abs(K(i, i)));
    return std::sqrt(std::max(diag_max / sys.mass, 1e-30));
}

}  // namespace detail

inline SymplecticPropagator propagate(const QuadraticSystem& sys, double t_start,
                                      double t_end, const StepControl& control = {}) {
    if (t_end < t_start)
        throw invalid_argument_error("propagate: requires t_start <= t_end");
    const int n = sys.n_modes;
    const double span = t_end - t_start;

    Matrix S = Matrix::Identity(2 * n, 2 * n);
    if (span == 0.0) return SymplecticPropagator{std::move(S), t_start, t_end};

    if (control.method == StepControl::Method::fixed_leapfrog) {
        int steps = control.fixed_steps;
        if (steps <= 0)
            steps = std::max(16, static_cast<int>(std::ceil(
                                     40.0 * span * detail::frequency_scale(sys, t_start))));
        const double h = span / steps;
        Matrix cols = Matrix::Identity(2 * n, 2 * n);
        for (int k = 0; k < steps; ++k) {
            const double t = t_start + k * h;
            const Matrix Kmid = sys.stiffness_at(t + 0.5 * h);
            auto Xb = cols.topRows(n);
            auto Pb = cols.bottomRows(n);
            Xb += (0.5 * h / sys.mass) * Pb;
            Pb -= h * (Kmid * Xb);
            Xb += (0.5 * h / sys.mass) * Pb;
        }
        S = cols;
    } else if (control.method == StepControl::Method::fixed_magnus) {
        int steps = control.fixed_steps;
        if (steps <= 0)
            steps = std::max(16, static_cast<int>(std::ceil(
                                     10.0 * span * detail::frequency_scale(sys, t_start))));
        const double h = span / steps;
        for (int k = 0; k < steps; ++k)
            S = detail::magnus4_step(sys, t_start + k * h, h) * S;
    } else {
        // adaptive Magnus: compare one h-step against two h/2-steps
        const double tol = control.rel_tol;
        const double min_step =
            control.min_step > 0.0 ? control.min_step : span * 1e-14;
        double h = control.initial_step;
        if (h <= 0.0) h = 0.1 / detail::frequency_scale(sys, t_start);
        h = std::min(h, span);

        double t = t_start;
        while (t < t_end - 1e-15 * span) {
            h = std::min(h, t_end - t);
            if (h < min_step) {
                std::ostringstream os;
                os << "propagate: step size underflow at t = " << t
                   << " (h = " << h << ")";
                throw numerical_error(os.str());
            }
            const Matrix full = detail::magnus4_step(sys, t, h);
            const Matrix half1 = detail::magnus4_step(sys, t, 0.5 * h);
            const Matrix half2 = detail::magnus4_step(sys, t + 0.5 * h, 0.5 * h);
            const Matrix fine = half2 * half1;
            const double err =
                (full - fine).cwiseAbs().maxCoeff() / std::max(1.0, fine.cwiseAbs().maxCoeff());
            if (err <= tol) {
                S = fine * S;
                t += h;
                const double grow = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
                h *= std::clamp(grow, 0.2, 5.0);
            } else {
                h *= std::max(0.2, 0.9 * std::pow(tol / err, 0.2));
            }
        }
    }

    SymplecticPropagator prop{std::move(S), t_start, t_end};
    if (prop.symplectic_defect() > control.symplectic_tol) {
        std::ostringstream os;
        os << "propagate: symplectic defect " << prop.symplectic_defect()
           << " exceeds tolerance " << control.symplectic_tol;
        throw numerical_error(os.str());
    }
    return prop;
}

// Propagators from t_start to each of the (sorted ascending) sample times,
// accumulated incrementally so the whole sweep costs one pass.
inline std::vector<SymplecticPropagator> propagate_through(
    const QuadraticSystem& sys, double t_start, const std::vector<double>& sample_times,
    const StepControl& control = {}) {
    std::vector<SymplecticPropagator> out;
    out.reserve(sample_times.size());
    const int n = sys.n_modes;
    Matrix S = Matrix::Identity(2 * n, 2 * n);
    double t_prev = t_start;
    for (double ts : sample_times) {
        if (ts < t_prev - 1e-12)
            throw invalid_argument_error("propagate_through: sample times must be ascending");
        if (ts > t_prev + 1e-14 * std::max(1.0, std::abs(ts))) {
            S = propagate(sys, t_prev, ts, control).matrix * S;
            t_prev = ts;
        }
        out.push_back(SymplecticPropagator{S, t_start, ts});
    }
    return out;
}

}  // namespace casimir
