// Time-dependent quadratic bosonic systems and their instantaneous normal modes.
//
// A QuadraticSystem is H(t) = P.P/(2m) + X.K(t).X/2 for N coupled oscillators
// with a common mass.  ModeBasis holds the canonical modes of a static K:
// K g_l = m w_l^2 g_l with orthonormal g_l and ascending w_l.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <sstream>
#include <utility>

#include "casimir/errors.hpp"

namespace casimir {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Three-stage protocol: static on [t0,t1), driven on [t1,t2), static after t2.
struct StageProtocol {
    double t0 = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;

    StageProtocol() = default;
    StageProtocol(double t0_, double t1_, double t2_) : t0(t0_), t1(t1_), t2(t2_) {
        if (!(t0 < t1 && t1 < t2))
            throw invalid_argument_error("StageProtocol: requires t0 < t1 < t2");
    }
};

struct QuadraticSystem {
    int n_modes = 0;
    double mass = 1.0;
    std::function<Matrix(double)> stiffness;  // K(t), symmetric N x N

    Matrix stiffness_at(double t) const {
        Matrix K = stiffness(t);
        if (K.rows() != n_modes || K.cols() != n_modes)
            throw invalid_argument_error("QuadraticSystem: K(t) has wrong dimensions");
        const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
        if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw invalid_argument_error("QuadraticSystem: K(t) is not symmetric");
        return K;
    }
};

struct ModeBasis {
    Vector frequencies;  // ascending, > 0
    Matrix vectors;      // orthonormal columns g_l

    int size() const { return static_cast<int>(frequencies.size()); }
};

namespace detail {

// Deterministic sign: make the largest-magnitude component positive.
inline void fix_column_signs(Matrix& G) {
    for (Eigen::Index c = 0; c < G.cols(); ++c) {
        Eigen::Index imax = 0;
        G.col(c).cwiseAbs().maxCoeff(&imax);
        if (G(imax, c) < 0.0) G.col(c) = -G.col(c);
    }
}

inline bool lex_less(const Vector& a, const Vector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i] - 1e-14) return true;
        if (a[i] > b[i] + 1e-14) return false;
    }
    return false;
}

}  // namespace detail

// Canonical modes of a static stiffness matrix.  Throws
// unstable_configuration_error if any eigenvalue is non-positive.
inline ModeBasis normal_modes(const Matrix& K, double mass) {
    if (K.rows() != K.cols() || K.rows() == 0)
        throw invalid_argument_error("normal_modes: K must be square and non-empty");
    if (mass <= 0.0)
        throw invalid_argument_error("normal_modes: mass must be positive");
    const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
    if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw invalid_argument_error("normal_modes: K is not symmetric");

    Eigen::SelfAdjointEigenSolver<Matrix> es(K / mass);
    if (es.info() != Eigen::Success)
        throw numerical_error("normal_modes: eigensolver failed");

    const Vector evals = es.eigenvalues();  // ascending
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
        if (evals[i] <= 0.0) {
            std::ostringstream os;
            os << "normal_modes: unstable static configuration, eigenvalue " << i
               << " is " << evals[i] << " (must be > 0)";
            throw unstable_configuration_error(os.str());
        }
    }

    ModeBasis basis;
    basis.frequencies = evals.array().sqrt();
    basis.vectors = es.eigenvectors();
    detail::fix_column_signs(basis.vectors);

    // Resolve exact degeneracies deterministically by lexicographic column order.
    for (Eigen::Index c = 0; c + 1 < basis.frequencies.size(); ++c) {
        if (std::abs(basis.frequencies[c + 1] - basis.frequencies[c]) <
                1e-12 * basis.frequencies[c] &&
            detail::lex_less(basis.vectors.col(c + 1), basis.vectors.col(c))) {
            basis.vectors.col(c).swap(basis.vectors.col(c + 1));
            std::swap(basis.frequencies[c], basis.frequencies[c + 1]);
        }
    }
    return basis;
}

inline ModeBasis normal_modes(const QuadraticSystem& sys, double t) {
    return normal_modes(sys.stiffness_at(t), sys.mass);
}

}  // namespace casimir
