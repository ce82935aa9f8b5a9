// Experimental backgrounds and readout: electric-field-noise heating rates,
// blue-sideband excitation signals, recovery of the phonon distribution from
// the signal, and Fock statistics of single-mode Gaussian states.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "casimir/bogoliubov.hpp"
#include "casimir/constants.hpp"
#include "casimir/trap.hpp"

namespace casimir {

struct NoiseModel {
    enum class Scaling { SE_omega_constant, SE_constant };

    double S_E_ref = 0.0;     // V^2 / (m^2 Hz) at omega_ref
    double omega_ref = 1.0;   // rad/s
    Scaling scaling = Scaling::SE_omega_constant;

    double spectral_density(double omega) const {
        if (S_E_ref < 0.0) throw invalid_argument_error("NoiseModel: S_E must be >= 0");
        if (scaling == Scaling::SE_omega_constant) return S_E_ref * omega_ref / omega;
        return S_E_ref;
    }
};

// Electric-field-noise heating rate in quanta per second:
//   Gamma = e^2 Z^2 S_E(omega) / (4 m hbar omega)
inline double heating_rate(const NoiseModel& noise, const IonSpecies& species,
                           double omega_rad_s) {
    if (omega_rad_s <= 0.0)
        throw invalid_argument_error("heating_rate: omega must be positive");
    const double qz = species.charge_number * si::elementary_charge;
    return qz * qz * noise.spectral_density(omega_rad_s) /
           (4.0 * species.mass_kg * si::hbar * omega_rad_s);
}

struct PhononDistribution {
    Vector p;  // p[n], n = 0..n_max

    PhononDistribution() = default;
    explicit PhononDistribution(Vector probabilities) : p(std::move(probabilities)) {
        if (p.size() == 0) throw invalid_argument_error("PhononDistribution: empty");
        if (p.minCoeff() < -1e-12)
            throw invalid_argument_error("PhononDistribution: negative probability");
        if (std::abs(p.sum() - 1.0) > 1e-9)
            throw invalid_argument_error("PhononDistribution: probabilities must sum to 1");
    }

    int n_max() const { return static_cast<int>(p.size()) - 1; }
    double mean() const {
        double m = 0.0;
        for (int n = 0; n <= n_max(); ++n) m += n * p[n];
        return m;
    }
};

struct SidebandSignal {
    Vector delta_t;  // uniform sample times (units of 1/Omega_01 allowed)
    Vector P_e;      // excitation probability
    double rabi = 0.0;  // Omega_01 in the same inverse units as delta_t
};

// Blue-sideband excitation P_e(dt) = sum_n p(n) sin^2( sqrt(n+1) Omega dt ).
inline SidebandSignal sideband_signal(const PhononDistribution& dist, double rabi,
                                      const Vector& dt_grid) {
    if (rabi <= 0.0) throw invalid_argument_error("sideband_signal: rabi must be > 0");
    SidebandSignal sig;
    sig.delta_t = dt_grid;
    sig.rabi = rabi;
    sig.P_e.resize(dt_grid.size());
    for (Eigen::Index i = 0; i < dt_grid.size(); ++i) {
        double pe = 0.0;
        for (int n = 0; n <= dist.n_max(); ++n) {
            const double s = std::sin(std::sqrt(n + 1.0) * rabi * dt_grid[i]);
            pe += dist.p[n] * s * s;
        }
        sig.P_e[i] = pe;
    }
    return sig;
}

namespace detail {

// Nonnegative least squares (Lawson-Hanson active set).
inline Vector nnls(const Matrix& A, const Vector& b, int max_iter = 200) {
    const int n = static_cast<int>(A.cols());
    Vector x = Vector::Zero(n);
    std::vector<bool> active(n, false);
    for (int iter = 0; iter < max_iter; ++iter) {
        const Vector w = A.transpose() * (b - A * x);
        int best = -1;
        double wmax = 1e-12;
        for (int j = 0; j < n; ++j)
            if (!active[j] && w[j] > wmax) {
                wmax = w[j];
                best = j;
            }
        if (best < 0) break;
        active[best] = true;
        for (int inner = 0; inner < max_iter; ++inner) {
            std::vector<int> idx;
            for (int j = 0; j < n; ++j)
                if (active[j]) idx.push_back(j);
            Matrix Ap(A.rows(), idx.size());
            for (std::size_t c = 0; c < idx.size(); ++c) Ap.col(c) = A.col(idx[c]);
            Vector zp = (Ap.transpose() * Ap)
                            .ldlt()
                            .solve(Ap.transpose() * b);
            if (zp.minCoeff() > 0.0) {
                x.setZero();
                for (std::size_t c = 0; c < idx.size(); ++c) x[idx[c]] = zp[c];
                break;
            }
            double alpha = 1.0;
            for (std::size_t c = 0; c < idx.size(); ++c)
                if (zp[c] <= 0.0) {
                    const double xc = x[idx[c]];
                    alpha = std::min(alpha, xc / (xc - zp[c]));
                }
            for (std::size_t c = 0; c < idx.size(); ++c) {
                x[idx[c]] += alpha * (zp[c] - x[idx[c]]);
                if (x[idx[c]] <= 1e-14) {
                    x[idx[c]] = 0.0;
                    active[idx[c]] = false;
                }
            }
        }
    }
    return x;
}

}  // namespace detail

// Recover p(n) from a sideband signal by least squares on the known Rabi
// frequency grid 2 sqrt(n+1) Omega, with nonnegativity enforced.
inline PhononDistribution invert_sideband(const SidebandSignal& sig, int n_max) {
    if (n_max < 0) throw invalid_argument_error("invert_sideband: n_max >= 0");
    const Eigen::Index m = sig.delta_t.size();
    if (m < 2) throw invalid_argument_error("invert_sideband: need samples");

    // window must resolve the two slowest beat notes: require at least
    // 4 periods of the (sqrt(2)-1) beat between n=0 and n=1
    const double window = sig.delta_t[m - 1] - sig.delta_t[0];
    const double required =
        4.0 * 2.0 * std::numbers::pi /
        (2.0 * sig.rabi * (std::sqrt(2.0) - 1.0));
    if (window < required) {
        std::ostringstream os;
        os << "invert_sideband: sampling window " << window
           << " is too short to resolve adjacent Rabi frequencies; need >= "
           << required;
        throw invalid_argument_error(os.str());
    }

    // P_e = 1/2 sum_n p(n) (1 - cos(2 sqrt(n+1) Omega dt)); fit
    // y = 1 - 2 P_e = sum_n p(n) cos(2 sqrt(n+1) Omega dt) plus sum p = 1
    Matrix A(m + 1, n_max + 1);
    Vector b(m + 1);
    for (Eigen::Index i = 0; i < m; ++i) {
        b[i] = 1.0 - 2.0 * sig.P_e[i];
        for (int n = 0; n <= n_max; ++n)
            A(i, n) = std::cos(2.0 * std::sqrt(n + 1.0) * sig.rabi * sig.delta_t[i]);
    }
    const double norm_weight = std::sqrt(double(m));
    for (int n = 0; n <= n_max; ++n) A(m, n) = norm_weight;
    b[m] = norm_weight;

    Vector p = detail::nnls(A, b);
    const double total = p.sum();
    if (total <= 0.0)
        throw numerical_error("invert_sideband: degenerate fit (zero total probability)");
    return PhononDistribution(p / total);
}

// Fock-state probabilities of the reduced single-mode Gaussian state of mode
// ell for vacuum input, computed from the 2x2 covariance matrix through a
// truncated Fock-space construction (squeezed thermal state).
inline PhononDistribution photon_statistics(const BogoliubovMap& map, int ell,
                                            int n_max) {
    const int N = map.size();
    if (ell < 0 || ell >= N) throw invalid_argument_error("photon_statistics: bad mode");
    if (n_max < 0) throw invalid_argument_error("photon_statistics: n_max >= 0");

    const double nbar = map.beta.row(ell).cwiseAbs2().sum();
    const std::complex<double> m2 = (map.alpha * map.beta.transpose())(ell, ell);

    // covariance of (x, p) quadratures; vacuum has 1/2 on the diagonal
    const double vxx = nbar + 0.5 + m2.real();
    const double vpp = nbar + 0.5 - m2.real();
    const double vxp = m2.imag();
    const double det = vxx * vpp - vxp * vxp;
    const double nu = std::sqrt(std::max(det, 0.25));   // symplectic eigenvalue
    const double nth = nu - 0.5;                        // thermal occupation
    // squeezing parameter from the covariance eigenvalue ratio
    const double tr = vxx + vpp;
    const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
    const double lam_max = 0.5 * (tr + disc);
    const double r = 0.25 * std::log(lam_max * lam_max / det);

    // build S(r) rho_th S(r)^dagger in a padded Fock space
    const int dim = std::max(2 * n_max + 24, 48);
    Matrix gen = Matrix::Zero(dim, dim);  // r/2 (a^2 - a^dag^2), real antisymmetric
    for (int n = 0; n + 2 < dim; ++n) {
        const double c = 0.5 * r * std::sqrt((n + 1.0) * (n + 2.0));
        gen(n, n + 2) = c;
        gen(n + 2, n) = -c;
    }
    const Matrix S = gen.exp();
    Vector pth(dim);
    const double ratio = nth / (nth + 1.0);
    double w = 1.0 / (nth + 1.0);
    for (int n = 0; n < dim; ++n) {
        pth[n] = w;
        w *= ratio;
    }
    Vector p(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        double val = 0.0;
        for (int k = 0; k < dim; ++k) val += S(n, k) * S(n, k) * pth[k];
        p[n] = val;
    }
    const double tail = 1.0 - p.sum();
    if (tail > 1e-6) {
        std::ostringstream os;
        os << "photon_statistics: tail mass " << tail << " beyond n_max = " << n_max
           << "; increase n_max";
        throw invalid_argument_error(os.str());
    }
    // consistency: the mean of the reconstructed distribution matches nbar up
    // to the (already bounded) truncated tail
    return PhononDistribution(p / p.sum());
}

}  // namespace casimir
