// Ion-chain construction from surface-trap electrostatics.
//
// DC electrodes live on a grounded plane (gapless-plane approximation) and
// are modeled as axial strips: either full-width (spanning the whole plane
// transverse to the chain) or symmetric lateral pairs flanking the trap
// axis.  The chain floats at height h0 above the plane.  The potential of a
// rectangular patch [x1,x2] x [a,b] at voltage V is a sum of corner terms
//   F(p, q) = atan( p q / (y R) ),  R = sqrt(p^2 + q^2 + y^2),
// whose derivatives are available in closed form.
//
// The radial (in-plane transverse) curvature of the DC potential, the RF
// pseudopotential, the optical tweezer, and the staggered Coulomb couplings
// combine into the on-site coefficients chi_i of the quadratic chain
// Hamiltonian.  All chain dynamics use simulation units: common mass 1,
// mean nearest-neighbor coupling kbar 1, frequencies in sqrt(kbar/m).

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/quadratic.hpp"

namespace casimir {

struct IonSpecies {
    double mass_kg = si::ca40_mass_amu * si::atomic_mass_unit;
    int charge_number = 1;
};

struct Electrode {
    double axial_center_m = 0.0;
    double axial_width_m = 0.0;
    double voltage_V = 0.0;
    bool full_width = true;  // strip spans the whole plane transverse to the chain
    double lateral_gap_m = 0.0;  // symmetric pair: inner edge distance from the axis
    double lateral_extent_m = std::numeric_limits<double>::infinity();
};

// Optical tweezer schedule in simulation units: omega_O^2(t) added to the
// radial stiffness of the target ions, in units of kbar/m.
struct DriveSchedule {
    enum class Form { sine_squared, tabulated };

    std::vector<int> target_ions = {4};  // 0-based; paper drives ion 5
    double alpha = 0.0;                  // sine-squared depth
    double omega_D = 1.0;
    double t1 = 0.0;
    double t2 = 0.0;
    Form form = Form::sine_squared;
    // tabulated form: values on a uniform phase grid over [0, pi], reflected
    // periodically; endpoint slopes vanish so the extension is smooth
    std::vector<double> phase_table;

    double phase(double t) const {
        if (t <= t1) return 0.0;
        const double raw = omega_D * ((t < t2 ? t : t2) - t1);
        double ph = std::fmod(raw, 2.0 * std::numbers::pi);
        if (ph > std::numbers::pi) ph = 2.0 * std::numbers::pi - ph;
        return ph;
    }

    // drive value as a function of phase in [0, pi]
    double value_at_phase(double ph) const {
        if (form == Form::sine_squared) {
            const double s = std::sin(0.5 * ph);
            return alpha * s * s;
        }
        const int n = static_cast<int>(phase_table.size());
        if (n < 2) throw invalid_argument_error("DriveSchedule: empty phase table");
        const double x = ph / std::numbers::pi * (n - 1);
        const int i = std::clamp(static_cast<int>(x), 0, n - 2);
        const double s = x - i;
        // local cubic Hermite with centered slopes (clamped at the ends)
        auto slope = [&](int j) {
            if (j <= 0 || j >= n - 1) return 0.0;
            return 0.5 * (phase_table[j + 1] - phase_table[j - 1]);
        };
        const double y0 = phase_table[i], y1 = phase_table[i + 1];
        const double m0 = slope(i), m1 = slope(i + 1);
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 +
               (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1;
    }

    double omega_sq_kbar(double t) const {
        if (alpha == 0.0 && form == Form::sine_squared) return 0.0;
        return value_at_phase(phase(t));
    }
};

struct TrapConfig {
    int n_ions = 20;
    IonSpecies species;
    std::vector<Electrode> dc_electrodes;
    double height_m = 80e-6;
    double rf_omega_sq_kbar = 7.40;  // m wRF^2 in units of kbar
    double dc_sign = 1.0;            // sign convention of the DC solution
    // modeling knobs (documented): auxiliary harmonic axial confinement and
    // a chi profile supplied as data instead of the electrostatic curvature
    std::optional<double> axial_aux_j_per_m2;
    std::optional<Vector> chi_override_kbar;
    double init_spacing_m = 4e-6;  // equilibrium solver starting guess
};

struct PotentialSample {
    double value_V = 0.0;
    double radial_curvature_V_m2 = 0.0;  // d2 phi / dx2, in-plane transverse
    double axial_gradient_V_m = 0.0;
    double axial_curvature_V_m2 = 0.0;
};

namespace detail {

// corner term F = atan(p q / (y R)) and the derivatives needed on-axis
struct Corner {
    double p, q, y;

    double R() const { return std::sqrt(p * p + q * q + y * y); }
    double value() const {
        if (std::isinf(p) && std::isinf(q))
            return (p > 0 ? 1.0 : -1.0) * (q > 0 ? 1.0 : -1.0) * 0.5 * std::numbers::pi;
        if (std::isinf(p)) return (p > 0 ? 1.0 : -1.0) * std::atan(q / y);
        if (std::isinf(q)) return (q > 0 ? 1.0 : -1.0) * std::atan(p / y);
        return std::atan(p * q / (y * R()));
    }
    double d_dq() const {  // dF/dq
        if (std::isinf(q)) return 0.0;
        if (std::isinf(p)) return (p > 0 ? 1.0 : -1.0) * y / (y * y + q * q);
        return y * p / (R() * (q * q + y * y));
    }
    double d2_dq2() const {
        if (std::isinf(q)) return 0.0;
        if (std::isinf(p)) return (p > 0 ? 1.0 : -1.0) * (-2.0) * q * y /
                                  ((y * y + q * q) * (y * y + q * q));
        const double r = R(), s = q * q + y * y;
        return -y * p * q * (s + 2.0 * r * r) / (r * r * r * s * s);
    }
    double d2_dp2() const {
        if (std::isinf(p)) return 0.0;
        if (std::isinf(q)) return (q > 0 ? 1.0 : -1.0) * (-2.0) * p * y /
                                  ((y * y + p * p) * (y * y + p * p));
        const double r = R(), s = p * p + y * y;
        return -y * p * q * (s + 2.0 * r * r) / (r * r * r * s * s);
    }
};

}  // namespace detail

// DC potential and curvatures on the trap axis (x = 0) at axial position s
// and height h above the plane.
inline PotentialSample dc_potential(const TrapConfig& config, double axial_m,
                                    double height_m) {
    if (height_m <= 0.0)
        throw invalid_argument_error("dc_potential: height must be positive");
    PotentialSample out;
    const double s = axial_m, y = height_m;
    for (const auto& el : config.dc_electrodes) {
        const double a = el.axial_center_m - 0.5 * el.axial_width_m;
        const double b = el.axial_center_m + 0.5 * el.axial_width_m;
        if (el.full_width) {
            // 2D strip: phi = (V/pi) [atan((b-s)/y) - atan((a-s)/y)]
            const double qb = b - s, qa = a - s;
            const double vb = std::atan(qb / y), va = std::atan(qa / y);
            out.value_V += el.voltage_V / std::numbers::pi * (vb - va);
            const double gb = y / (y * y + qb * qb), ga = y / (y * y + qa * qa);
            out.axial_gradient_V_m += el.voltage_V / std::numbers::pi * (-gb + ga);
            const double cb = -2.0 * qb * y / ((y * y + qb * qb) * (y * y + qb * qb));
            const double ca = -2.0 * qa * y / ((y * y + qa * qa) * (y * y + qa * qa));
            out.axial_curvature_V_m2 += el.voltage_V / std::numbers::pi * (-cb + ca);
            // no transverse structure: radial (in-plane) curvature vanishes
        } else {
            const double x1 = el.lateral_gap_m;
            const double x2 = std::isinf(el.lateral_extent_m)
                                  ? std::numeric_limits<double>::infinity()
                                  : el.lateral_gap_m + el.lateral_extent_m;
            // symmetric pair: [x1, x2] and [-x2, -x1], corners with signs
            // (+ for outer-outer and inner-inner, - otherwise)
            const double sides[2][2] = {{x1, x2}, {-x2, -x1}};
            for (const auto& xr : sides) {
                const double p1 = xr[0], p2 = xr[1];
                const double qs[2] = {a - s, b - s};
                for (int iq = 0; iq < 2; ++iq) {
                    for (int ip = 0; ip < 2; ++ip) {
                        const double sign = ((iq == 1) == (ip == 1)) ? 1.0 : -1.0;
                        detail::Corner c{ip == 1 ? p2 : p1, qs[iq], y};
                        const double w = el.voltage_V / (2.0 * std::numbers::pi) * sign;
                        out.value_V += w * c.value();
                        out.axial_gradient_V_m += -w * c.d_dq();
                        out.axial_curvature_V_m2 += w * c.d2_dq2();
                        out.radial_curvature_V_m2 += w * c.d2_dp2();
                    }
                }
            }
        }
    }
    out.value_V *= config.dc_sign;
    out.axial_gradient_V_m *= config.dc_sign;
    out.axial_curvature_V_m2 *= config.dc_sign;
    out.radial_curvature_V_m2 *= config.dc_sign;
    return out;
}

struct ChainEquilibrium {
    Vector positions_m;       // sorted ascending
    double residual = 0.0;    // scaled gradient norm at the solution
    double mean_spacing_m = 0.0;
};

// Minimize the axial energy (DC potential + auxiliary harmonic + Coulomb)
// with a damped Newton iteration.
inline ChainEquilibrium equilibrium_positions(const TrapConfig& config) {
    const int n = config.n_ions;
    if (n < 1) throw invalid_argument_error("equilibrium_positions: need ions");
    const double q = config.species.charge_number * si::elementary_charge;
    const double kC = config.species.charge_number * config.species.charge_number *
                      si::coulomb_energy_scale;
    const double aux = config.axial_aux_j_per_m2.value_or(0.0);
    const double h0 = config.height_m;

    Vector z(n);
    for (int i = 0; i < n; ++i)
        z[i] = (i - 0.5 * (n - 1)) * config.init_spacing_m;

    auto gradient = [&](const Vector& zz) {
        Vector g(n);
        for (int i = 0; i < n; ++i) {
            g[i] = q * dc_potential(config, zz[i], h0).axial_gradient_V_m + aux * zz[i];
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const double d = zz[i] - zz[j];
                g[i] -= kC * (d > 0 ? 1.0 : -1.0) / (d * d);
            }
        }
        return g;
    };
    auto hessian = [&](const Vector& zz) {
        Matrix H = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            H(i, i) = q * dc_potential(config, zz[i], h0).axial_curvature_V_m2 + aux;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const double c = 2.0 * kC / std::pow(std::abs(zz[i] - zz[j]), 3);
                H(i, i) += c;
                H(i, j) -= c;
            }
        }
        return H;
    };

    const double scale = kC / (config.init_spacing_m * config.init_spacing_m);
    double last_residual = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int it = 0; it < 400; ++it) {
        const Vector g = gradient(z);
        last_residual = g.cwiseAbs().maxCoeff() / scale;
        if (last_residual < 1e-10) {
            converged = true;
            break;
        }
        const Matrix H = hessian(z);
        Vector step = H.ldlt().solve(g);
        if (!step.allFinite()) step = g / H.cwiseAbs().maxCoeff();
        double lambda = 1.0;
        for (int ls = 0; ls < 40; ++ls) {
            Vector zn = z - lambda * step;
            bool ordered = true;
            for (int i = 0; i + 1 < n; ++i)
                if (zn[i + 1] <= zn[i]) ordered = false;
            if (ordered && gradient(zn).cwiseAbs().maxCoeff() <=
                               g.cwiseAbs().maxCoeff() * (1.0 - 1e-4 * lambda) + scale * 1e-13) {
                z = zn;
                break;
            }
            lambda *= 0.5;
            if (ls == 39) z = z - lambda * step;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "equilibrium_positions: Newton did not converge (scaled residual "
           << last_residual << "), last iterate spans [" << z[0] << ", " << z[n - 1]
           << "] m";
        throw numerical_error(os.str());
    }
    // require a true minimum of the axial energy
    Eigen::SelfAdjointEigenSolver<Matrix> es(hessian(z));
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw numerical_error(
            "equilibrium_positions: stationary point is not a minimum (axial "
            "instability)");

    ChainEquilibrium eq;
    eq.positions_m = z;
    eq.residual = last_residual;
    eq.mean_spacing_m = n > 1 ? (z[n - 1] - z[0]) / (n - 1) : 0.0;
    return eq;
}

// Coulomb coupling matrix k_ij = Z^2 e^2 / (4 pi eps0 |R_i - R_j|^3).
inline Matrix couplings(const ChainEquilibrium& eq, const IonSpecies& species) {
    const int n = static_cast<int>(eq.positions_m.size());
    const double kC =
        species.charge_number * species.charge_number * si::coulomb_energy_scale;
    Matrix k = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j)
                k(i, j) = kC / std::pow(std::abs(eq.positions_m[i] - eq.positions_m[j]), 3);
    return k;
}

// Mean nearest-neighbor coupling from the mean spacing (the paper's kbar).
inline double mean_coupling(const ChainEquilibrium& eq, const IonSpecies& species) {
    const double kC =
        species.charge_number * species.charge_number * si::coulomb_energy_scale;
    return kC / std::pow(eq.mean_spacing_m, 3);
}

// Static chi_i (SI stiffness, J/m^2): radial DC curvature + RF pseudopotential
// - staggered Coulomb sums.  The tweezer drive adds m omega_O^2(t) on its
// target ions at evaluation time (see IonChainSystem).
inline Vector radial_chis_static(const TrapConfig& config, const ChainEquilibrium& eq) {
    const int n = static_cast<int>(eq.positions_m.size());
    const double q = config.species.charge_number * si::elementary_charge;
    const double kbar = mean_coupling(eq, config.species);
    const Matrix kij = couplings(eq, config.species);

    Vector chi(n);
    if (config.chi_override_kbar) {
        if (config.chi_override_kbar->size() != n)
            throw invalid_argument_error("chi override length does not match n_ions");
        chi = *config.chi_override_kbar * kbar;
        return chi;
    }
    for (int i = 0; i < n; ++i) {
        chi[i] = q * dc_potential(config, eq.positions_m[i], config.height_m)
                         .radial_curvature_V_m2 +
                 config.rf_omega_sq_kbar * kbar;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const int par = (i - j) % 2 == 0 ? 0 : 2;  // 1 - (-1)^(i-j)
            chi[i] -= par * kij(i, j);
        }
    }
    return chi;
}

// chi_i(t) including the tweezer term, in SI stiffness units.
inline Vector radial_chis(const TrapConfig& config, const ChainEquilibrium& eq,
                          const DriveSchedule& drive, double t) {
    Vector chi = radial_chis_static(config, eq);
    const double kbar = mean_coupling(eq, config.species);
    const double tw = drive.omega_sq_kbar(t);
    for (int ion : drive.target_ions) {
        if (ion < 0 || ion >= chi.size())
            throw invalid_argument_error("radial_chis: drive target out of range");
        chi[ion] += tw * kbar;
    }
    return chi;
}

// Staggered quadratic system from on-site chis and Coulomb couplings, in
// simulation units (mass 1, kbar 1).  chis_kbar(t) returns chi_i(t)/kbar.
inline QuadraticSystem to_quadratic(std::function<Vector(double)> chis_kbar,
                                    const Matrix& kij_kbar) {
    const int n = static_cast<int>(kij_kbar.rows());
    auto stiffness = [chis = std::move(chis_kbar), kij_kbar, n](double t) {
        const Vector chi = chis(t);
        if (chi.size() != n)
            throw invalid_argument_error("to_quadratic: chi dimension mismatch");
        Matrix K = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            K(i, i) = chi[i];
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const double sgn = ((i - j) % 2 == 0) ? 1.0 : -1.0;
                K(i, j) = sgn * kij_kbar(i, j);
                K(i, i) -= sgn * kij_kbar(i, j);
            }
        }
        return K;
    };
    return QuadraticSystem{n, 1.0, std::move(stiffness)};
}

// Assembled ion chain: equilibrium, couplings, chi profile and drive, with
// the dynamics exposed in simulation units.
struct IonChainSystem {
    TrapConfig config;
    ChainEquilibrium equilibrium;
    Matrix kij_kbar;
    double kbar_si = 0.0;
    Vector chi_static_kbar;
    DriveSchedule drive;

    int n_ions() const { return static_cast<int>(chi_static_kbar.size()); }

    // sqrt(kbar/m) in rad/s: conversion between simulation and SI time
    double frequency_unit_rad_s() const {
        return std::sqrt(kbar_si / config.species.mass_kg);
    }

    Vector chis_kbar(double t) const {
        Vector chi = chi_static_kbar;
        const double tw = drive.omega_sq_kbar(t);
        for (int ion : drive.target_ions) chi[ion] += tw;
        return chi;
    }

    QuadraticSystem system() const {
        return to_quadratic([*this](double t) { return chis_kbar(t); }, kij_kbar);
    }

    // instantaneous lowest mode frequency with an explicit tweezer value
    double lowest_frequency(double tweezer_kbar) const {
        Vector chi = chi_static_kbar;
        for (int ion : drive.target_ions) chi[ion] += tweezer_kbar;
        auto sys = to_quadratic([chi](double) { return chi; }, kij_kbar);
        return normal_modes(sys, 0.0).frequencies[0];
    }

    // period average of the instantaneous lowest frequency over one drive cycle
    double average_lowest_frequency(int n_points = 2000) const {
        double sum = 0.0;
        for (int i = 0; i <= n_points; ++i) {
            const double ph = std::numbers::pi * i / n_points;  // half period, symmetric
            const double w = lowest_frequency(drive.value_at_phase(ph));
            sum += (i == 0 || i == n_points) ? 0.5 * w : w;
        }
        return sum / n_points;
    }
};

struct MatchResult {
    double cavity_length_d = 0.0;  // r0 - l0 in units of d = sqrt(m/kbar)
    double delta_d = 0.0;          // modulation depth in units of d
    double omega1 = 0.0;           // undriven lowest mode, units sqrt(kbar/m)
    double omega1_driven = 0.0;    // at full tweezer depth (drive phase pi)
    double omega1_avg = 0.0;       // period average over the drive
};

// Match the ideal cavity to the chain: the lowest instantaneous cavity mode
// pi/(r-l) equals the lowest instantaneous chain mode at drive phases 0 and
// pi.  In simulation units the discretization interval d is 1.
inline MatchResult match_cavity(const IonChainSystem& chain) {
    MatchResult m;
    m.omega1 = chain.lowest_frequency(0.0);
    m.omega1_driven = chain.lowest_frequency(chain.drive.value_at_phase(std::numbers::pi));
    m.omega1_avg = chain.average_lowest_frequency();
    m.cavity_length_d = std::numbers::pi / m.omega1;
    m.delta_d = m.cavity_length_d - std::numbers::pi / m.omega1_driven;
    return m;
}

// Tabulated tweezer schedule that makes the chain's lowest instantaneous
// frequency track the cavity's pi/(r(t) - l(t)) at every drive phase.
inline DriveSchedule optimize_drive(const IonChainSystem& chain, double cavity_length_d,
                                    double delta_d, int n_phase = 65) {
    DriveSchedule out = chain.drive;
    out.form = DriveSchedule::Form::tabulated;
    out.phase_table.resize(n_phase);
    const double hi_guess = std::max(1.0, 4.0 * chain.drive.alpha);
    for (int i = 0; i < n_phase; ++i) {
        const double ph = std::numbers::pi * i / (n_phase - 1);
        const double s = std::sin(0.5 * ph);
        const double target =
            std::numbers::pi / (cavity_length_d - delta_d * s * s);
        auto f = [&](double tw) { return chain.lowest_frequency(tw) - target; };
        double lo = -0.2, hi = hi_guess;
        double flo = f(lo), fhi = f(hi);
        if (flo * fhi > 0.0) {
            std::ostringstream os;
            os << "optimize_drive: target frequency " << target
               << " unreachable at phase " << ph << " (bracket [" << lo << ", " << hi
               << "] in kbar units)";
            throw numerical_error(os.str());
        }
        for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if ((fm <= 0.0) == (flo <= 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        out.phase_table[i] = 0.5 * (lo + hi);
    }
    return out;
}

inline IonChainSystem build_ion_chain(const TrapConfig& config,
                                      const DriveSchedule& drive) {
    IonChainSystem chain;
    chain.config = config;
    chain.equilibrium = equilibrium_positions(config);
    chain.kbar_si = mean_coupling(chain.equilibrium, config.species);
    chain.kij_kbar = couplings(chain.equilibrium, config.species) / chain.kbar_si;
    chain.chi_static_kbar =
        radial_chis_static(config, chain.equilibrium) / chain.kbar_si;
    chain.drive = drive;
    for (int ion : drive.target_ions)
        if (ion < 0 || ion >= config.n_ions)
            throw invalid_argument_error("build_ion_chain: drive target out of range");
    // surface radial instabilities (zigzag) as a clear error
    auto sys = chain.system();
    try {
        normal_modes(sys, drive.t1);
    } catch (const unstable_configuration_error& e) {
        throw unstable_configuration_error(
            std::string("build_ion_chain: radial (zigzag) instability: ") + e.what());
    }
    return chain;
}

}  // namespace casimir
