// Reference solution of the ideal moving-mirror cavity (Moore's model).
//
// The cavity [l(t), r0] has a static right mirror and an oscillating left
// mirror.  Wave solutions are carried by null rays; everything reduces to a
// single phase function R(u) on the right-moving null coordinate u = t - z,
// satisfying R(t - l(t)) = R(t + l(t) - 2 r0) + 2 (one round trip advances
// the phase by 2).  Mode l of the initial static cavity evolves as
//   A_l(t,z) = [ e^{-i pi l G(t+z)} - e^{-i pi l R(t-z)} ] / sqrt(2 pi l),
// with G(x) = R(x - 2 r0) + 2.  R is built by tracing rays backward through
// reflections, each found by root-solving the ray-mirror intersection.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "casimir/quadratic.hpp"

namespace casimir {

struct MirrorTrajectory {
    double l0 = 0.0;
    double r0 = 1.0;
    double delta = 0.0;    // full modulation depth of the left mirror
    double omega_D = 1.0;  // drive frequency
    StageProtocol protocol;

    MirrorTrajectory() = default;
    MirrorTrajectory(double l0_, double r0_, double delta_, double omega_D_,
                     StageProtocol protocol_)
        : l0(l0_), r0(r0_), delta(delta_), omega_D(omega_D_), protocol(protocol_) {
        if (!(r0 > l0)) throw invalid_argument_error("MirrorTrajectory: requires r0 > l0");
        if (delta < 0.0) throw invalid_argument_error("MirrorTrajectory: delta must be >= 0");
        if (omega_D <= 0.0)
            throw invalid_argument_error("MirrorTrajectory: omega_D must be > 0");
        const double period = 2.0 * std::numbers::pi / omega_D;
        const int n_check = std::max(
            1000, static_cast<int>(1000.0 * (protocol.t2 - protocol.t1) / period));
        for (int i = 0; i <= n_check; ++i) {
            const double t =
                protocol.t1 + (protocol.t2 - protocol.t1) * i / double(n_check);
            if (!(left(t) < right(t)))
                throw invalid_argument_error("MirrorTrajectory: mirrors cross");
        }
        if (max_speed() >= 0.999)
            throw invalid_argument_error(
                "MirrorTrajectory: mirror speed approaches the wave speed");
    }

    double drive_phase(double t) const {
        if (t <= protocol.t1) return 0.0;
        if (t >= protocol.t2) return 0.5 * omega_D * (protocol.t2 - protocol.t1);
        return 0.5 * omega_D * (t - protocol.t1);
    }

    double left(double t) const {
        const double s = std::sin(drive_phase(t));
        return l0 + delta * s * s;
    }

    double left_velocity(double t) const {
        if (t <= protocol.t1 || t >= protocol.t2) return 0.0;
        return 0.5 * delta * omega_D * std::sin(omega_D * (t - protocol.t1));
    }

    double right(double) const { return r0; }

    double max_speed() const { return 0.5 * delta * omega_D; }

    double initial_length() const { return r0 - l0; }
    double final_length() const { return r0 - left(protocol.t2); }
};

// Period average of the instantaneous cavity frequency pi*l / (r - l(t)),
// by trapezoid rule over one drive period (closed form: for the sin^2 drive
// this equals pi*l / sqrt(L0 (L0 - delta))).
inline double average_cavity_frequency(const MirrorTrajectory& traj, int ell,
                                       int n_points = 2000) {
    const double T = 2.0 * std::numbers::pi / traj.omega_D;
    double sum = 0.0;
    for (int i = 0; i <= n_points; ++i) {
        const double t = traj.protocol.t1 + T * i / double(n_points);
        const double w = std::numbers::pi * ell / (traj.right(t) - traj.left(t));
        sum += (i == 0 || i == n_points) ? 0.5 * w : w;
    }
    return sum / n_points;
}

namespace detail {

// Backward ray trace: R(u) and R'(u) by unwinding reflections until the ray
// history is entirely in stage I, where R is affine with slope 1/L0.
struct RayTrace {
    double R;
    double Rprime;
    int reflections;
};

inline RayTrace trace_ray(const MirrorTrajectory& traj, double u) {
    const double L0 = traj.initial_length();
    const double u_static = traj.protocol.t1 - traj.l0;
    double doppler = 1.0;
    int trips = 0;
    while (u > u_static) {
        if (++trips > 1000000) {
            std::ostringstream os;
            os << "trace_ray: reflection count exceeded at u = " << u;
            throw numerical_error(os.str());
        }
        // left-mirror crossing: t - l(t) = u, monotone since |l'| < 1
        double lo = u + traj.l0, hi = u + traj.l0 + traj.delta + 1e-12;
        double flo = lo - traj.left(lo) - u;
        // bisection + final Newton polish
        double t_mid = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            t_mid = 0.5 * (lo + hi);
            const double f = t_mid - traj.left(t_mid) - u;
            if ((f <= 0.0) == (flo <= 0.0)) {
                lo = t_mid;
                flo = f;
            } else {
                hi = t_mid;
            }
            if (hi - lo < 1e-13 * std::max(1.0, std::abs(u))) break;
        }
        for (int it = 0; it < 3; ++it) {  // Newton refinement
            const double f = t_mid - traj.left(t_mid) - u;
            const double fp = 1.0 - traj.left_velocity(t_mid);
            t_mid -= f / fp;
        }
        const double residual = std::abs(t_mid - traj.left(t_mid) - u);
        if (!(residual < 1e-9 * std::max(1.0, std::abs(u)))) {
            std::ostringstream os;
            os << "trace_ray: left-mirror crossing did not converge for ray u = " << u
               << " (residual " << residual << ")";
            throw numerical_error(os.str());
        }
        const double lp = traj.left_velocity(t_mid);
        doppler *= (1.0 + lp) / (1.0 - lp);
        u = t_mid + traj.left(t_mid) - 2.0 * traj.r0;
    }
    return RayTrace{(u - traj.l0) / L0 + 2.0 * trips, doppler / L0, trips};
}

}  // namespace detail

// Tabulated Moore phase function with monotone cubic interpolation.  Sample
// values come from exact backward ray tracing; `resolution` counts samples
// per round-trip length.
struct MooreFunction {
    std::vector<double> u;
    std::vector<double> R_val;
    std::vector<double> R_slope;          // exact R'(u) at the nodes
    std::vector<double> hermite_slope;    // monotonicity-limited slopes
    double u_min = 0.0, u_max = 0.0;
    int resolution = 0;

    bool covers(double x) const { return x >= u_min && x <= u_max; }

    double R(double x) const { return eval(x).first; }
    double Rprime(double x) const { return eval(x).second; }

    std::pair<double, double> eval(double x) const {
        if (u.size() < 2 || x <= u.front())
            return {R_val.front() + (x - u.front()) * R_slope.front(), R_slope.front()};
        if (x >= u.back())
            return {R_val.back() + (x - u.back()) * R_slope.back(), R_slope.back()};
        const auto it = std::upper_bound(u.begin(), u.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - u.begin()) - 1;
        const double h = u[i + 1] - u[i];
        const double s = (x - u[i]) / h;
        const double y0 = R_val[i], y1 = R_val[i + 1];
        const double m0 = hermite_slope[i] * h, m1 = hermite_slope[i + 1] * h;
        const double s2 = s * s, s3 = s2 * s;
        const double value = (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 +
                             (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1;
        const double deriv = ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * m0 +
                              (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * m1) /
                             h;
        return {value, deriv};
    }
};

inline MooreFunction build_moore_function(const MirrorTrajectory& traj,
                                          int resolution = 2048,
                                          double u_extra = 0.0) {
    if (resolution < 8)
        throw invalid_argument_error("build_moore_function: resolution too small");
    MooreFunction mf;
    mf.resolution = resolution;
    const double L0 = traj.initial_length();
    // cover every null coordinate needed to evaluate modes anywhere in the
    // cavity up to t2 (+ extra): u = t - z down to t0 - r0, and the
    // left-moving argument u = t + z - 2 r0 down to t0 + l0 - 2 r0
    mf.u_min = traj.protocol.t0 + traj.l0 - 2.0 * traj.r0 - 2.0 * L0;
    mf.u_max = traj.protocol.t2 + u_extra - traj.l0;
    const double span = mf.u_max - mf.u_min;
    const int n = std::max<int>(2, static_cast<int>(std::ceil(resolution * span / (2.0 * L0))));
    mf.u.resize(n + 1);
    mf.R_val.resize(n + 1);
    mf.R_slope.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double x = mf.u_min + span * i / double(n);
        const auto ray = detail::trace_ray(traj, x);
        mf.u[i] = x;
        mf.R_val[i] = ray.R;
        mf.R_slope[i] = ray.Rprime;
    }
    // Fritsch-Carlson limiter keeps the cubic interpolant monotone
    mf.hermite_slope = mf.R_slope;
    for (int i = 0; i < n; ++i) {
        const double sec = (mf.R_val[i + 1] - mf.R_val[i]) / (mf.u[i + 1] - mf.u[i]);
        mf.hermite_slope[i] = std::min(mf.hermite_slope[i], 3.0 * sec);
        mf.hermite_slope[i + 1] = std::min(mf.hermite_slope[i + 1], 3.0 * sec);
    }
    for (std::size_t i = 0; i + 1 < mf.R_val.size(); ++i)
        if (!(mf.R_val[i + 1] > mf.R_val[i]))
            throw numerical_error("build_moore_function: R table is not increasing");
    return mf;
}

// Mode function A_l(t,z) and its time derivative for the evolved stage-I mode.
inline std::pair<std::complex<double>, std::complex<double>> mode_function(
    const MooreFunction& mf, const MirrorTrajectory& traj, int ell, double t, double z) {
    if (ell < 1) throw invalid_argument_error("mode_function: ell must be >= 1");
    if (z < traj.left(t) - 1e-12 || z > traj.right(t) + 1e-12)
        throw invalid_argument_error("mode_function: z outside the cavity");
    const std::complex<double> I(0.0, 1.0);
    const double pl = std::numbers::pi * ell;
    const auto [Rr, Rrp] = mf.eval(t - z);
    const auto [Rg, Rgp] = mf.eval(t + z - 2.0 * traj.r0);
    const double G = Rg + 2.0;
    const std::complex<double> ph_g = std::exp(-I * pl * G);
    const std::complex<double> ph_r = std::exp(-I * pl * Rr);
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * ell);
    return {(ph_g - ph_r) * norm, -I * pl * (Rgp * ph_g - Rrp * ph_r) * norm};
}

// Classical wave-solution evaluator: z -> (f, df/dt) at fixed t.
using SolutionSlice = std::function<std::pair<double, double>(double z)>;
using ComplexSolutionSlice =
    std::function<std::pair<std::complex<double>, std::complex<double>>(double z)>;

struct Quadrature {
    int panels = 64;
    int points_per_panel = 16;
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton on the Legendre polynomial.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double xi = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = xi;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
            const double dx = p1 / dp;
            xi -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = xi;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        x[i] = -xi;
        x[n - 1 - i] = xi;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
}

template <typename F>
auto integrate_panels(F&& f, double a, double b, const Quadrature& quad) {
    std::vector<double> xg, wg;
    gauss_legendre(quad.points_per_panel, xg, wg);
    using value_type = decltype(f(a));
    value_type total{};
    for (int p = 0; p < quad.panels; ++p) {
        const double pa = a + (b - a) * p / double(quad.panels);
        const double pb = a + (b - a) * (p + 1) / double(quad.panels);
        const double half = 0.5 * (pb - pa), mid = 0.5 * (pa + pb);
        for (int q = 0; q < quad.points_per_panel; ++q)
            total += wg[q] * half * f(mid + half * xg[q]);
    }
    return total;
}

}  // namespace detail

// { f1 | f2 } = integral of (f2 d_t f1 - f1 d_t f2) over the cavity at time t.
inline double symplectic_form(const SolutionSlice& f1, const SolutionSlice& f2,
                              const MirrorTrajectory& traj, double t,
                              const Quadrature& quad = {}) {
    const double a = traj.left(t), b = traj.right(t);
    const double value = detail::integrate_panels(
        [&](double z) {
            const auto [v1, d1] = f1(z);
            const auto [v2, d2] = f2(z);
            return v2 * d1 - v1 * d2;
        },
        a, b, quad);
    if (!std::isfinite(value))
        throw numerical_error("symplectic_form: quadrature produced a non-finite value");
    return value;
}

inline std::complex<double> symplectic_form(const ComplexSolutionSlice& f1,
                                            const ComplexSolutionSlice& f2,
                                            const MirrorTrajectory& traj, double t,
                                            const Quadrature& quad = {}) {
    const double a = traj.left(t), b = traj.right(t);
    const std::complex<double> value = detail::integrate_panels(
        [&](double z) {
            const auto [v1, d1] = f1(z);
            const auto [v2, d2] = f2(z);
            return v2 * d1 - v1 * d2;
        },
        a, b, quad);
    if (!(std::isfinite(value.real()) && std::isfinite(value.imag())))
        throw numerical_error("symplectic_form: quadrature produced a non-finite value");
    return value;
}

struct MooreOptions {
    int mode_pad = 0;              // 0 = auto: max(8, n_modes/2)
    int quad_panels_per_mode = 4;  // panels scale with the padded mode count
    int quad_points = 16;
    double defect_warn_threshold = 1e-3;
    bool exact_rays = true;  // evaluate rays exactly instead of via the table
    int table_resolution = 2048;
};

struct MooreResult {
    Vector occupations;          // <n_k> for k = 1..n_modes
    ComplexMatrix alpha, beta;   // n_modes x (n_modes + pad) overlap blocks
    double completeness_defect;  // on the reported n_modes block
    int mode_pad;
    std::vector<std::string> warnings;
};

namespace detail {

// Bogoliubov overlaps of evolved stage-I modes with the static modes of the
// cavity frozen at time t_eval.
inline MooreResult moore_overlaps(const MirrorTrajectory& traj, int n_modes,
                                  double t_eval, const MooreOptions& opts) {
    const int pad = opts.mode_pad > 0 ? opts.mode_pad : std::max(8, n_modes / 2);
    const int M = n_modes + pad;
    const double l3 = traj.left(t_eval);
    const double Lf = traj.r0 - l3;

    Quadrature quad;
    quad.panels = std::max(64, opts.quad_panels_per_mode * M);
    quad.points_per_panel = opts.quad_points;
    std::vector<double> xg, wg;
    gauss_legendre(quad.points_per_panel, xg, wg);

    const int Q = quad.panels * quad.points_per_panel;
    std::vector<double> zs(Q), wq(Q);
    for (int p = 0; p < quad.panels; ++p) {
        const double pa = l3 + Lf * p / double(quad.panels);
        const double pb = l3 + Lf * (p + 1) / double(quad.panels);
        for (int q = 0; q < quad.points_per_panel; ++q) {
            zs[p * quad.points_per_panel + q] =
                0.5 * (pa + pb) + 0.5 * (pb - pa) * xg[q];
            wq[p * quad.points_per_panel + q] = 0.5 * (pb - pa) * wg[q];
        }
    }

    // R and R' along both null directions at every quadrature node
    Eigen::VectorXd Rr(Q), Rrp(Q), Gg(Q), Ggp(Q);
    MooreFunction table;
    if (!opts.exact_rays) table = build_moore_function(traj, opts.table_resolution,
                                                       std::max(0.0, t_eval - traj.protocol.t2));
    for (int q = 0; q < Q; ++q) {
        if (opts.exact_rays) {
            const auto a = trace_ray(traj, t_eval - zs[q]);
            const auto b = trace_ray(traj, t_eval + zs[q] - 2.0 * traj.r0);
            Rr[q] = a.R;
            Rrp[q] = a.Rprime;
            Gg[q] = b.R + 2.0;
            Ggp[q] = b.Rprime;
        } else {
            const auto a = table.eval(t_eval - zs[q]);
            const auto b = table.eval(t_eval + zs[q] - 2.0 * traj.r0);
            Rr[q] = a.first;
            Rrp[q] = a.second;
            Gg[q] = b.first + 2.0;
            Ggp[q] = b.second;
        }
    }

    const std::complex<double> I(0.0, 1.0);
    ComplexMatrix A(M, Q), dA(M, Q);
    for (int l = 1; l <= M; ++l) {
        const double pl = std::numbers::pi * l;
        const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * l);
        for (int q = 0; q < Q; ++q) {
            const std::complex<double> ph_g = std::exp(-I * pl * Gg[q]);
            const std::complex<double> ph_r = std::exp(-I * pl * Rr[q]);
            A(l - 1, q) = (ph_g - ph_r) * norm;
            dA(l - 1, q) = -I * pl * (Ggp[q] * ph_g - Rrp[q] * ph_r) * norm;
        }
    }
    ComplexMatrix B(M, Q), dB(M, Q);
    for (int k = 1; k <= M; ++k) {
        const double wk = std::numbers::pi * k / Lf;
        const double norm = std::sqrt(2.0 / Lf) / std::sqrt(wk);
        for (int q = 0; q < Q; ++q) {
            const double s = std::sin(k * std::numbers::pi * (zs[q] - l3) / Lf);
            B(k - 1, q) = norm * s;
            dB(k - 1, q) = -I * wk * norm * s;
        }
    }

    // alpha_kl = {B_k^* | A_l}/(2i), beta_kl = {B_k^* | A_l^*}/(2i)
    Eigen::VectorXd wvec = Eigen::Map<Eigen::VectorXd>(wq.data(), Q);
    ComplexMatrix Bw = B.conjugate() * wvec.asDiagonal();
    ComplexMatrix dBw = dB.conjugate() * wvec.asDiagonal();
    ComplexMatrix alpha =
        (dBw * A.transpose() - Bw * dA.transpose()) / (2.0 * I);
    ComplexMatrix beta =
        (dBw * A.conjugate().transpose() - Bw * dA.conjugate().transpose()) / (2.0 * I);

    MooreResult res;
    res.mode_pad = pad;
    res.alpha = alpha.topRows(n_modes);
    res.beta = beta.topRows(n_modes);
    const ComplexMatrix D = res.alpha * res.alpha.adjoint() -
                            res.beta * res.beta.adjoint() -
                            ComplexMatrix::Identity(n_modes, n_modes);
    res.completeness_defect = D.cwiseAbs().maxCoeff();
    res.occupations = res.beta.cwiseAbs2().rowwise().sum();
    if (res.completeness_defect > opts.defect_warn_threshold) {
        std::ostringstream os;
        os << "mode truncation incomplete: completeness defect "
           << res.completeness_defect << " exceeds " << opts.defect_warn_threshold
           << " at " << n_modes << "+" << pad << " modes";
        res.warnings.push_back(os.str());
    }
    return res;
}

}  // namespace detail

// Occupations of the final static cavity modes after the full protocol.
inline MooreResult moore_occupations(const MirrorTrajectory& traj, int n_modes,
                                     const MooreOptions& opts = {}) {
    if (n_modes < 1) throw invalid_argument_error("moore_occupations: n_modes >= 1");
    return detail::moore_overlaps(traj, n_modes, traj.protocol.t2, opts);
}

// Occupations with the drive frozen at each sample time (instantaneous
// final-cavity convention, matching the ion-chain time series).
inline std::vector<std::pair<double, Vector>> moore_occupation_timeseries(
    const MirrorTrajectory& traj, int n_modes, const std::vector<double>& sample_times,
    const MooreOptions& opts = {}) {
    std::vector<std::pair<double, Vector>> out;
    out.reserve(sample_times.size());
    for (double t : sample_times) {
        if (t < traj.protocol.t0)
            throw invalid_argument_error("moore_occupation_timeseries: sample before t0");
        if (t <= traj.protocol.t1) {
            out.emplace_back(t, Vector::Zero(n_modes));
            continue;
        }
        out.emplace_back(t, detail::moore_overlaps(traj, n_modes, t, opts).occupations);
    }
    return out;
}

}  // namespace casimir
