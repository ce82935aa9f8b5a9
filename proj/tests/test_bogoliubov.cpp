#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "casimir/bogoliubov.hpp"

using namespace casimir;

namespace {

ModeBasis single_mode_basis(double omega) {
    ModeBasis b;
    b.frequencies = Vector::Constant(1, omega);
    b.vectors = Matrix::Identity(1, 1);
    return b;
}

SymplecticPropagator identity_propagator(int n) {
    return SymplecticPropagator{Matrix::Identity(2 * n, 2 * n), 0.0, 0.0};
}

}  // namespace

TEST_CASE("identity propagator with equal bases is the trivial map") {
    Matrix K(2, 2);
    K << 2.0, -0.3, -0.3, 2.0;
    auto basis = normal_modes(K, 1.0);
    auto map = bogoliubov(identity_propagator(2), basis, basis);
    REQUIRE((map.alpha - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE(map.beta.cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE(occupations(map).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("sudden frequency quench reproduces the analytic overlap") {
    const double wa = 1.3, wb = 2.9;
    auto map = bogoliubov(identity_propagator(1), single_mode_basis(wa),
                          single_mode_basis(wb));
    const double expected = (wa - wb) * (wa - wb) / (4.0 * wa * wb);
    REQUIRE(std::norm(map.beta(0, 0)) == Catch::Approx(expected).epsilon(1e-12));
    REQUIRE(map.identity_defect() < 1e-12);

    // quench omega -> 4 omega gives <n> = 9/16
    auto quench = bogoliubov(identity_propagator(1), single_mode_basis(1.0),
                             single_mode_basis(4.0));
    REQUIRE(occupations(quench)[0] == Catch::Approx(9.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("static evolution gives pure phases") {
    const double w = 1.7, T = 2.45, m = 1.3;
    Matrix K(1, 1);
    K << m * w * w;
    QuadraticSystem sys{1, m, [K](double) { return K; }};
    auto S = propagate(sys, 0.0, T);
    auto basis = normal_modes(K, m);
    auto map = bogoliubov(S, basis, basis, m);
    const std::complex<double> expected = std::exp(std::complex<double>(0.0, -w * T));
    REQUIRE(std::abs(map.alpha(0, 0) - expected) < 1e-9);
    REQUIRE(map.beta.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("bogoliubov identities hold for a driven chain") {
    const int n = 5;
    Matrix K0 = Matrix::Identity(n, n) * 1.4;
    for (int i = 0; i + 1 < n; ++i) K0(i, i + 1) = K0(i + 1, i) = -0.5;
    const double wD = 1.3;
    QuadraticSystem sys{n, 1.0, [=](double t) {
                            Matrix K = K0;
                            const double s = std::sin(0.5 * wD * t);
                            K(2, 2) += 0.8 * s * s;
                            return K;
                        }};
    auto basis = normal_modes(K0, 1.0);
    auto S = propagate(sys, 0.0, 37.0);
    auto map = bogoliubov(S, basis, normal_modes(sys, 37.0), 1.0);
    REQUIRE(map.identity_defect() < 1e-8);
    REQUIRE(map.symmetry_defect() < 1e-8);
    REQUIRE(occupations(map).minCoeff() >= 0.0);
}

TEST_CASE("a propagator with a broken symplectic form is refused") {
    auto S = identity_propagator(1);
    S.matrix(0, 0) = 1.5;  // not symplectic
    REQUIRE_THROWS_AS(
        bogoliubov(S, single_mode_basis(1.0), single_mode_basis(1.0)),
        numerical_error);
}

TEST_CASE("static stages produce nothing and conserve mode energy") {
    const int n = 3;
    Matrix K0 = Matrix::Identity(n, n) * 2.0;
    for (int i = 0; i + 1 < n; ++i) K0(i, i + 1) = K0(i + 1, i) = -0.7;
    StageProtocol protocol(0.0, 10.0, 20.0);
    const double wD = 1.1;
    QuadraticSystem sys{n, 1.0, [=](double t) {
                            Matrix K = K0;
                            if (t > protocol.t1 && t < protocol.t2) {
                                const double s = std::sin(0.5 * wD * (t - protocol.t1));
                                K(1, 1) += 0.6 * s * s;
                            }
                            return K;
                        }};

    SECTION("samples inside stage I are exactly unexcited") {
        auto ts = occupation_timeseries(sys, protocol, {1.0, 5.0, 9.5});
        for (const auto& [t, occ] : ts) REQUIRE(occ.cwiseAbs().maxCoeff() < 1e-10);
    }

    SECTION("occupations are frozen in stage III") {
        // drive ends at t2 with sin^2(0.55*10) != 0, so stage III K differs
        // from stage I; production happened but must stay constant afterwards
        QuadraticSystem frozen{n, 1.0, [=](double t) {
                                   Matrix K = K0;
                                   double tau = std::min(t, protocol.t2);
                                   if (tau > protocol.t1) {
                                       const double s =
                                           std::sin(0.5 * wD * (tau - protocol.t1));
                                       K(1, 1) += 0.6 * s * s;
                                   }
                                   return K;
                               }};
        auto ts = occupation_timeseries(frozen, protocol, {21.0, 25.0, 33.0});
        for (int l = 0; l < n; ++l) {
            const double ref = ts[0].second[l];
            for (const auto& [t, occ] : ts)
                REQUIRE(occ[l] == Catch::Approx(ref).margin(1e-8 * (1.0 + ref)));
        }
    }
}

TEST_CASE("running the drive forward then exactly backward undoes production") {
    const int n = 3;
    Matrix K0 = Matrix::Identity(n, n) * 1.8;
    for (int i = 0; i + 1 < n; ++i) K0(i, i + 1) = K0(i + 1, i) = -0.55;
    const double T = 23.0, wD = 1.7;
    auto drive = [=](double t) {
        Matrix K = K0;
        const double s = std::sin(0.5 * wD * t);
        K(0, 0) += 0.7 * s * s;
        return K;
    };
    QuadraticSystem fwd{n, 1.0, drive};
    QuadraticSystem bwd{n, 1.0, [=](double t) { return drive(T - t); }};

    StepControl tight;
    tight.rel_tol = 1e-12;
    auto Sf = propagate(fwd, 0.0, T, tight);
    auto Sb = propagate(bwd, 0.0, T, tight);

    // momentum-flip conjugation R Sb R composed with Sf retraces to identity
    Matrix R = Matrix::Identity(2 * n, 2 * n);
    R.bottomRightCorner(n, n) *= -1.0;
    SymplecticPropagator total{R * Sb.matrix * R * Sf.matrix, 0.0, 2 * T};

    auto basis = normal_modes(K0, 1.0);
    auto map = bogoliubov(total, basis, basis);
    REQUIRE(occupations(map).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("resonant single-mode drive follows the squeezing growth law") {
    // frequency modulation w(t) = pi/L(t) with L = L0 - delta sin^2(wD t/2),
    // driven at twice the period-averaged frequency; <n> tracks
    // sinh^2( <w>_T delta t / (4 L0) ) at early times
    const double L0 = 15.22, delta = 0.72;
    const double wavg = std::numbers::pi / std::sqrt(L0 * (L0 - delta));
    const double wD = 2.0 * wavg;
    QuadraticSystem sys{1, 1.0, [=](double t) {
                            const double s = t > 0.0 ? std::sin(0.5 * wD * t) : 0.0;
                            const double w = std::numbers::pi / (L0 - delta * s * s);
                            Matrix K(1, 1);
                            K << w * w;
                            return K;
                        }};
    const double T = 2 * std::numbers::pi / wD;
    StageProtocol protocol(-1.0, 0.0, 100 * T);
    std::vector<double> marks;
    for (int k = 1; k <= 5; ++k) marks.push_back(k * T);
    auto ts = occupation_timeseries(sys, protocol, marks);
    for (int k = 1; k <= 5; ++k) {
        const double arg = wavg * delta / (4.0 * L0) * marks[k - 1];
        const double law = std::sinh(arg) * std::sinh(arg);
        REQUIRE(ts[k - 1].second[0] ==
                Catch::Approx(law).epsilon(0.10));  // within 10%
    }
    // monotone growth of the envelope at period marks
    for (int k = 1; k < 5; ++k)
        REQUIRE(ts[k].second[0] > ts[k - 1].second[0]);
}
