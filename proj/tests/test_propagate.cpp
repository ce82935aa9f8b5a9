#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "casimir/propagate.hpp"

using namespace casimir;

namespace {

QuadraticSystem static_system(const Matrix& K, double m) {
    return QuadraticSystem{static_cast<int>(K.rows()), m, [K](double) { return K; }};
}

// analytic propagator for a static diagonal stiffness
Matrix rotation_propagator(const Vector& omega, double m, double T) {
    const int n = static_cast<int>(omega.size());
    Matrix S = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        const double w = omega[i], c = std::cos(w * T), s = std::sin(w * T);
        S(i, i) = c;
        S(i, n + i) = s / (m * w);
        S(n + i, i) = -m * w * s;
        S(n + i, n + i) = c;
    }
    return S;
}

}  // namespace

TEST_CASE("zero duration gives the identity") {
    Matrix K(1, 1);
    K << 4.0;
    auto S = propagate(static_system(K, 1.0), 0.3, 0.3);
    REQUIRE((S.matrix - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("static evolution matches the analytic mode rotation") {
    const double m = 1.7, T = 3.21;
    Vector omega(2);
    omega << 0.8, 2.3;
    Matrix K = (m * omega.array().square()).matrix().asDiagonal();
    auto sys = static_system(K, m);

    for (auto method : {StepControl::Method::adaptive_magnus,
                        StepControl::Method::fixed_magnus,
                        StepControl::Method::fixed_leapfrog}) {
        StepControl ctl;
        ctl.method = method;
        ctl.fixed_steps = 4000;
        auto S = propagate(sys, 0.0, T, ctl);
        const Matrix exact = rotation_propagator(omega, m, T);
        const double tol =
            method == StepControl::Method::fixed_leapfrog ? 2e-5 : 1e-9;
        REQUIRE((S.matrix - exact).cwiseAbs().maxCoeff() < tol);
    }
}

TEST_CASE("driven single mode converges against a 10x finer reference") {
    // omega^2(t) = w0^2 + alpha * sin^2(wD t / 2), the tweezer drive shape
    const double w0 = 1.0, alpha = 0.3, wD = 2.05;
    QuadraticSystem sys{1, 1.0, [=](double t) {
                            Matrix K(1, 1);
                            const double s = std::sin(0.5 * wD * t);
                            K << w0 * w0 + alpha * s * s;
                            return K;
                        }};
    const double T = 6 * 2 * std::numbers::pi / wD;

    StepControl coarse;
    coarse.method = StepControl::Method::fixed_magnus;
    coarse.fixed_steps = 3000;
    StepControl fine = coarse;
    fine.fixed_steps = 30000;
    auto Sc = propagate(sys, 0.0, T, coarse);
    auto Sf = propagate(sys, 0.0, T, fine);
    REQUIRE((Sc.matrix - Sf.matrix).cwiseAbs().maxCoeff() < 1e-8);

    StepControl adaptive;
    adaptive.rel_tol = 1e-12;
    auto Sa = propagate(sys, 0.0, T, adaptive);
    REQUIRE((Sa.matrix - Sf.matrix).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("symplectic defect stays tiny over long driven evolutions") {
    const int n = 4;
    Matrix K0 = Matrix::Identity(n, n) * 1.1;
    for (int i = 0; i + 1 < n; ++i) {
        K0(i, i + 1) = -0.4;
        K0(i + 1, i) = -0.4;
    }
    const double wD = 1.9;
    QuadraticSystem sys{n, 1.0, [=](double t) {
                            Matrix K = K0;
                            const double s = std::sin(0.5 * wD * t);
                            K(1, 1) += 0.5 * s * s;
                            return K;
                        }};
    const double T = 20 * 2 * std::numbers::pi / wD;
    auto S = propagate(sys, 0.0, T);
    REQUIRE(S.symplectic_defect() < 1e-10);
}

TEST_CASE("step underflow raises with the failure time") {
    Matrix K(1, 1);
    K << 1.0;
    StepControl ctl;
    ctl.min_step = 1.0;       // absurdly large floor
    ctl.rel_tol = 1e-16;      // unreachable accuracy in one step
    ctl.initial_step = 0.5;
    REQUIRE_THROWS_AS(propagate(static_system(K, 1.0), 0.0, 1.0, ctl), numerical_error);
}

TEST_CASE("propagate_through accumulates consistently") {
    Matrix K(1, 1);
    K << 2.3;
    auto sys = static_system(K, 1.0);
    auto props = propagate_through(sys, 0.0, {0.5, 1.0, 2.0});
    auto direct = propagate(sys, 0.0, 2.0);
    REQUIRE((props[2].matrix - direct.matrix).cwiseAbs().maxCoeff() < 1e-11);
}
