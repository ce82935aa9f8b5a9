#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "casimir/bogoliubov.hpp"
#include "support/fock_oracle.hpp"

using namespace casimir;

TEST_CASE("single driven mode agrees with truncated Fock integration") {
    const double w0 = 1.0, alpha = 0.2;
    const double wD = 2.0 * std::sqrt(w0 * w0 + 0.5 * alpha);  // resonant-ish
    QuadraticSystem sys{1, 1.0, [=](double t) {
                            Matrix K(1, 1);
                            const double s = t > 0 ? std::sin(0.5 * wD * t) : 0.0;
                            K << w0 * w0 + alpha * s * s;
                            return K;
                        }};
    const double T = 2.0 * std::numbers::pi / wD;
    StageProtocol protocol(-1.0, 0.0, 100.0);

    testing::FockOracle oracle(sys, protocol.t0, 30);
    std::vector<double> samples = {1.3 * T, 2.6 * T, 4.0 * T};
    auto ts = occupation_timeseries(sys, protocol, samples);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        oracle.advance_to(samples[i], 2e-4);
        const double ref = oracle.occupations()[0];
        REQUIRE(std::abs(ts[i].second[0] - ref) < 1e-3);
    }
}

TEST_CASE("two coupled driven modes agree with truncated Fock integration") {
    // small chain-let with the tweezer-like drive on site 0
    Matrix K0(2, 2);
    K0 << 1.1, -0.35, -0.35, 1.3;
    auto b0 = normal_modes(K0, 1.0);
    const double wD = 2.0 * b0.frequencies[0];
    const double alpha = 0.25;
    QuadraticSystem sys{2, 1.0, [=](double t) {
                            Matrix K = K0;
                            const double s = t > 0 ? std::sin(0.5 * wD * t) : 0.0;
                            K(0, 0) += alpha * s * s;
                            return K;
                        }};
    const double T = 2.0 * std::numbers::pi / wD;
    StageProtocol protocol(-1.0, 0.0, 1000.0);

    testing::FockOracle oracle(sys, protocol.t0, 40);
    // period marks and mid-period samples (the latter exercise the
    // instantaneous-basis convention on both sides)
    std::vector<double> samples = {1.0 * T, 2.5 * T, 4.0 * T, 5.25 * T};
    auto ts = occupation_timeseries(sys, protocol, samples);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        oracle.advance_to(samples[i], 2e-4);
        const auto ref = oracle.occupations();
        REQUIRE(std::abs(ts[i].second[0] - ref[0]) < 1e-3);
        REQUIRE(std::abs(ts[i].second[1] - ref[1]) < 1e-3);
    }
}
