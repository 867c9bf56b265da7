#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "bdhvar/primes.hpp"
#include "bdhvar/zeta.hpp"

using namespace bdhvar;

TEST_CASE("zeta certification values") {
    const double pi = std::numbers::pi_v<double>;
    REQUIRE(std::abs(riemann_zeta(2.0) - pi * pi / 6.0) <= 1e-12);
    REQUIRE(std::abs(riemann_zeta(6.0) - std::pow(pi, 6) / 945.0) <= 1e-12);
    REQUIRE(std::abs(riemann_zeta(3.0) - 1.2020569031595943) <= 1e-13);  // Apery's constant
    REQUIRE(std::abs(riemann_zeta(1.5) - 2.6123753486854883) <= 1e-12);
    REQUIRE(riemann_zeta(100.0) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("zeta against direct summation with integral tail") {
    // oracle: plain partial sum + Euler-Maclaurin-free tail bracketing
    for (double s : {1.25, 2.5, 3.5, 7.0}) {
        const u64 N = 2000000;
        double sum = 0.0;
        for (u64 n = N; n >= 1; --n) sum += std::pow(static_cast<double>(n), -s);
        double tail_lo = std::pow(static_cast<double>(N + 1), 1.0 - s) / (s - 1.0);
        double tail_hi = std::pow(static_cast<double>(N), 1.0 - s) / (s - 1.0);
        double z = riemann_zeta(s);
        REQUIRE(z >= sum + tail_lo - 1e-9);
        REQUIRE(z <= sum + tail_hi + 1e-9);
    }
}

TEST_CASE("zeta derivative") {
    REQUIRE(std::abs(riemann_zeta_deriv(2.0) - (-0.93754825431584376)) <= 1e-10);
    // central-difference cross-check at a few points
    for (double s : {1.5, 2.0, 3.0, 5.5}) {
        double h = 1e-6;
        double fd = (riemann_zeta(s + h) - riemann_zeta(s - h)) / (2.0 * h);
        REQUIRE(riemann_zeta_deriv(s) == Catch::Approx(fd).margin(1e-8));
    }
}

TEST_CASE("prime zeta") {
    REQUIRE(std::abs(prime_zeta(2.0) - 0.45224742004106549) <= 1e-12);
    REQUIRE(std::abs(prime_zeta(3.0) - 0.17476263929944354) <= 1e-12);
    // oracle: direct sum over sieved primes, tail below 1e-7 at s=2.5
    double direct = 0.0;
    for_each_prime(10000000, [&](u64 p) { direct += std::pow(static_cast<double>(p), -2.5); });
    REQUIRE(prime_zeta(2.5) == Catch::Approx(direct).margin(1e-9));
    REQUIRE(prime_zeta(80.0) == Catch::Approx(std::pow(2.0, -80.0)).epsilon(1e-10));
}
