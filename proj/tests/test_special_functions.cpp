#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rayfem/special_functions.hpp"

#include <cmath>
#include <vector>

using namespace rayfem;

namespace {

// Independent oracle: power series J_n(x) = sum_m (-1)^m (x/2)^{n+2m} / (m! (n+m)!),
// summed in extended precision (the terms grow to ~(x/2)^{2m}/(m!)^2 before
// cancelling, so double alone cannot reach 1e-10 at x = 20).
double series_j(int n, double x) {
    const long double half = 0.5L * static_cast<long double>(x);
    long double term = 1.0L;
    for (int k = 1; k <= n; ++k) term *= half / k;
    long double sum = term;
    const long double x2 = -half * half;
    for (int m = 1; m < 300; ++m) {
        term *= x2 / (static_cast<long double>(m) * (n + m));
        sum += term;
        if (std::abs(static_cast<double>(term)) < 1e-22 * (std::abs(static_cast<double>(sum)) + 1e-30)) break;
    }
    return static_cast<double>(sum);
}

// Independent oracle: Miller-style backward recurrence with the normalization
// J_0 + 2 J_2 + 2 J_4 + ... = 1.
std::vector<double> miller_j(int nmax, double x) {
    if (x == 0.0) {
        std::vector<double> out(static_cast<size_t>(nmax) + 1, 0.0);
        out[0] = 1.0;
        return out;
    }
    const int start = nmax + 20 + static_cast<int>(x);
    std::vector<double> j(static_cast<size_t>(start) + 2, 0.0);
    j[static_cast<size_t>(start) + 1] = 0.0;
    j[static_cast<size_t>(start)] = 1e-30;
    for (int n = start; n >= 1; --n) {
        j[static_cast<size_t>(n) - 1] = (2.0 * n / x) * j[static_cast<size_t>(n)] -
                                        j[static_cast<size_t>(n) + 1];
    }
    double norm = j[0];
    for (int n = 2; n <= start; n += 2) norm += 2.0 * j[static_cast<size_t>(n)];
    std::vector<double> out(static_cast<size_t>(nmax) + 1);
    for (int n = 0; n <= nmax; ++n) out[static_cast<size_t>(n)] = j[static_cast<size_t>(n)] / norm;
    return out;
}

}  // namespace

TEST_CASE("bessel_j basic values") {
    CHECK(bessel_j(0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bessel_j(1, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
    // First zero of J_0, located by the power-series oracle.
    CHECK(std::abs(bessel_j(0, 2.4048255577)) < 1e-9);
    CHECK(std::abs(series_j(0, 2.4048255577)) < 1e-9);
    CHECK_THROWS_AS(bessel_j(-1, 1.0), std::domain_error);
}

TEST_CASE("bessel_j matches the power-series oracle") {
    for (int n : {0, 1, 2, 5, 10, 20, 50}) {
        for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
            CHECK(bessel_j(n, x) == doctest::Approx(series_j(n, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("bessel_j_prime identities and finite differences") {
    for (double x : {0.3, 1.7, 5.0, 12.0}) {
        CHECK(bessel_j_prime(0, x) == doctest::Approx(-bessel_j(1, x)).epsilon(1e-14));
    }
    CHECK(bessel_j_prime(1, 0.0) == doctest::Approx(0.5).epsilon(1e-14));

    // Central finite difference oracle, step 1e-5.
    const double h = 1e-5;
    const double fd = (bessel_j(3, 5.0 + h) - bessel_j(3, 5.0 - h)) / (2.0 * h);
    CHECK(bessel_j_prime(3, 5.0) == doctest::Approx(fd).epsilon(1e-7));
    CHECK(bessel_j_prime(3, 5.0) == doctest::Approx(-0.17233362209044798).epsilon(1e-12));
}

TEST_CASE("bessel_j_array consistency") {
    double j[61], jp[61];
    bessel_j_array(60, 13.7, j, jp);
    for (int n = 0; n <= 60; ++n) {
        CHECK(j[n] == doctest::Approx(bessel_j(n, 13.7)).epsilon(1e-13));
        CHECK(jp[n] == doctest::Approx(bessel_j_prime(n, 13.7)).epsilon(1e-13));
    }
}

TEST_CASE("Wronskian J_1 Y_0 - J_0 Y_1 = 2/(pi x)") {
    for (double x = 0.1; x <= 100.0; x *= 1.7) {
        const double w = bessel_j(1, x) * bessel_y0(x) - bessel_j(0, x) * bessel_y1(x);
        CHECK(w == doctest::Approx(2.0 / (kPi * x)).epsilon(1e-8));
    }
}

TEST_CASE("backward recurrence agrees with the series") {
    for (double x : {0.5, 2.0, 7.3, 15.0, 20.0}) {
        const auto mj = miller_j(50, x);
        for (int n = 0; n <= 50; ++n) {
            const double ref = series_j(n, x);
            CHECK(std::abs(mj[static_cast<size_t>(n)] - ref) < 1e-10);
            CHECK(std::abs(bessel_j(n, x) - ref) < 1e-10);
        }
    }
}

TEST_CASE("hankel1_0 values") {
    // Leading asymptotic magnitude at large argument.
    const double mag = std::abs(hankel1_0(1000.0));
    CHECK(mag == doctest::Approx(std::sqrt(2.0 / (kPi * 1000.0))).epsilon(0.01));

    // Real part is J_0 by definition.
    for (double x : {0.25, 1.0, 7.0, 100.0}) {
        CHECK(hankel1_0(x).real() == doctest::Approx(bessel_j(0, x)).epsilon(1e-14));
    }

    // Independent arbitrary-precision evaluation of H_0^{(1)}(0.5).
    const cplx h = hankel1_0(0.5);
    CHECK(std::abs(h - cplx(0.9384698072408129, -0.4445187335067066)) < 1e-10);

    CHECK_THROWS_AS(hankel1_0(0.0), std::domain_error);
    CHECK_THROWS_AS(hankel1_0(-1.0), std::domain_error);
}

TEST_CASE("hankel1_0 large-argument relative accuracy") {
    // |H_0| ~ sqrt(2/(pi x)); check smooth magnitude behaviour out to 1e6.
    for (double x : {1e-3, 1.0, 1e2, 1e4, 1e6}) {
        const cplx h = hankel1_0(x);
        CHECK(std::isfinite(h.real()));
        CHECK(std::isfinite(h.imag()));
        if (x >= 10.0) {
            CHECK(std::abs(h) == doctest::Approx(std::sqrt(2.0 / (kPi * x))).epsilon(0.01));
        }
    }
}

TEST_CASE("hankel1_1 consistency with the H_0 derivative") {
    const double h = 1e-6;
    for (double x : {0.7, 3.0, 25.0}) {
        const cplx fd = (hankel1_0(x + h) - hankel1_0(x - h)) / (2.0 * h);
        CHECK(std::abs(hankel1_1(x) + fd) < 1e-6 * std::abs(fd));
    }
}
