#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rayfem/quadrature.hpp"

#include <cmath>

using namespace rayfem;

namespace {

// Exact monomial integral over the reference triangle:
// int x^a y^b dA = a! b! / (a + b + 2)!.
double monomial_exact(int a, int b) {
    auto fact = [](int n) {
        double f = 1.0;
        for (int k = 2; k <= n; ++k) f *= k;
        return f;
    };
    return fact(a) * fact(b) / fact(a + b + 2);
}

double integrate(const QuadRule& rule, int a, int b) {
    double s = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
        s += rule.weights[q] * std::pow(rule.points[q].x, a) * std::pow(rule.points[q].z, b);
    }
    return s;
}

}  // namespace

TEST_CASE("weights are positive and sum to the reference area") {
    for (int order = 1; order <= 12; ++order) {
        const QuadRule& rule = reference_quadrature(order);
        double sum = 0.0;
        for (double w : rule.weights) {
            CHECK(w > 0.0);
            sum += w;
        }
        CHECK(sum == doctest::Approx(0.5).epsilon(1e-14));
    }
}

TEST_CASE("named examples") {
    CHECK(integrate(reference_quadrature(1), 1, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    // int x^2 y^3 = 2! 3! / 7! = 1/420, exact from order 5 on.
    for (int order = 5; order <= 12; ++order) {
        CHECK(std::abs(integrate(reference_quadrature(order), 2, 3) - monomial_exact(2, 3)) < 1e-14);
    }
}

TEST_CASE("rule of each order integrates all monomials up to that degree") {
    for (int order = 1; order <= 12; ++order) {
        const QuadRule& rule = reference_quadrature(order);
        for (int deg = 0; deg <= order; ++deg) {
            for (int a = 0; a <= deg; ++a) {
                const int b = deg - a;
                CHECK(std::abs(integrate(rule, a, b) - monomial_exact(a, b)) < 1e-14);
            }
        }
    }
}

TEST_CASE("unsupported orders are rejected") {
    CHECK_THROWS_AS(reference_quadrature(0), std::invalid_argument);
    CHECK_THROWS_AS(reference_quadrature(17), std::invalid_argument);
}

TEST_CASE("edge rule integrates polynomials on [0,1]") {
    for (int order = 1; order <= 12; ++order) {
        const EdgeQuadRule& rule = edge_quadrature(order);
        for (int deg = 0; deg <= order; ++deg) {
            double s = 0.0;
            for (size_t q = 0; q < rule.points.size(); ++q) {
                s += rule.weights[q] * std::pow(rule.points[q], deg);
            }
            CHECK(s == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-13));
        }
    }
}
