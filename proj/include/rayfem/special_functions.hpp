#pragma once

#include "rayfem/types.hpp"

namespace rayfem {

// Bessel function of the first kind J_n(x), n >= 0, x >= 0.
// Throws std::domain_error for negative order or negative argument.
double bessel_j(int order, double x);

// Derivative J_n'(x) via the recurrence (J_{n-1} - J_{n+1})/2, with
// J_0' = -J_1.
double bessel_j_prime(int order, double x);

// J_n(x) and J_n'(x) for all n = 0..nmax in one pass.
void bessel_j_array(int nmax, double x, double* j, double* jp);

// Bessel function of the second kind, orders 0 and 1 (x > 0).
double bessel_y0(double x);
double bessel_y1(double x);

// Outgoing Hankel functions H_n^{(1)}(x) = J_n(x) + i Y_n(x), x > 0.
cplx hankel1_0(double x);
cplx hankel1_1(double x);

}  // namespace rayfem
