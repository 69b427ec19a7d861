#include "rayfem/special_functions.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace rayfem {

namespace {

// GSL aborts on error by default; evaluate with the handler disabled and
// report failures through exceptions instead.
struct HandlerGuard {
    gsl_error_handler_t* old;
    HandlerGuard() : old(gsl_set_error_handler_off()) {}
    ~HandlerGuard() { gsl_set_error_handler(old); }
};

double checked(const gsl_sf_result& r, int status, const char* what, double x) {
    if (status != GSL_SUCCESS && status != GSL_EUNDRFLW) {
        throw std::domain_error(std::string(what) + " failed at x=" + std::to_string(x) +
                                ": " + gsl_strerror(status));
    }
    return r.val;
}

}  // namespace

double bessel_j(int order, double x) {
    if (order < 0) throw std::domain_error("bessel_j: negative order");
    if (x < 0.0) throw std::domain_error("bessel_j: negative argument");
    HandlerGuard guard;
    gsl_sf_result r;
    int status;
    if (order == 0) {
        status = gsl_sf_bessel_J0_e(x, &r);
    } else if (order == 1) {
        status = gsl_sf_bessel_J1_e(x, &r);
    } else {
        status = gsl_sf_bessel_Jn_e(order, x, &r);
    }
    return checked(r, status, "bessel_j", x);
}

double bessel_j_prime(int order, double x) {
    if (order < 0) throw std::domain_error("bessel_j_prime: negative order");
    if (order == 0) return -bessel_j(1, x);
    return 0.5 * (bessel_j(order - 1, x) - bessel_j(order + 1, x));
}

void bessel_j_array(int nmax, double x, double* j, double* jp) {
    if (nmax < 0) throw std::domain_error("bessel_j_array: negative order");
    if (x < 0.0) throw std::domain_error("bessel_j_array: negative argument");
    // One extra order so the derivative recurrence covers n = nmax.
    const int top = nmax + 1;
    HandlerGuard guard;
    std::vector<double> buf(static_cast<size_t>(top) + 1);
    int status = gsl_sf_bessel_Jn_array(0, top, x, buf.data());
    if (status != GSL_SUCCESS && status != GSL_EUNDRFLW) {
        throw std::domain_error(std::string("bessel_j_array failed: ") + gsl_strerror(status));
    }
    for (int n = 0; n <= nmax; ++n) {
        j[n] = buf[static_cast<size_t>(n)];
        jp[n] = (n == 0) ? -buf[1]
                         : 0.5 * (buf[static_cast<size_t>(n) - 1] - buf[static_cast<size_t>(n) + 1]);
    }
}

double bessel_y0(double x) {
    if (x <= 0.0) throw std::domain_error("bessel_y0: argument must be positive");
    HandlerGuard guard;
    gsl_sf_result r;
    return checked(r, gsl_sf_bessel_Y0_e(x, &r), "bessel_y0", x);
}

double bessel_y1(double x) {
    if (x <= 0.0) throw std::domain_error("bessel_y1: argument must be positive");
    HandlerGuard guard;
    gsl_sf_result r;
    return checked(r, gsl_sf_bessel_Y1_e(x, &r), "bessel_y1", x);
}

cplx hankel1_0(double x) {
    if (x <= 0.0) throw std::domain_error("hankel1_0: argument must be positive");
    return {bessel_j(0, x), bessel_y0(x)};
}

cplx hankel1_1(double x) {
    if (x <= 0.0) throw std::domain_error("hankel1_1: argument must be positive");
    return {bessel_j(1, x), bessel_y1(x)};
}

}  // namespace rayfem
