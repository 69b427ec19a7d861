#include "rayfem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace rayfem {

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(static_cast<size_t>(n));
    w.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Newton iteration from the Chebyshev estimate of the i-th root.
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * t * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (t * p0 - p1) / (t * t - 1.0);
            const double dt = p0 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[static_cast<size_t>(i)] = 0.5 * (1.0 - t);
        w[static_cast<size_t>(i)] = 1.0 / ((1.0 - t * t) * pp * pp);
    }
}

const QuadRule& reference_quadrature(int order) {
    // Orders 1..12 are the supported range; a few more are kept so the
    // order-stability validation can evaluate default+4.
    if (order < 1 || order > 16) {
        throw std::invalid_argument("reference_quadrature: order must be in 1..16");
    }
    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    // Duffy map: (u, v) in [0,1]^2 -> (u, v(1-u)), Jacobian (1-u).
    const int nu = (order + 3) / 2;  // ceil((order+2)/2)
    const int nv = (order + 2) / 2;  // ceil((order+1)/2)
    std::vector<double> xu, wu, xv, wv;
    gauss_legendre_01(nu, xu, wu);
    gauss_legendre_01(nv, xv, wv);
    QuadRule rule;
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            const double u = xu[static_cast<size_t>(i)];
            const double v = xv[static_cast<size_t>(j)];
            rule.points.push_back({u, v * (1.0 - u)});
            rule.weights.push_back(wu[static_cast<size_t>(i)] * wv[static_cast<size_t>(j)] *
                                   (1.0 - u));
        }
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

const EdgeQuadRule& edge_quadrature(int order) {
    if (order < 1 || order > 24) {
        throw std::invalid_argument("edge_quadrature: order must be in 1..24");
    }
    static std::map<int, EdgeQuadRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    EdgeQuadRule rule;
    gauss_legendre_01((order + 2) / 2, rule.points, rule.weights);
    return cache.emplace(order, std::move(rule)).first->second;
}

}  // namespace rayfem
