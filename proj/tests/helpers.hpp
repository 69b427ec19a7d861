#pragma once

#include "rayfem/basis.hpp"
#include "rayfem/pipeline.hpp"
#include "rayfem/wavefield.hpp"

#include <functional>
#include <random>

namespace rayfem::testing {

inline WaveSpeedFn unitSpeed() {
    return [](double, double) { return 1.0; };
}

// P1 interpolant of an analytic function on a mesh.
inline WaveField interpolate(const Mesh& mesh, const std::function<cplx(double, double)>& f) {
    Eigen::VectorXcd v(mesh.nodeCount());
    for (int j = 0; j < mesh.nodeCount(); ++j) {
        const Vec2 p = mesh.nodePos(j);
        v[j] = f(p.x, p.z);
    }
    return WaveField(BasisDescriptor::p1(mesh), std::move(v));
}

inline std::function<cplx(double, double)> planeWave(double omega, Vec2 d) {
    return [omega, d](double x, double z) {
        const double phase = omega * (d.x * x + d.z * z);
        return cplx(std::cos(phase), std::sin(phase));
    };
}

inline std::function<GradC(double, double)> planeWaveGrad(double omega, Vec2 d) {
    return [omega, d](double x, double z) {
        const double phase = omega * (d.x * x + d.z * z);
        const cplx u(std::cos(phase), std::sin(phase));
        GradC g;
        g.dx = cplx(0.0, omega * d.x) * u;
        g.dz = cplx(0.0, omega * d.z) * u;
        return g;
    };
}

// Log-log slope of err(t) by least squares.
inline double loglogSlope(const std::vector<double>& t, const std::vector<double>& err) {
    const size_t n = t.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        const double lx = std::log(t[i]), ly = std::log(err[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace rayfem::testing
