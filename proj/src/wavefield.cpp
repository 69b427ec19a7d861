#include "rayfem/wavefield.hpp"

#include <ostream>
#include <stdexcept>

namespace rayfem {

WaveField::WaveField(BasisDescriptor basis, Eigen::VectorXcd dofs)
    : basis_(std::move(basis)), dofs_(std::move(dofs)) {
    if (dofs_.size() != basis_.dofCount()) {
        throw std::invalid_argument("WaveField: dof vector does not match basis");
    }
}

cplx WaveField::eval(double x, double z) const {
    std::array<double, 3> w;
    const int t = mesh().locate(x, z, w);
    const auto tri = mesh().triangle(t);
    cplx out(0.0, 0.0);
    for (int v = 0; v < 3; ++v) {
        const int node = tri[static_cast<size_t>(v)];
        const int start = basis_.nodeDofStart(node);
        if (basis_.kind() == BasisKind::P1) {
            out += w[static_cast<size_t>(v)] * dofs_[start];
            continue;
        }
        const double kv = basis_.nodeWavenumber(node);
        cplx s(0.0, 0.0);
        for (int l = 0; l < basis_.nodeDofCount(node); ++l) {
            const Vec2 d = basis_.rays().dir(node, l);
            const double phase = kv * (d.x * x + d.z * z);
            s += dofs_[start + l] * cplx(std::cos(phase), std::sin(phase));
        }
        out += w[static_cast<size_t>(v)] * s;
    }
    return out;
}

GradC WaveField::grad(double x, double z) const {
    std::array<double, 3> w;
    const int t = mesh().locate(x, z, w);
    const auto tri = mesh().triangle(t);
    const Vec2 p0 = mesh().nodePos(tri[0]);
    const Vec2 p1 = mesh().nodePos(tri[1]);
    const Vec2 p2 = mesh().nodePos(tri[2]);
    const double j11 = p1.x - p0.x, j12 = p2.x - p0.x;
    const double j21 = p1.z - p0.z, j22 = p2.z - p0.z;
    const double det = j11 * j22 - j12 * j21;
    const double inv11 = j22 / det, inv12 = -j21 / det;
    const double inv21 = -j12 / det, inv22 = j11 / det;
    const Vec2 grads[3] = {{-inv11 - inv12, -inv21 - inv22}, {inv11, inv21}, {inv12, inv22}};

    GradC out;
    for (int v = 0; v < 3; ++v) {
        const int node = tri[static_cast<size_t>(v)];
        const int start = basis_.nodeDofStart(node);
        if (basis_.kind() == BasisKind::P1) {
            out.dx += grads[v].x * dofs_[start];
            out.dz += grads[v].z * dofs_[start];
            continue;
        }
        const double kv = basis_.nodeWavenumber(node);
        for (int l = 0; l < basis_.nodeDofCount(node); ++l) {
            const Vec2 d = basis_.rays().dir(node, l);
            const double phase = kv * (d.x * x + d.z * z);
            const cplx e(std::cos(phase), std::sin(phase));
            const cplx coeff = dofs_[start + l] * e;
            out.dx += (grads[v].x + cplx(0.0, kv * d.x) * w[static_cast<size_t>(v)]) * coeff;
            out.dz += (grads[v].z + cplx(0.0, kv * d.z) * w[static_cast<size_t>(v)]) * coeff;
        }
    }
    return out;
}

cplx WaveField::nodalValue(int node) const {
    const int start = basis_.nodeDofStart(node);
    if (basis_.kind() == BasisKind::P1) return dofs_[start];
    const Vec2 p = mesh().nodePos(node);
    const double kv = basis_.nodeWavenumber(node);
    cplx s(0.0, 0.0);
    for (int l = 0; l < basis_.nodeDofCount(node); ++l) {
        const Vec2 d = basis_.rays().dir(node, l);
        const double phase = kv * (d.x * p.x + d.z * p.z);
        s += dofs_[start + l] * cplx(std::cos(phase), std::sin(phase));
    }
    return s;
}

Eigen::VectorXcd WaveField::nodalValues() const {
    Eigen::VectorXcd out(mesh().nodeCount());
    for (int j = 0; j < mesh().nodeCount(); ++j) out[j] = nodalValue(j);
    return out;
}

void WaveField::dump(std::ostream& os) const {
    for (int j = 0; j < mesh().nodeCount(); ++j) {
        const Vec2 p = mesh().nodePos(j);
        const cplx v = nodalValue(j);
        os << p.x << ' ' << p.z << ' ' << v.real() << ' ' << v.imag() << '\n';
    }
}

}  // namespace rayfem
