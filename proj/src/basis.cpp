#include "rayfem/basis.hpp"

#include <stdexcept>

namespace rayfem {

BasisDescriptor BasisDescriptor::p1(const Mesh& mesh) {
    BasisDescriptor b;
    b.kind_ = BasisKind::P1;
    b.mesh_ = mesh;
    b.ndof_ = mesh.nodeCount();
    b.rowStart_.resize(static_cast<size_t>(mesh.nz()) + 1);
    for (int r = 0; r <= mesh.nz(); ++r) b.rowStart_[static_cast<size_t>(r)] = r * mesh.nx();
    return b;
}

BasisDescriptor BasisDescriptor::ray(const Mesh& mesh, std::shared_ptr<const RayField> rays,
                                     double omega, const WaveSpeedFn& c) {
    if (!rays || rays->nodeCount() != mesh.nodeCount()) {
        throw std::invalid_argument("BasisDescriptor::ray: rays must cover every node");
    }
    BasisDescriptor b;
    b.kind_ = BasisKind::Ray;
    b.mesh_ = mesh;
    b.rays_ = std::move(rays);
    const int n = mesh.nodeCount();
    b.offsets_.resize(static_cast<size_t>(n) + 1, 0);
    b.nodeK_.resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        const int nj = b.rays_->count(j);
        if (nj < 1) throw std::invalid_argument("BasisDescriptor::ray: node without directions");
        b.offsets_[static_cast<size_t>(j) + 1] = b.offsets_[static_cast<size_t>(j)] + nj;
        const Vec2 p = mesh.nodePos(j);
        const double cj = c(p.x, p.z);
        if (cj <= 0.0) throw std::invalid_argument("BasisDescriptor::ray: wave speed must be positive");
        b.nodeK_[static_cast<size_t>(j)] = omega / cj;
    }
    b.ndof_ = b.offsets_.back();
    b.rowStart_.resize(static_cast<size_t>(mesh.nz()) + 1);
    for (int r = 0; r <= mesh.nz(); ++r) {
        b.rowStart_[static_cast<size_t>(r)] = b.offsets_[static_cast<size_t>(r) * mesh.nx()];
    }
    return b;
}

}  // namespace rayfem
