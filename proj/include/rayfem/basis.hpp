#pragma once

#include "rayfem/mesh.hpp"
#include "rayfem/rays.hpp"
#include "rayfem/types.hpp"

#include <memory>
#include <vector>

namespace rayfem {

enum class BasisKind { P1, Ray };

// Degree-of-freedom layout of either the standard P1 space or the
// ray-enriched space phi_j(x) e^{i k_j d_{j,l} . x}, k_j = omega / c(x_j).
// Dofs of one node are contiguous and nodes keep their lexicographic order,
// so depth-row blocks of dofs are contiguous as well.
class BasisDescriptor {
  public:
    static BasisDescriptor p1(const Mesh& mesh);
    static BasisDescriptor ray(const Mesh& mesh, std::shared_ptr<const RayField> rays,
                               double omega, const WaveSpeedFn& c);

    BasisKind kind() const { return kind_; }
    const Mesh& mesh() const { return mesh_; }
    const RayField& rays() const { return *rays_; }

    int dofCount() const { return ndof_; }
    int nodeDofStart(int node) const {
        return kind_ == BasisKind::P1 ? node : offsets_[static_cast<size_t>(node)];
    }
    int nodeDofCount(int node) const {
        return kind_ == BasisKind::P1 ? 1 : rays_->count(node);
    }
    double nodeWavenumber(int node) const {
        return kind_ == BasisKind::P1 ? 0.0 : nodeK_[static_cast<size_t>(node)];
    }

    // First dof of each depth row; size nz + 1.
    const std::vector<int>& rowDofStart() const { return rowStart_; }

  private:
    BasisKind kind_ = BasisKind::P1;
    Mesh mesh_;
    std::shared_ptr<const RayField> rays_;
    std::vector<double> nodeK_;
    std::vector<int> offsets_;
    std::vector<int> rowStart_;
    int ndof_ = 0;
};

}  // namespace rayfem
