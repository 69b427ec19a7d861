#pragma once

#include "rayfem/basis.hpp"
#include "rayfem/mesh.hpp"
#include "rayfem/rays.hpp"
#include "rayfem/types.hpp"

#include <Eigen/SparseCore>
#include <memory>

namespace rayfem {

// Quadratic-ramp absorbing profile for complex coordinate stretching,
// s(t) = 1 + i sigma(t)/omega with sigma(t) = sigma_max (t/width)^degree.
struct PMLProfile {
    double width_left = 0.0, width_right = 0.0, width_bottom = 0.0, width_top = 0.0;
    double sigma_max = 0.0;
    int degree = 2;

    // sigma_max giving a nominal round-trip reflection r0 through a layer of
    // the given width: sigma_max = c_sigma * log(1/r0) * c_max / (2 width).
    static double sigmaMaxFor(double width, double cmax, double c_sigma = 3.0, double r0 = 1e-6);

    // Damping against the physical box `phys`; zero inside it.
    double sigmaX(double x, const Rect& phys) const;
    double sigmaZ(double z, const Rect& phys) const;
};

struct SparseSystem {
    Eigen::SparseMatrix<cplx> H;
    Eigen::VectorXcd b;
    BasisDescriptor basis;

    int dim() const { return static_cast<int>(H.rows()); }
    const std::vector<int>& rowDofStart() const { return basis.rowDofStart(); }
};

// Full problem description; enough to assemble the global system and to
// reassemble any PML-extended slab of it for the layered solver.
struct HelmholtzProblem {
    Mesh mesh;
    double omega = 0.0;
    WaveSpeedFn c;
    SourceFn f;  // empty -> zero volume source

    bool pml = false;      // false: impedance boundary, true: PML + outer Dirichlet
    double beta = 1.0;     // impedance coefficient
    BoundaryFn g;          // impedance data; empty -> zero
    PMLProfile profile;    // used when pml = true

    BasisKind basis_kind = BasisKind::P1;
    std::shared_ptr<const RayField> rays;  // Ray basis only

    int quad_order = 0;  // 0 -> default (4 for P1, 10 for Ray)

    int effectiveQuadOrder() const {
        if (quad_order > 0) return quad_order;
        return basis_kind == BasisKind::Ray ? 10 : 4;
    }
};

// A slab of node rows [z_first, z_last] extended by ext_below/ext_above rows
// of interface PML with the given damping strength.
struct SlabSpec {
    int z_first = 0, z_last = 0;
    int ext_below = 0, ext_above = 0;
    double iface_sigma_max = 0.0;
    int iface_degree = 2;
};

SparseSystem assemble(const HelmholtzProblem& prob);
SparseSystem assemble_slab(const HelmholtzProblem& prob, const SlabSpec& slab);

// Convenience entry points.
SparseSystem assemble_sfem(const Mesh& mesh, double omega, const WaveSpeedFn& c, double beta,
                           const SourceFn& f, const BoundaryFn& g, int quad_order = 0);
SparseSystem assemble_rayfem(const Mesh& mesh, double omega, const WaveSpeedFn& c, double beta,
                             const SourceFn& f, const BoundaryFn& g,
                             std::shared_ptr<const RayField> rays, int quad_order = 0);
SparseSystem assemble_pml(const Mesh& mesh, double omega, const WaveSpeedFn& c, const SourceFn& f,
                          const PMLProfile& profile, BasisKind basis_kind,
                          std::shared_ptr<const RayField> rays = nullptr, int quad_order = 0);

// RayField restricted to node rows [zlo, zhi] of a mesh with nx nodes per row.
RayField restrictRays(const RayField& rays, int nx, int zlo, int zhi);

}  // namespace rayfem
