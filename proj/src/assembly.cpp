#include "rayfem/assembly.hpp"

#include "rayfem/quadrature.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rayfem {

double PMLProfile::sigmaMaxFor(double width, double cmax, double c_sigma, double r0) {
    if (width <= 0.0) return 0.0;
    return c_sigma * std::log(1.0 / r0) * cmax / (2.0 * width);
}

namespace {

double ramp(double t, double width, double smax, int degree) {
    if (t <= 0.0 || width <= 0.0) return 0.0;
    return smax * std::pow(std::min(t, width) / width, degree);
}

}  // namespace

double PMLProfile::sigmaX(double x, const Rect& phys) const {
    if (x < phys.xmin) return ramp(phys.xmin - x, width_left, sigma_max, degree);
    if (x > phys.xmax) return ramp(x - phys.xmax, width_right, sigma_max, degree);
    return 0.0;
}

double PMLProfile::sigmaZ(double z, const Rect& phys) const {
    if (z < phys.zmin) return ramp(phys.zmin - z, width_bottom, sigma_max, degree);
    if (z > phys.zmax) return ramp(z - phys.zmax, width_top, sigma_max, degree);
    return 0.0;
}

namespace {

enum class EdgeBC { Impedance, Dirichlet };

struct CoreInput {
    const Mesh* mesh = nullptr;
    BasisDescriptor basis;
    double omega = 0.0;
    const WaveSpeedFn* c = nullptr;
    const SourceFn* f = nullptr;
    std::function<double(double)> sigma_x, sigma_z;  // empty -> no stretching
    double beta = 1.0;
    const BoundaryFn* g = nullptr;
    EdgeBC bc_left = EdgeBC::Impedance, bc_right = EdgeBC::Impedance;
    EdgeBC bc_bottom = EdgeBC::Impedance, bc_top = EdgeBC::Impedance;
    int quad_order = 4;
};

// Scratch holding per-quadrature-point basis values of one element.
struct ElementBasis {
    std::vector<int> dofs;        // global dof per local basis function
    std::vector<int> vertexOf;    // local vertex index per basis function
    std::vector<cplx> val;        // [q * m + i]
    std::vector<cplx> gx, gz;
};

SparseSystem assembleCore(const CoreInput& in) {
    const Mesh& mesh = *in.mesh;
    const BasisDescriptor& basis = in.basis;
    const int ndof = basis.dofCount();
    const QuadRule& rule = reference_quadrature(in.quad_order);
    const size_t nq = rule.points.size();

    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(static_cast<size_t>(mesh.triangleCount()) * 16);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(ndof);

    const bool stretch = static_cast<bool>(in.sigma_x) || static_cast<bool>(in.sigma_z);
    const bool ray = basis.kind() == BasisKind::Ray;

    ElementBasis eb;
    std::vector<cplx> emat;

    for (int t = 0; t < mesh.triangleCount(); ++t) {
        const auto tri = mesh.triangle(t);
        const Vec2 p0 = mesh.nodePos(tri[0]);
        const Vec2 p1 = mesh.nodePos(tri[1]);
        const Vec2 p2 = mesh.nodePos(tri[2]);
        const double j11 = p1.x - p0.x, j12 = p2.x - p0.x;
        const double j21 = p1.z - p0.z, j22 = p2.z - p0.z;
        const double det = j11 * j22 - j12 * j21;
        // Constant P1 gradients: J^{-T} times reference gradients.
        const double inv11 = j22 / det, inv12 = -j21 / det;
        const double inv21 = -j12 / det, inv22 = j11 / det;
        const Vec2 grad[3] = {{-inv11 - inv12, -inv21 - inv22}, {inv11, inv21}, {inv12, inv22}};

        eb.dofs.clear();
        eb.vertexOf.clear();
        for (int v = 0; v < 3; ++v) {
            const int node = tri[v];
            const int start = basis.nodeDofStart(node);
            for (int l = 0; l < basis.nodeDofCount(node); ++l) {
                eb.dofs.push_back(start + l);
                eb.vertexOf.push_back(v);
            }
        }
        const size_t m = eb.dofs.size();
        eb.val.assign(nq * m, cplx(0.0));
        eb.gx.assign(nq * m, cplx(0.0));
        eb.gz.assign(nq * m, cplx(0.0));
        emat.assign(m * m, cplx(0.0));

        for (size_t q = 0; q < nq; ++q) {
            const double xi = rule.points[q].x, eta = rule.points[q].z;
            const double lam[3] = {1.0 - xi - eta, xi, eta};
            const Vec2 xq{p0.x + j11 * xi + j12 * eta, p0.z + j21 * xi + j22 * eta};
            const double wq = rule.weights[q] * std::abs(det);

            cplx sx(1.0, 0.0), sz(1.0, 0.0);
            if (stretch) {
                if (in.sigma_x) sx = cplx(1.0, in.sigma_x(xq.x) / in.omega);
                if (in.sigma_z) sz = cplx(1.0, in.sigma_z(xq.z) / in.omega);
            }
            const double k = in.omega / (*in.c)(xq.x, xq.z);
            const cplx ax = sz / sx, az = sx / sz, am = sx * sz * k * k;

            // Basis values at this quadrature point.
            size_t i = 0;
            for (int v = 0; v < 3; ++v) {
                const int node = tri[v];
                const int nv = basis.nodeDofCount(node);
                if (!ray) {
                    eb.val[q * m + i] = lam[v];
                    eb.gx[q * m + i] = grad[v].x;
                    eb.gz[q * m + i] = grad[v].z;
                    ++i;
                    continue;
                }
                const double kv = basis.nodeWavenumber(node);
                for (int l = 0; l < nv; ++l, ++i) {
                    const Vec2 d = basis.rays().dir(node, l);
                    const double phase = kv * (d.x * xq.x + d.z * xq.z);
                    const cplx e(std::cos(phase), std::sin(phase));
                    const cplx ikd_x(0.0, kv * d.x), ikd_z(0.0, kv * d.z);
                    eb.val[q * m + i] = lam[v] * e;
                    eb.gx[q * m + i] = (grad[v].x + ikd_x * lam[v]) * e;
                    eb.gz[q * m + i] = (grad[v].z + ikd_z * lam[v]) * e;
                }
            }

            for (size_t r = 0; r < m; ++r) {
                const cplx vr = std::conj(eb.val[q * m + r]);
                const cplx gxr = std::conj(eb.gx[q * m + r]);
                const cplx gzr = std::conj(eb.gz[q * m + r]);
                for (size_t cI = 0; cI < m; ++cI) {
                    emat[r * m + cI] += wq * (ax * eb.gx[q * m + cI] * gxr +
                                              az * eb.gz[q * m + cI] * gzr -
                                              am * eb.val[q * m + cI] * vr);
                }
                if (in.f && *in.f) {
                    b[eb.dofs[r]] += wq * (sx * sz * (*in.f)(xq.x, xq.z)) * vr;
                }
            }
        }

        for (size_t r = 0; r < m; ++r) {
            for (size_t cI = 0; cI < m; ++cI) {
                trips.emplace_back(eb.dofs[r], eb.dofs[cI], emat[r * m + cI]);
            }
        }
    }

    // Impedance boundary term i beta k u vbar and data term g vbar over the
    // sides that carry the impedance condition.
    const bool hasG = in.g && *in.g;
    const EdgeQuadRule& erule = edge_quadrature(std::max(2, in.quad_order));
    auto edgeLoop = [&](int n0, int n1) {
        const Vec2 a = mesh.nodePos(n0), bP = mesh.nodePos(n1);
        const double len = (bP - a).norm();
        const int d0 = basis.nodeDofStart(n0), c0 = basis.nodeDofCount(n0);
        const int d1 = basis.nodeDofStart(n1), c1 = basis.nodeDofCount(n1);
        std::vector<int> dofs;
        std::vector<cplx> vals;
        for (size_t q = 0; q < erule.points.size(); ++q) {
            const double s = erule.points[q];
            const Vec2 xq = a + (bP - a) * s;
            const double wq = erule.weights[q] * len;
            const double k = in.omega / (*in.c)(xq.x, xq.z);
            dofs.clear();
            vals.clear();
            for (int which = 0; which < 2; ++which) {
                const int node = which == 0 ? n0 : n1;
                const double lam = which == 0 ? 1.0 - s : s;
                const int dstart = which == 0 ? d0 : d1;
                const int dcount = which == 0 ? c0 : c1;
                if (basis.kind() == BasisKind::P1) {
                    dofs.push_back(dstart);
                    vals.push_back(lam);
                    continue;
                }
                const double kv = basis.nodeWavenumber(node);
                for (int l = 0; l < dcount; ++l) {
                    const Vec2 dd = basis.rays().dir(node, l);
                    const double phase = kv * (dd.x * xq.x + dd.z * xq.z);
                    dofs.push_back(dstart + l);
                    vals.push_back(lam * cplx(std::cos(phase), std::sin(phase)));
                }
            }
            const cplx ibk(0.0, in.beta * k);
            for (size_t r = 0; r < dofs.size(); ++r) {
                const cplx vr = std::conj(vals[r]);
                for (size_t cI = 0; cI < dofs.size(); ++cI) {
                    trips.emplace_back(dofs[r], dofs[cI], wq * ibk * vals[cI] * vr);
                }
                if (hasG) b[dofs[r]] += wq * (*in.g)(xq.x, xq.z) * vr;
            }
        }
    };
    if (in.bc_bottom == EdgeBC::Impedance) {
        for (int ix = 0; ix + 1 < mesh.nx(); ++ix) edgeLoop(mesh.nodeId(ix, 0), mesh.nodeId(ix + 1, 0));
    }
    if (in.bc_top == EdgeBC::Impedance) {
        const int iz = mesh.nz() - 1;
        for (int ix = 0; ix + 1 < mesh.nx(); ++ix) edgeLoop(mesh.nodeId(ix, iz), mesh.nodeId(ix + 1, iz));
    }
    if (in.bc_left == EdgeBC::Impedance) {
        for (int iz = 0; iz + 1 < mesh.nz(); ++iz) edgeLoop(mesh.nodeId(0, iz), mesh.nodeId(0, iz + 1));
    }
    if (in.bc_right == EdgeBC::Impedance) {
        const int ix = mesh.nx() - 1;
        for (int iz = 0; iz + 1 < mesh.nz(); ++iz) edgeLoop(mesh.nodeId(ix, iz), mesh.nodeId(ix, iz + 1));
    }

    // Homogeneous Dirichlet on the outer edge of the selected sides, applied
    // as row/column elimination with a unit diagonal so the dof ordering and
    // the depth-row block structure stay intact.
    std::vector<char> fixed(static_cast<size_t>(ndof), 0);
    bool anyFixed = false;
    auto fixNode = [&](int node) {
        const int start = basis.nodeDofStart(node);
        for (int l = 0; l < basis.nodeDofCount(node); ++l) fixed[static_cast<size_t>(start + l)] = 1;
        anyFixed = true;
    };
    if (in.bc_left == EdgeBC::Dirichlet) {
        for (int iz = 0; iz < mesh.nz(); ++iz) fixNode(mesh.nodeId(0, iz));
    }
    if (in.bc_right == EdgeBC::Dirichlet) {
        for (int iz = 0; iz < mesh.nz(); ++iz) fixNode(mesh.nodeId(mesh.nx() - 1, iz));
    }
    if (in.bc_bottom == EdgeBC::Dirichlet) {
        for (int ix = 0; ix < mesh.nx(); ++ix) fixNode(mesh.nodeId(ix, 0));
    }
    if (in.bc_top == EdgeBC::Dirichlet) {
        for (int ix = 0; ix < mesh.nx(); ++ix) fixNode(mesh.nodeId(ix, mesh.nz() - 1));
    }

    if (anyFixed) {
        std::vector<Eigen::Triplet<cplx>> kept;
        kept.reserve(trips.size());
        for (const auto& tr : trips) {
            if (!fixed[static_cast<size_t>(tr.row())] && !fixed[static_cast<size_t>(tr.col())]) {
                kept.push_back(tr);
            }
        }
        for (int i = 0; i < ndof; ++i) {
            if (fixed[static_cast<size_t>(i)]) {
                kept.emplace_back(i, i, cplx(1.0, 0.0));
                b[i] = cplx(0.0, 0.0);
            }
        }
        trips.swap(kept);
    }

    SparseSystem sys;
    sys.basis = basis;
    sys.H.resize(ndof, ndof);
    sys.H.setFromTriplets(trips.begin(), trips.end());
    sys.H.makeCompressed();
    sys.b = std::move(b);
    return sys;
}

CoreInput coreFromProblem(const HelmholtzProblem& prob, const Mesh& mesh,
                          const BasisDescriptor& basis) {
    CoreInput in;
    in.mesh = &mesh;
    in.basis = basis;
    in.omega = prob.omega;
    in.c = &prob.c;
    in.f = &prob.f;
    in.beta = prob.beta;
    in.g = &prob.g;
    in.quad_order = prob.effectiveQuadOrder();
    if (prob.pml) {
        const Rect phys = prob.mesh.physicalBox();
        const PMLProfile prof = prob.profile;
        in.sigma_x = [prof, phys](double x) { return prof.sigmaX(x, phys); };
        in.sigma_z = [prof, phys](double z) { return prof.sigmaZ(z, phys); };
        in.bc_left = in.bc_right = in.bc_bottom = in.bc_top = EdgeBC::Dirichlet;
    }
    return in;
}

BasisDescriptor basisFor(const HelmholtzProblem& prob, const Mesh& mesh,
                         std::shared_ptr<const RayField> rays) {
    if (prob.basis_kind == BasisKind::P1) return BasisDescriptor::p1(mesh);
    if (!rays) throw std::invalid_argument("assemble: ray basis requires a ray field");
    return BasisDescriptor::ray(mesh, std::move(rays), prob.omega, prob.c);
}

}  // namespace

SparseSystem assemble(const HelmholtzProblem& prob) {
    const BasisDescriptor basis = basisFor(prob, prob.mesh, prob.rays);
    return assembleCore(coreFromProblem(prob, prob.mesh, basis));
}

SparseSystem assemble_slab(const HelmholtzProblem& prob, const SlabSpec& slab) {
    const int zlo = slab.z_first - slab.ext_below;
    const int zhi = slab.z_last + slab.ext_above;
    const Mesh local = prob.mesh.slabRows(zlo, zhi);

    std::shared_ptr<const RayField> localRays;
    if (prob.basis_kind == BasisKind::Ray) {
        localRays = std::make_shared<RayField>(restrictRays(*prob.rays, prob.mesh.nx(), zlo, zhi));
    }
    const BasisDescriptor basis = basisFor(prob, local, localRays);
    CoreInput in = coreFromProblem(prob, local, basis);
    // Slab right-hand sides are injected by the solver from the global
    // vector, so neither the volume source nor the boundary data re-enter.
    in.f = nullptr;
    in.g = nullptr;

    // Interface damping ramps on the extension rows, added on top of any
    // global z-damping.
    const double zBottomIface = prob.mesh.box().zmin + slab.z_first * prob.mesh.h();
    const double zTopIface = prob.mesh.box().zmin + slab.z_last * prob.mesh.h();
    const double wBelow = slab.ext_below * prob.mesh.h();
    const double wAbove = slab.ext_above * prob.mesh.h();
    const auto globalSigmaZ = in.sigma_z;
    const double smax = slab.iface_sigma_max;
    const int deg = slab.iface_degree;
    in.sigma_z = [=](double z) {
        double s = globalSigmaZ ? globalSigmaZ(z) : 0.0;
        if (z < zBottomIface && wBelow > 0.0) s += ramp(zBottomIface - z, wBelow, smax, deg);
        if (z > zTopIface && wAbove > 0.0) s += ramp(z - zTopIface, wAbove, smax, deg);
        return s;
    };
    if (slab.ext_below > 0) in.bc_bottom = EdgeBC::Dirichlet;
    if (slab.ext_above > 0) in.bc_top = EdgeBC::Dirichlet;
    return assembleCore(in);
}

SparseSystem assemble_sfem(const Mesh& mesh, double omega, const WaveSpeedFn& c, double beta,
                           const SourceFn& f, const BoundaryFn& g, int quad_order) {
    HelmholtzProblem p;
    p.mesh = mesh;
    p.omega = omega;
    p.c = c;
    p.f = f;
    p.beta = beta;
    p.g = g;
    p.basis_kind = BasisKind::P1;
    p.quad_order = quad_order;
    return assemble(p);
}

SparseSystem assemble_rayfem(const Mesh& mesh, double omega, const WaveSpeedFn& c, double beta,
                             const SourceFn& f, const BoundaryFn& g,
                             std::shared_ptr<const RayField> rays, int quad_order) {
    HelmholtzProblem p;
    p.mesh = mesh;
    p.omega = omega;
    p.c = c;
    p.f = f;
    p.beta = beta;
    p.g = g;
    p.basis_kind = BasisKind::Ray;
    p.rays = std::move(rays);
    p.quad_order = quad_order;
    return assemble(p);
}

SparseSystem assemble_pml(const Mesh& mesh, double omega, const WaveSpeedFn& c, const SourceFn& f,
                          const PMLProfile& profile, BasisKind basis_kind,
                          std::shared_ptr<const RayField> rays, int quad_order) {
    HelmholtzProblem p;
    p.mesh = mesh;
    p.omega = omega;
    p.c = c;
    p.f = f;
    p.pml = true;
    p.profile = profile;
    p.basis_kind = basis_kind;
    p.rays = std::move(rays);
    p.quad_order = quad_order;
    return assemble(p);
}

RayField restrictRays(const RayField& rays, int nx, int zlo, int zhi) {
    const int first = zlo * nx;
    const int count = (zhi - zlo + 1) * nx;
    RayField::Builder b(count);
    for (int j = 0; j < count; ++j) {
        const int gj = first + j;
        std::vector<Vec2> dirs;
        dirs.reserve(static_cast<size_t>(rays.count(gj)));
        for (int l = 0; l < rays.count(gj); ++l) dirs.push_back(rays.dir(gj, l));
        b.setNode(j, dirs, rays.provenance(gj));
    }
    return b.finish();
}

}  // namespace rayfem
