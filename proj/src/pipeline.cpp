#include "rayfem/pipeline.hpp"

#include "rayfem/quadrature.hpp"
#include "rayfem/special_functions.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace rayfem {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

cplx exact_point_source(Vec2 x, double omega, const std::vector<PointSource>& sources) {
    cplx out(0.0, 0.0);
    const double sw = std::sqrt(omega);
    for (const auto& s : sources) {
        const double d = (x - s.pos).norm();
        if (d < 1e-14) throw std::domain_error("exact_point_source: evaluation at a source");
        out += s.amp * sw * hankel1_0(omega * d);
    }
    return out;
}

GradC exact_point_source_grad(Vec2 x, double omega, const std::vector<PointSource>& sources) {
    GradC out;
    const double sw = std::sqrt(omega);
    for (const auto& s : sources) {
        const Vec2 r = x - s.pos;
        const double d = r.norm();
        if (d < 1e-14) throw std::domain_error("exact_point_source_grad: evaluation at a source");
        // d/dz H_0^{(1)}(z) = -H_1^{(1)}(z)
        const cplx radial = -s.amp * sw * omega * hankel1_1(omega * d);
        out.dx += radial * (r.x / d);
        out.dz += radial * (r.z / d);
    }
    return out;
}

std::vector<PointSource> one_source_benchmark() {
    return {{{2.0, 2.0}, cplx(1.0, 0.0)}};
}

std::vector<PointSource> four_source_benchmark() {
    return {{{-20.0, -20.0}, cplx(1.0, 0.0)},
            {{20.0, 20.0}, cplx(2.0, 0.0)},
            {{-20.0, 20.0}, cplx(0.5, 0.0)},
            {{20.0, -20.0}, cplx(-1.0, 0.0)}};
}

BoundaryFn impedance_boundary_data(const std::function<cplx(double, double)>& u,
                                   const std::function<GradC(double, double)>& grad_u, double beta,
                                   double omega, const WaveSpeedFn& c, const Rect& domain) {
    return [=](double x, double z) -> cplx {
        // Outward normal of the nearest side.
        const double dl = x - domain.xmin, dr = domain.xmax - x;
        const double db = z - domain.zmin, dt = domain.zmax - z;
        Vec2 n{0.0, 0.0};
        const double dmin = std::min(std::min(dl, dr), std::min(db, dt));
        if (dmin == dl) {
            n = {-1.0, 0.0};
        } else if (dmin == dr) {
            n = {1.0, 0.0};
        } else if (dmin == db) {
            n = {0.0, -1.0};
        } else {
            n = {0.0, 1.0};
        }
        const GradC g = grad_u(x, z);
        const double k = omega / c(x, z);
        return g.dx * n.x + g.dz * n.z + cplx(0.0, beta * k) * u(x, z);
    };
}

int interface_pml_nodes(double omega, double base, double per_octave, double f_ref, int min_nodes) {
    const double f = omega / (2.0 * kPi);
    const int n = static_cast<int>(std::lround(base + per_octave * std::log2(std::max(f / f_ref, 1.0))));
    return std::max(min_nodes, n);
}

int outer_pml_nodes(double omega, double c_pml, double f_ref, int min_nodes) {
    const double f = omega / (2.0 * kPi);
    const int n = static_cast<int>(std::lround(c_pml * std::log2(std::max(f / f_ref, 2.0))));
    return std::max(min_nodes, n);
}

namespace {

WaveField solve_problem(const HelmholtzProblem& prob, const SolverChoice& solver,
                        SolveStats* stats) {
    SolveStats local;
    const auto t0 = std::chrono::steady_clock::now();
    SparseSystem sys = assemble(prob);
    Eigen::VectorXcd x;
    if (solver.direct) {
        local.setup_seconds = seconds_since(t0);
        const auto t1 = std::chrono::steady_clock::now();
        x = direct_solve(sys);
        local.solve_seconds = seconds_since(t1);
        local.iterations = 1;
        local.converged = true;
    } else {
        const Rect& box = prob.mesh.box();
        const double cref = prob.c(0.5 * (box.xmin + box.xmax), 0.5 * (box.zmin + box.zmax));
        const double rows_per_wavelength = 2.0 * kPi * cref / (prob.omega * prob.mesh.h());
        int layer_rows = solver.layer_rows;
        if (layer_rows <= 0) {
            layer_rows = std::clamp(static_cast<int>(std::lround(rows_per_wavelength)), 3, 48);
        }
        int iface = solver.iface_pml_nodes;
        if (iface <= 0) iface = interface_pml_nodes(prob.omega);
        LayeredPartition::Options opts;
        opts.layer_rows = layer_rows;
        opts.pml_nodes = iface;
        opts.extra_downward_transfer = solver.extra_downward_transfer;
        LayeredPartition part = LayeredPartition::build(prob, sys, opts);
        part.factorizeAll();
        local.setup_seconds = seconds_since(t0);
        const auto t1 = std::chrono::steady_clock::now();
        GmresResult res = solve_polarized_traces(sys, part, solver.krylov);
        local.solve_seconds = seconds_since(t1);
        local.iterations = res.iterations;
        local.converged = res.converged;
        if (!res.residual_history.empty()) local.final_residual = res.residual_history.back();
        x = std::move(res.x);
    }
    if (stats) {
        local.quasi_optimality_warning = stats->quasi_optimality_warning;
        *stats = local;
    }
    return WaveField(sys.basis, std::move(x));
}

}  // namespace

WaveField s_fem_solve(const HelmholtzProblem& prob, const SolverChoice& solver, SolveStats* stats) {
    if (prob.basis_kind != BasisKind::P1) {
        throw std::invalid_argument("s_fem_solve: expected the P1 basis");
    }
    SolveStats tmp;
    tmp.quasi_optimality_warning = prob.omega * prob.omega * prob.mesh.h() > 50.0;
    if (stats) *stats = tmp;
    return solve_problem(prob, solver, stats);
}

WaveField ray_fem_solve(const HelmholtzProblem& prob, const SolverChoice& solver,
                        SolveStats* stats) {
    if (prob.basis_kind != BasisKind::Ray) {
        throw std::invalid_argument("ray_fem_solve: expected the ray basis");
    }
    return solve_problem(prob, solver, stats);
}

bool Region::contains(double x, double z) const {
    if (!box.contains(x, z)) return false;
    for (const auto& [c, r] : excluded_disks) {
        if ((Vec2{x, z} - c).norm() < r) return false;
    }
    return true;
}

L2Error l2_error(const WaveField& field, const std::function<cplx(double, double)>& ref,
                 const Region& region, int quad_order) {
    const Mesh& mesh = field.mesh();
    const QuadRule& rule = reference_quadrature(quad_order);
    double num = 0.0, den = 0.0;
    for (int t = 0; t < mesh.triangleCount(); ++t) {
        const auto tri = mesh.triangle(t);
        const Vec2 p0 = mesh.nodePos(tri[0]);
        const Vec2 p1 = mesh.nodePos(tri[1]);
        const Vec2 p2 = mesh.nodePos(tri[2]);
        const Vec2 centroid{(p0.x + p1.x + p2.x) / 3.0, (p0.z + p1.z + p2.z) / 3.0};
        if (!region.contains(centroid.x, centroid.z)) continue;
        const double j11 = p1.x - p0.x, j12 = p2.x - p0.x;
        const double j21 = p1.z - p0.z, j22 = p2.z - p0.z;
        const double det = std::abs(j11 * j22 - j12 * j21);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const double xi = rule.points[q].x, eta = rule.points[q].z;
            const double x = p0.x + j11 * xi + j12 * eta;
            const double z = p0.z + j21 * xi + j22 * eta;
            const double w = rule.weights[q] * det;
            const cplx uh = field.eval(x, z);
            const cplx ur = ref(x, z);
            num += w * std::norm(uh - ur);
            den += w * std::norm(ur);
        }
    }
    L2Error e;
    e.absolute = std::sqrt(num);
    e.ref_norm = std::sqrt(den);
    e.relative = den > 0.0 ? e.absolute / e.ref_norm : e.absolute;
    return e;
}

double angle_error(const RayField& rays, const Mesh& mesh,
                   const std::function<std::vector<double>(double, double)>& exact_bearings,
                   const Region& region) {
    if (rays.nodeCount() != mesh.nodeCount()) {
        throw std::invalid_argument("angle_error: rays/mesh mismatch");
    }
    const double w = mesh.h() * mesh.h();
    double acc = 0.0;
    for (int j = 0; j < mesh.nodeCount(); ++j) {
        const Vec2 p = mesh.nodePos(j);
        if (!region.contains(p.x, p.z)) continue;
        const std::vector<double> exact = exact_bearings(p.x, p.z);
        if (exact.empty()) continue;
        double sq = 0.0;
        for (double ex : exact) {
            double best = kPi;
            for (int l = 0; l < rays.count(j); ++l) {
                best = std::min(best, std::abs(wrapAngle(rays.dir(j, l).angle() - ex)));
            }
            sq += best * best;
        }
        acc += w * sq / static_cast<double>(exact.size());
    }
    return std::sqrt(acc);
}

double nodal_relative_diff(const WaveField& a, const WaveField& b) {
    if (a.mesh().nodeCount() != b.mesh().nodeCount()) {
        throw std::invalid_argument("nodal_relative_diff: mesh mismatch");
    }
    const Eigen::VectorXcd va = a.nodalValues(), vb = b.nodalValues();
    const double nb = vb.norm();
    if (nb == 0.0) return (va - vb).norm();
    return (va - vb).norm() / nb;
}

double ProbeRule::probeOmega(double omega) const {
    double w = scale * std::sqrt(omega);
    if (round_to_integer_hz) {
        const double hz = std::max(min_hz, std::round(w / (2.0 * kPi)));
        w = 2.0 * kPi * hz;
    }
    return w;
}

double mesh_size_for(double omega, int npw, double c_min) {
    const double f = omega / (2.0 * kPi);
    return c_min / (f * npw);
}

double coarse_spacing_for(double h) {
    return h * std::max(1.0, std::round(std::sqrt(h) / h));
}

Mesh build_family_mesh(const ProblemFamily& fam, double omega, int npw, double scale) {
    const double h = mesh_size_for(omega, npw, fam.c_min);
    Rect box = fam.domain;
    if (scale != 1.0) {
        // Snap the enlarged box to whole mesh steps so the original nodes
        // stay on the grid.
        const double ex = std::ceil(0.5 * box.width() * (scale - 1.0) / h) * h;
        const double ez = std::ceil(0.5 * box.height() * (scale - 1.0) / h) * h;
        box = Rect{box.xmin - ex, box.xmax + ex, box.zmin - ez, box.zmax + ez};
    }
    Mesh mesh = Mesh::build(box, h);
    if (fam.isPml()) {
        const int nodes = outer_pml_nodes(omega, fam.pml_c);
        mesh = Mesh::extendWithPml(mesh, nodes * h);
    }
    return mesh;
}

HelmholtzProblem make_problem(const ProblemFamily& fam, double omega, const Mesh& mesh,
                              BasisKind kind, std::shared_ptr<const RayField> rays,
                              int quad_order) {
    HelmholtzProblem p;
    p.mesh = mesh;
    p.omega = omega;
    p.c = fam.c;
    p.basis_kind = kind;
    p.rays = std::move(rays);
    p.quad_order = quad_order;
    p.beta = fam.beta;
    if (fam.isPml()) {
        p.pml = true;
        PMLProfile prof;
        const Rect& phys = mesh.physicalBox();
        const Rect& box = mesh.box();
        prof.width_left = phys.xmin - box.xmin;
        prof.width_right = box.xmax - phys.xmax;
        prof.width_bottom = phys.zmin - box.zmin;
        prof.width_top = box.zmax - phys.zmax;
        prof.degree = fam.ramp_degree;
        double cmax = fam.c_min;
        for (int j = 0; j < mesh.nodeCount(); ++j) {
            const Vec2 q = mesh.nodePos(j);
            cmax = std::max(cmax, fam.c(q.x, q.z));
        }
        const double wmax = std::max(std::max(prof.width_left, prof.width_right),
                                     std::max(prof.width_bottom, prof.width_top));
        prof.sigma_max = PMLProfile::sigmaMaxFor(wmax, cmax, fam.sigma_constant);
        p.profile = prof;

        // Discrete delta: hat function at the nearest node, scaled by 1/h^p.
        const Vec2 src = *fam.interior_source;
        const double h = mesh.h();
        const int ix = static_cast<int>(std::lround((src.x - mesh.box().xmin) / h));
        const int iz = static_cast<int>(std::lround((src.z - mesh.box().zmin) / h));
        const int srcNode = mesh.nodeId(ix, iz);
        const Vec2 snapped = mesh.nodePos(srcNode);
        const double scale = std::pow(h, -fam.point_source_power);
        const Mesh meshCopy = mesh;
        p.f = [meshCopy, snapped, scale](double x, double z) -> cplx {
            // P1 hat centered at the source node.
            if (std::abs(x - snapped.x) >= meshCopy.h() || std::abs(z - snapped.z) >= meshCopy.h()) {
                return cplx(0.0, 0.0);
            }
            std::array<double, 3> w;
            const int t = meshCopy.locate(x, z, w);
            const auto tri = meshCopy.triangle(t);
            for (int v = 0; v < 3; ++v) {
                const Vec2 pv = meshCopy.nodePos(tri[static_cast<size_t>(v)]);
                if (std::abs(pv.x - snapped.x) < 1e-12 && std::abs(pv.z - snapped.z) < 1e-12) {
                    return cplx(w[static_cast<size_t>(v)] * scale, 0.0);
                }
            }
            return cplx(0.0, 0.0);
        };
    } else {
        if (!fam.impedance_g) {
            throw std::invalid_argument("make_problem: family has no boundary data");
        }
        p.g = fam.impedance_g(omega, mesh.physicalBox());
    }
    return p;
}

IterRayResult iter_ray_fem(const ProblemFamily& fam, double omega, const IterRayConfig& cfg) {
    IterRayResult out;
    const double h = mesh_size_for(omega, cfg.npw, fam.c_min);
    out.h = h;
    out.hc = coarse_spacing_for(h);
    out.omega_probe = cfg.probe.probeOmega(omega);

    const Mesh mesh = build_family_mesh(fam, omega, cfg.npw, 1.0);
    const Mesh probeMesh = build_family_mesh(fam, omega, cfg.npw, cfg.probe.domain_scale);

    // Probe: low-frequency S-FEM solve of the same physical problem.
    auto t0 = std::chrono::steady_clock::now();
    {
        const HelmholtzProblem lowProb =
            make_problem(fam, out.omega_probe, probeMesh, BasisKind::P1, nullptr);
        out.low_field = s_fem_solve(lowProb, cfg.solver, &out.probe_stats);
    }
    out.t_probe = seconds_since(t0);

    const double lambdaHigh = 2.0 * kPi * fam.c_min / omega;
    auto applyRadial = [&](RayField&& rf) {
        if (!fam.interior_source) return std::move(rf);
        return RayField::withExactRadial(rf, mesh, *fam.interior_source,
                                         cfg.source_radius_wavelengths * lambdaHigh);
    };

    // Learn from the probe.
    t0 = std::chrono::steady_clock::now();
    auto lowRays = std::make_shared<RayField>(applyRadial(
        ray_learning(out.omega_probe, out.hc, fam.c, out.low_field, mesh, cfg.nmla)));
    out.low_rays = lowRays;
    out.t_learn = seconds_since(t0);

    // High-frequency solve with the learned rays.
    t0 = std::chrono::steady_clock::now();
    HelmholtzProblem highProb =
        make_problem(fam, omega, mesh, BasisKind::Ray, lowRays, cfg.quad_order_ray);
    out.first_field = ray_fem_solve(highProb, cfg.solver, &out.solve_stats);
    out.t_solve = seconds_since(t0);

    // Re-learn from the high-frequency field until the solution settles.
    WaveField current = out.first_field;
    std::shared_ptr<const RayField> currentRays = lowRays;
    out.converged = false;
    double tol = 1.0;
    int niter = 0;
    while (niter < cfg.max_iter) {
        t0 = std::chrono::steady_clock::now();
        auto rays = std::make_shared<RayField>(applyRadial(ray_learning(
            omega, out.hc, fam.c, current, mesh, cfg.nmla, currentRays.get())));
        out.t_learn += seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        HelmholtzProblem prob = make_problem(fam, omega, mesh, BasisKind::Ray, rays,
                                             cfg.quad_order_ray);
        SolveStats st;
        WaveField next = ray_fem_solve(prob, cfg.solver, &st);
        out.solve_stats = st;
        out.t_solve += seconds_since(t0);

        tol = nodal_relative_diff(current, next);
        current = std::move(next);
        currentRays = std::move(rays);
        ++niter;
        if (tol <= cfg.epsilon) {
            out.converged = true;
            break;
        }
    }
    out.outer_iterations = niter;
    out.final_tol = tol;
    out.field = std::move(current);
    out.rays = std::move(currentRays);
    return out;
}

}  // namespace rayfem
