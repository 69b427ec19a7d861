#pragma once

#include "rayfem/assembly.hpp"
#include "rayfem/nmla.hpp"
#include "rayfem/ray_learning.hpp"
#include "rayfem/solver.hpp"
#include "rayfem/wavefield.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace rayfem {

// ---------------------------------------------------------------------------
// Analytic reference solutions.

struct PointSource {
    Vec2 pos;
    cplx amp{1.0, 0.0};
};

// sum_s amp_s sqrt(omega) H_0^{(1)}(omega |x - pos_s|); throws at a source.
cplx exact_point_source(Vec2 x, double omega, const std::vector<PointSource>& sources);
GradC exact_point_source_grad(Vec2 x, double omega, const std::vector<PointSource>& sources);

// The paper's two benchmark source sets.
std::vector<PointSource> one_source_benchmark();   // (2, 2), amplitude 1
std::vector<PointSource> four_source_benchmark();  // (+-20, +-20), amplitudes 1, 2, 0.5, -1

// g = du/dn + i beta k u on the boundary of `domain`, outward normal taken
// from the nearest side.
BoundaryFn impedance_boundary_data(const std::function<cplx(double, double)>& u,
                                   const std::function<GradC(double, double)>& grad_u, double beta,
                                   double omega, const WaveSpeedFn& c, const Rect& domain);

// ---------------------------------------------------------------------------
// Linear solves.

struct SolverChoice {
    bool direct = true;  // false: polarized-traces preconditioned GMRES
    KrylovConfig krylov;
    int layer_rows = 0;       // 0 -> one wavelength of rows (>= 3)
    int iface_pml_nodes = 0;  // 0 -> logarithmic-in-omega rule
    bool extra_downward_transfer = true;
};

struct SolveStats {
    int iterations = 0;
    bool converged = true;
    double final_residual = 0.0;
    double setup_seconds = 0.0;
    double solve_seconds = 0.0;
    bool quasi_optimality_warning = false;  // omega^2 h notably large for S-FEM
};

// Interface PML width (nodes): base + per_octave * log2(f / f_ref), floored.
int interface_pml_nodes(double omega, double base = 6.0, double per_octave = 2.0,
                        double f_ref = 20.0, int min_nodes = 4);

// Outer PML width (nodes): c_pml * log2(f / f_ref), floored at min_nodes.
int outer_pml_nodes(double omega, double c_pml = 2.78, double f_ref = 1.0, int min_nodes = 8);

// Assemble-and-solve wrappers (Algorithms "standard FEM solver" and
// "ray-FEM solver"). The problem's basis kind selects the space.
WaveField s_fem_solve(const HelmholtzProblem& prob, const SolverChoice& solver,
                      SolveStats* stats = nullptr);
WaveField ray_fem_solve(const HelmholtzProblem& prob, const SolverChoice& solver,
                        SolveStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Error metrics.

struct Region {
    Rect box;
    std::vector<std::pair<Vec2, double>> excluded_disks;
    bool contains(double x, double z) const;
};

struct L2Error {
    double absolute = 0.0;
    double relative = 0.0;
    double ref_norm = 0.0;
};

L2Error l2_error(const WaveField& field, const std::function<cplx(double, double)>& ref,
                 const Region& region, int quad_order = 6);

// Nodal L2 (uniform h^2 node weights) of the wrapped angle mismatch, matched
// per nearest exact front at every node.
double angle_error(const RayField& rays, const Mesh& mesh,
                   const std::function<std::vector<double>(double, double)>& exact_bearings,
                   const Region& region);

// || a - b || / || b || over nodal values with uniform h^2 weights.
double nodal_relative_diff(const WaveField& a, const WaveField& b);

// ---------------------------------------------------------------------------
// The full iterative pipeline (probe, learn, solve, iterate).

// One experiment geometry/physics, from which problems at any frequency and
// basis are assembled. Either an impedance problem with analytic boundary
// data or an interior point source inside a PML-truncated domain.
struct ProblemFamily {
    Rect domain{-0.5, 0.5, -0.5, 0.5};
    WaveSpeedFn c;
    double c_min = 1.0;
    double beta = 1.0;

    // Impedance variant: boundary data factory (domain rectangle passed in
    // because the probe is posed on an enlarged box).
    std::function<BoundaryFn(double omega, const Rect& box)> impedance_g;

    // PML variant: interior point source.
    std::optional<Vec2> interior_source;
    double point_source_power = 2.0;  // hat column normalization 1/h^p
    double pml_c = 2.78;              // outer PML width rule constant
    double sigma_constant = 3.0;
    int ramp_degree = 2;

    bool isPml() const { return interior_source.has_value(); }
};

struct ProbeRule {
    double scale = 1.0;              // C in omega_tilde = C sqrt(omega)
    bool round_to_integer_hz = true;
    double min_hz = 1.0;
    double domain_scale = 2.0;       // probe box edge multiplier

    double probeOmega(double omega) const;
};

struct IterRayConfig {
    int npw = 6;
    ProbeRule probe;
    NmlaConfig nmla;
    double epsilon = 1e-3;
    int max_iter = 3;
    double source_radius_wavelengths = 4.0;
    SolverChoice solver;
    int quad_order_ray = 0;  // 0 -> assembly default
};

struct IterRayResult {
    WaveField field;                        // final high-frequency solution
    std::shared_ptr<const RayField> rays;   // final ray field
    std::shared_ptr<const RayField> low_rays;  // rays learned from the probe
    WaveField low_field;                    // probe solution
    WaveField first_field;                  // ray-FEM solution before the loop
    int outer_iterations = 0;
    bool converged = true;
    double final_tol = 0.0;
    double omega_probe = 0.0;
    double h = 0.0;
    double hc = 0.0;
    SolveStats probe_stats, solve_stats;
    double t_probe = 0.0, t_learn = 0.0, t_solve = 0.0;
};

// Mesh spacing for NPW points per (smallest) wavelength.
double mesh_size_for(double omega, int npw, double c_min);

// Coarse spacing rule h_c = h round(sqrt(h)/h).
double coarse_spacing_for(double h);

// Builds the (possibly PML-extended) solve mesh for a family at frequency
// omega, on a box whose edge is `scale` times the family domain.
Mesh build_family_mesh(const ProblemFamily& fam, double omega, int npw, double scale = 1.0);

// Assembles the problem for the family on `mesh` at frequency omega.
HelmholtzProblem make_problem(const ProblemFamily& fam, double omega, const Mesh& mesh,
                              BasisKind kind, std::shared_ptr<const RayField> rays,
                              int quad_order = 0);

IterRayResult iter_ray_fem(const ProblemFamily& fam, double omega, const IterRayConfig& cfg);

}  // namespace rayfem
