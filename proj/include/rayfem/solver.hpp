#pragma once

#include "rayfem/assembly.hpp"
#include "rayfem/types.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <memory>
#include <vector>

namespace rayfem {

// Exact sparse solve (the oracle path). Throws on singular systems.
Eigen::VectorXcd direct_solve(const SparseSystem& sys);

// Reusable sparse LU with separable symbolic/numeric phases.
class LocalFactorization {
  public:
    explicit LocalFactorization(const Eigen::SparseMatrix<cplx>& A);
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;

  private:
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<cplx>>> lu_;
};

struct KrylovConfig {
    double tolerance = 1e-7;  // relative preconditioned residual
    int restart = 40;
    int max_iterations = 400;
};

struct GmresResult {
    Eigen::VectorXcd x;
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_history;  // relative, one entry per iteration
};

using LinearOp = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

// Left-preconditioned restarted GMRES with modified Gram-Schmidt. Returns the
// best iterate with converged = false when the budget runs out.
GmresResult gmres_solve(const LinearOp& applyA, const LinearOp& applyM, const Eigen::VectorXcd& b,
                        const KrylovConfig& config);

// Layered slab decomposition of a block-tridiagonal Helmholtz system, each
// slab reassembled on its PML-extended sub-mesh.
class LayeredPartition {
  public:
    struct Options {
        int layer_rows = 6;        // target physical rows per layer
        int pml_nodes = 6;         // interface extension rows
        double sigma_max = 0.0;    // 0 -> derived from the profile rule
        bool extra_downward_transfer = true;  // re-add downward terms in the upward pass
    };

    struct Layer {
        int z_first = 0, z_last = 0;       // physical global node rows
        int ext_below = 0, ext_above = 0;  // extension rows
        SparseSystem local;
        std::unique_ptr<LocalFactorization> factor;

        int physRows() const { return z_last - z_first + 1; }
        int localRowOfGlobal(int gz) const { return gz - (z_first - ext_below); }
    };

    static LayeredPartition build(const HelmholtzProblem& prob, const SparseSystem& global,
                                  const Options& opts);

    int layerCount() const { return static_cast<int>(layers_.size()); }
    const Layer& layer(int l) const { return layers_[static_cast<size_t>(l)]; }
    const SparseSystem& global() const { return *global_; }

    // Factorizes every local system; throws naming the layer on failure.
    void factorizeAll();
    bool factorized() const { return factorized_; }

    // One sweep of the polarized-traces Gauss-Seidel preconditioner.
    Eigen::VectorXcd applyGaussSeidel(const Eigen::VectorXcd& f) const;

  private:
    const SparseSystem* global_ = nullptr;
    std::vector<Layer> layers_;
    Options opts_;
    bool factorized_ = false;

    Eigen::VectorXcd extractRow(const Layer& L, const Eigen::VectorXcd& localSol, int gz) const;
    void addBlockProduct(const Layer& L, int rowGz, int colGz, const Eigen::VectorXcd& x,
                         double sign, Eigen::VectorXcd& rhs) const;
};

LayeredPartition build_partition(const HelmholtzProblem& prob, const SparseSystem& global,
                                 int layer_rows, int pml_nodes);

// GMRES on the global system, left-preconditioned by the partition sweep.
GmresResult solve_polarized_traces(const SparseSystem& sys, const LayeredPartition& partition,
                                   const KrylovConfig& config);

}  // namespace rayfem
