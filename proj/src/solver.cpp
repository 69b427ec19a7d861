#include "rayfem/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rayfem {

Eigen::VectorXcd direct_solve(const SparseSystem& sys) {
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    lu.compute(sys.H);
    if (lu.info() != Eigen::Success) {
        throw std::runtime_error("direct_solve: factorization failed (singular system?)");
    }
    Eigen::VectorXcd x = lu.solve(sys.b);
    if (lu.info() != Eigen::Success) {
        throw std::runtime_error("direct_solve: solve failed");
    }
    return x;
}

LocalFactorization::LocalFactorization(const Eigen::SparseMatrix<cplx>& A)
    : lu_(std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<cplx>>>()) {
    lu_->analyzePattern(A);
    lu_->factorize(A);
    if (lu_->info() != Eigen::Success) {
        throw std::runtime_error("LocalFactorization: factorization failed");
    }
}

Eigen::VectorXcd LocalFactorization::solve(const Eigen::VectorXcd& rhs) const {
    return lu_->solve(rhs);
}

GmresResult gmres_solve(const LinearOp& applyA, const LinearOp& applyM, const Eigen::VectorXcd& b,
                        const KrylovConfig& config) {
    if (config.tolerance <= 0.0) throw std::invalid_argument("gmres_solve: tolerance must be > 0");
    const int n = static_cast<int>(b.size());
    const int m = std::max(1, config.restart);

    GmresResult res;
    res.x = Eigen::VectorXcd::Zero(n);

    const Eigen::VectorXcd Mb = applyM(b);
    const double normb = Mb.norm();
    if (normb == 0.0) {
        res.converged = true;
        return res;
    }

    Eigen::MatrixXcd V(n, m + 1);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
    std::vector<cplx> cs(static_cast<size_t>(m)), sn(static_cast<size_t>(m));
    Eigen::VectorXcd g(m + 1);

    while (res.iterations < config.max_iterations) {
        Eigen::VectorXcd r = Mb - applyM(applyA(res.x));
        const double beta = r.norm();
        if (beta / normb <= config.tolerance) {
            res.converged = true;
            return res;
        }
        V.col(0) = r / beta;
        g.setZero();
        g(0) = beta;

        int j = 0;
        for (; j < m && res.iterations < config.max_iterations; ++j) {
            ++res.iterations;
            Eigen::VectorXcd w = applyM(applyA(V.col(j)));
            for (int i = 0; i <= j; ++i) {
                H(i, j) = V.col(i).dot(w);  // conjugated in the first argument
                w -= H(i, j) * V.col(i);
            }
            H(j + 1, j) = w.norm();
            if (std::abs(H(j + 1, j)) > 1e-300) {
                V.col(j + 1) = w / H(j + 1, j);
            }

            // Apply previous Givens rotations, then create the new one.
            for (int i = 0; i < j; ++i) {
                const cplx t = std::conj(cs[static_cast<size_t>(i)]) * H(i, j) +
                               std::conj(sn[static_cast<size_t>(i)]) * H(i + 1, j);
                H(i + 1, j) = -sn[static_cast<size_t>(i)] * H(i, j) +
                              cs[static_cast<size_t>(i)] * H(i + 1, j);
                H(i, j) = t;
            }
            const double denom = std::sqrt(std::norm(H(j, j)) + std::norm(H(j + 1, j)));
            if (denom > 1e-300) {
                cs[static_cast<size_t>(j)] = H(j, j) / denom;
                sn[static_cast<size_t>(j)] = H(j + 1, j) / denom;
            } else {
                cs[static_cast<size_t>(j)] = 1.0;
                sn[static_cast<size_t>(j)] = 0.0;
            }
            H(j, j) = std::conj(cs[static_cast<size_t>(j)]) * H(j, j) +
                      std::conj(sn[static_cast<size_t>(j)]) * H(j + 1, j);
            H(j + 1, j) = 0.0;
            const cplx gj = g(j);
            g(j) = std::conj(cs[static_cast<size_t>(j)]) * gj;
            g(j + 1) = -sn[static_cast<size_t>(j)] * gj;

            const double rel = std::abs(g(j + 1)) / normb;
            res.residual_history.push_back(rel);
            if (rel <= config.tolerance) {
                ++j;
                break;
            }
        }

        // x += V y with y from the triangular system H y = g.
        Eigen::VectorXcd y(j);
        for (int i = j - 1; i >= 0; --i) {
            cplx s = g(i);
            for (int k2 = i + 1; k2 < j; ++k2) s -= H(i, k2) * y(k2);
            y(i) = s / H(i, i);
        }
        for (int i = 0; i < j; ++i) res.x += y(i) * V.col(i);

        if (!res.residual_history.empty() && res.residual_history.back() <= config.tolerance) {
            res.converged = true;
            return res;
        }
    }
    return res;
}

LayeredPartition LayeredPartition::build(const HelmholtzProblem& prob, const SparseSystem& global,
                                         const Options& opts) {
    if (opts.layer_rows < 1) throw std::invalid_argument("build_partition: layer_rows must be >= 1");
    LayeredPartition part;
    part.global_ = &global;
    part.opts_ = opts;

    const int nz = prob.mesh.nz();
    const int L = std::max(1, (nz + opts.layer_rows - 1) / opts.layer_rows);
    if (L > 1 && opts.pml_nodes < 1) {
        throw std::invalid_argument("build_partition: interface PML needs at least one row");
    }
    // Distribute rows as evenly as possible; every layer keeps >= 1 row.
    const int base = nz / L, extra = nz % L;

    double smax = opts.sigma_max;
    if (smax <= 0.0) {
        double cmax = 0.0;
        for (int j = 0; j < prob.mesh.nodeCount(); ++j) {
            const Vec2 p = prob.mesh.nodePos(j);
            cmax = std::max(cmax, prob.c(p.x, p.z));
        }
        smax = PMLProfile::sigmaMaxFor(opts.pml_nodes * prob.mesh.h(), cmax);
    }

    int row = 0;
    for (int l = 0; l < L; ++l) {
        Layer lay;
        lay.z_first = row;
        row += base + (l < extra ? 1 : 0);
        lay.z_last = row - 1;
        lay.ext_below = lay.z_first > 0 ? std::min(opts.pml_nodes, lay.z_first) : 0;
        lay.ext_above = lay.z_last < nz - 1 ? std::min(opts.pml_nodes, nz - 1 - lay.z_last) : 0;

        SlabSpec spec;
        spec.z_first = lay.z_first;
        spec.z_last = lay.z_last;
        spec.ext_below = lay.ext_below;
        spec.ext_above = lay.ext_above;
        spec.iface_sigma_max = smax;
        lay.local = assemble_slab(prob, spec);
        part.layers_.push_back(std::move(lay));
    }
    return part;
}

LayeredPartition build_partition(const HelmholtzProblem& prob, const SparseSystem& global,
                                 int layer_rows, int pml_nodes) {
    LayeredPartition::Options opts;
    opts.layer_rows = layer_rows;
    opts.pml_nodes = pml_nodes;
    return LayeredPartition::build(prob, global, opts);
}

void LayeredPartition::factorizeAll() {
    for (size_t l = 0; l < layers_.size(); ++l) {
        try {
            layers_[l].factor = std::make_unique<LocalFactorization>(layers_[l].local.H);
        } catch (const std::exception& e) {
            throw std::runtime_error("factorize_all: layer " + std::to_string(l) + ": " + e.what());
        }
    }
    factorized_ = true;
}

Eigen::VectorXcd LayeredPartition::extractRow(const Layer& L, const Eigen::VectorXcd& localSol,
                                              int gz) const {
    const int lr = L.localRowOfGlobal(gz);
    const auto& rs = L.local.rowDofStart();
    const int lo = rs[static_cast<size_t>(lr)], hi = rs[static_cast<size_t>(lr) + 1];
    return localSol.segment(lo, hi - lo);
}

void LayeredPartition::addBlockProduct(const Layer& L, int rowGz, int colGz,
                                       const Eigen::VectorXcd& x, double sign,
                                       Eigen::VectorXcd& rhs) const {
    const auto& rs = L.local.rowDofStart();
    const int rA = L.localRowOfGlobal(rowGz);
    const int rB = L.localRowOfGlobal(colGz);
    const int rowLo = rs[static_cast<size_t>(rA)], rowHi = rs[static_cast<size_t>(rA) + 1];
    const int colLo = rs[static_cast<size_t>(rB)], colHi = rs[static_cast<size_t>(rB) + 1];
    const auto& H = L.local.H;
    for (int c = colLo; c < colHi; ++c) {
        const cplx xc = x[c - colLo];
        if (xc == cplx(0.0, 0.0)) continue;
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(H, c); it; ++it) {
            const int r = static_cast<int>(it.row());
            if (r >= rowLo && r < rowHi) rhs[r] += sign * it.value() * xc;
        }
    }
}

Eigen::VectorXcd LayeredPartition::applyGaussSeidel(const Eigen::VectorXcd& f) const {
    if (!factorized_) throw std::logic_error("gs_preconditioner: partition not factorized");
    const auto& grs = global_->rowDofStart();
    const int L = layerCount();

    auto injectSource = [&](const Layer& lay) {
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(lay.local.dim());
        const auto& lrs = lay.local.rowDofStart();
        for (int gz = lay.z_first; gz <= lay.z_last; ++gz) {
            const int lr = lay.localRowOfGlobal(gz);
            const int n = grs[static_cast<size_t>(gz) + 1] - grs[static_cast<size_t>(gz)];
            rhs.segment(lrs[static_cast<size_t>(lr)], n) = f.segment(grs[static_cast<size_t>(gz)], n);
        }
        return rhs;
    };

    // Transfer from the solved neighbor below (layer l-1) into layer l,
    // entering through layer l's first physical row and the extension row
    // just before it.
    auto addTransferFromBelow = [&](int l, const Eigen::VectorXcd& below, Eigen::VectorXcd& rhs) {
        const Layer& lay = layers_[static_cast<size_t>(l)];
        const Layer& don = layers_[static_cast<size_t>(l) - 1];
        const int gzIn = lay.z_first;       // first physical row of the receiver
        const int gzOut = lay.z_first - 1;  // last physical row of the donor
        const Eigen::VectorXcd tPhys = extractRow(don, below, gzOut);
        const Eigen::VectorXcd tExt = extractRow(don, below, gzIn);
        addBlockProduct(lay, gzIn, gzOut, tPhys, -1.0, rhs);
        addBlockProduct(lay, gzOut, gzIn, tExt, +1.0, rhs);
    };
    auto addTransferFromAbove = [&](int l, const Eigen::VectorXcd& above, Eigen::VectorXcd& rhs) {
        const Layer& lay = layers_[static_cast<size_t>(l)];
        const Layer& don = layers_[static_cast<size_t>(l) + 1];
        const int gzIn = lay.z_last;        // last physical row of the receiver
        const int gzOut = lay.z_last + 1;   // first physical row of the donor
        const Eigen::VectorXcd tPhys = extractRow(don, above, gzOut);
        const Eigen::VectorXcd tExt = extractRow(don, above, gzIn);
        addBlockProduct(lay, gzIn, gzOut, tPhys, -1.0, rhs);
        addBlockProduct(lay, gzOut, gzIn, tExt, +1.0, rhs);
    };

    // Forward sweep.
    std::vector<Eigen::VectorXcd> w(static_cast<size_t>(L));
    for (int l = 0; l < L; ++l) {
        const Layer& lay = layers_[static_cast<size_t>(l)];
        Eigen::VectorXcd rhs = injectSource(lay);
        if (l > 0) addTransferFromBelow(l, w[static_cast<size_t>(l) - 1], rhs);
        w[static_cast<size_t>(l)] = lay.factor->solve(rhs);
    }

    // Backward sweep; the forward transfer terms are re-added so one
    // application carries information both ways.
    std::vector<Eigen::VectorXcd> u(static_cast<size_t>(L));
    for (int l = L - 1; l >= 0; --l) {
        const Layer& lay = layers_[static_cast<size_t>(l)];
        Eigen::VectorXcd rhs = injectSource(lay);
        if (l < L - 1) addTransferFromAbove(l, u[static_cast<size_t>(l) + 1], rhs);
        if (l > 0 && opts_.extra_downward_transfer) {
            addTransferFromBelow(l, w[static_cast<size_t>(l) - 1], rhs);
        }
        u[static_cast<size_t>(l)] = lay.factor->solve(rhs);
    }

    // Concatenate the physical rows.
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(global_->dim());
    for (int l = 0; l < L; ++l) {
        const Layer& lay = layers_[static_cast<size_t>(l)];
        const auto& lrs = lay.local.rowDofStart();
        for (int gz = lay.z_first; gz <= lay.z_last; ++gz) {
            const int lr = lay.localRowOfGlobal(gz);
            const int n = grs[static_cast<size_t>(gz) + 1] - grs[static_cast<size_t>(gz)];
            out.segment(grs[static_cast<size_t>(gz)], n) =
                u[static_cast<size_t>(l)].segment(lrs[static_cast<size_t>(lr)], n);
        }
    }
    return out;
}

GmresResult solve_polarized_traces(const SparseSystem& sys, const LayeredPartition& partition,
                                   const KrylovConfig& config) {
    const LinearOp A = [&sys](const Eigen::VectorXcd& x) { return Eigen::VectorXcd(sys.H * x); };
    const LinearOp M = [&partition](const Eigen::VectorXcd& r) {
        return partition.applyGaussSeidel(r);
    };
    return gmres_solve(A, M, sys.b, config);
}

}  // namespace rayfem
