#include "rayfem/ray_learning.hpp"

#include <algorithm>
#include <cmath>

namespace rayfem {

namespace {

constexpr double kMatchCut = kPi / 4.0;

struct Parent {
    const CoarseEstimate* est;
    double w;
    std::vector<bool> used;
};

}  // namespace

RayField interpolate_directions(const CoarseFineMap& map,
                                const std::vector<CoarseEstimate>& coarse) {
    const Mesh& fine = map.fine();
    if (static_cast<int>(coarse.size()) != map.coarseNodeCount()) {
        throw std::invalid_argument("interpolate_directions: estimate count mismatch");
    }

    RayField::Builder out(fine.nodeCount());
    std::vector<Parent> parents;
    std::vector<Vec2> dirs;

    for (int j = 0; j < fine.nodeCount(); ++j) {
        const auto& bary = map.fineBary(j);
        parents.clear();
        double mergeTol = 0.0;
        bool anyLearned = false;
        for (int v = 0; v < 3; ++v) {
            if (bary.w[static_cast<size_t>(v)] < 1e-12) continue;
            const CoarseEstimate& e = coarse[static_cast<size_t>(bary.coarse[static_cast<size_t>(v)])];
            parents.push_back({&e, bary.w[static_cast<size_t>(v)],
                               std::vector<bool>(e.angles.size(), false)});
            mergeTol = std::max(mergeTol, e.resolution);
            anyLearned = anyLearned || e.learned;
        }
        dirs.clear();

        if (parents.size() == 1) {
            for (double a : parents[0].est->angles) dirs.push_back(Vec2::fromAngle(a));
        } else if (!parents.empty()) {
            // Reference parent: the one with the most directions.
            size_t ref = 0;
            for (size_t p = 1; p < parents.size(); ++p) {
                if (parents[p].est->angles.size() > parents[ref].est->angles.size()) ref = p;
            }
            for (size_t ia = 0; ia < parents[ref].est->angles.size(); ++ia) {
                const double ar = parents[ref].est->angles[ia];
                parents[ref].used[ia] = true;
                // Greedy nearest match in every other parent.
                std::vector<std::pair<size_t, size_t>> group;  // (parent, angle idx)
                bool complete = true;
                for (size_t p = 0; p < parents.size(); ++p) {
                    if (p == ref) continue;
                    double best = kMatchCut;
                    size_t bestIdx = 0;
                    bool found = false;
                    for (size_t ib = 0; ib < parents[p].est->angles.size(); ++ib) {
                        if (parents[p].used[ib]) continue;
                        const double d = std::abs(wrapAngle(parents[p].est->angles[ib] - ar));
                        if (d <= best) {
                            best = d;
                            bestIdx = ib;
                            found = true;
                        }
                    }
                    if (found) {
                        group.emplace_back(p, bestIdx);
                    } else {
                        complete = false;
                    }
                }
                if (complete && !group.empty()) {
                    for (auto [p, ib] : group) parents[p].used[ib] = true;
                    // Unwrap each angle to the reference branch, then take the
                    // barycentric combination.
                    double acc = parents[ref].w * ar;
                    double wsum = parents[ref].w;
                    for (auto [p, ib] : group) {
                        const double ap = ar + wrapAngle(parents[p].est->angles[ib] - ar);
                        acc += parents[p].w * ap;
                        wsum += parents[p].w;
                    }
                    dirs.push_back(Vec2::fromAngle(acc / wsum));
                } else {
                    dirs.push_back(Vec2::fromAngle(ar));
                }
            }
            // Leftover directions from the other parents are carried through.
            for (size_t p = 0; p < parents.size(); ++p) {
                if (p == ref) continue;
                for (size_t ib = 0; ib < parents[p].est->angles.size(); ++ib) {
                    if (!parents[p].used[ib]) dirs.push_back(Vec2::fromAngle(parents[p].est->angles[ib]));
                }
            }
        }

        if (dirs.empty()) continue;  // node keeps the builder fallback (1,0)
        std::vector<Vec2> merged;
        for (const Vec2& d : dirs) {
            bool dup = false;
            for (const Vec2& e : merged) {
                if (std::abs(wrapAngle(d.angle() - e.angle())) <= mergeTol) {
                    dup = true;
                    break;
                }
            }
            if (!dup) merged.push_back(d);
        }
        RayProvenance prov = RayProvenance::Interpolated;
        if (!anyLearned) {
            prov = RayProvenance::Fallback;
        } else if (parents.size() == 1) {
            prov = RayProvenance::Learned;
        }
        out.setNode(j, merged, prov);
    }
    return out.finish();
}

RayField ray_learning(double omega_field, double hc, const WaveSpeedFn& c, const WaveField& field,
                      const Mesh& target, const NmlaConfig& cfg, const RayField* prior) {
    if (prior && prior->nodeCount() != target.nodeCount()) {
        throw std::invalid_argument("ray_learning: prior does not match the target mesh");
    }
    const CoarseFineMap map = CoarseFineMap::build(target, hc);
    const int nc = map.coarseNodeCount();
    std::vector<CoarseEstimate> est(static_cast<size_t>(nc));
    std::vector<bool> ok(static_cast<size_t>(nc), false);

    for (int cNode = 0; cNode < nc; ++cNode) {
        const Vec2 x0 = map.coarsePos(cNode);
        DirectionEstimate de;
        try {
            de = nmla(x0, field, omega_field, c, cfg);
        } catch (const NmlaDomainError&) {
        }
        auto& e = est[static_cast<size_t>(cNode)];
        if (!de.empty()) {
            e.angles = de.angles;
            e.resolution = de.resolutionWidth;
            e.learned = true;
            ok[static_cast<size_t>(cNode)] = true;
        } else if (prior) {
            const int fj = map.coarseToFine(cNode);
            for (int l = 0; l < prior->count(fj); ++l) e.angles.push_back(prior->dir(fj, l).angle());
            e.resolution = 0.0;
            e.learned = true;
            ok[static_cast<size_t>(cNode)] = true;
        }
    }

    // Failed nodes copy the nearest successful coarse node (expanding rings on
    // the coarse grid); if nothing succeeded anywhere, a single (1,0).
    const int ncx = map.coarseNx(), ncz = map.coarseNz();
    for (int cNode = 0; cNode < nc; ++cNode) {
        if (ok[static_cast<size_t>(cNode)]) continue;
        auto& e = est[static_cast<size_t>(cNode)];
        const int cx = cNode % ncx, cz = cNode / ncx;
        bool found = false;
        for (int ring = 1; ring < std::max(ncx, ncz) && !found; ++ring) {
            for (int dz = -ring; dz <= ring && !found; ++dz) {
                for (int dx = -ring; dx <= ring && !found; ++dx) {
                    if (std::max(std::abs(dx), std::abs(dz)) != ring) continue;
                    const int nx2 = cx + dx, nz2 = cz + dz;
                    if (nx2 < 0 || nx2 >= ncx || nz2 < 0 || nz2 >= ncz) continue;
                    const int other = nz2 * ncx + nx2;
                    if (ok[static_cast<size_t>(other)]) {
                        e.angles = est[static_cast<size_t>(other)].angles;
                        e.resolution = est[static_cast<size_t>(other)].resolution;
                        found = true;
                    }
                }
            }
        }
        if (!found) e.angles = {0.0};
        e.learned = false;
    }

    return interpolate_directions(map, est);
}

}  // namespace rayfem
