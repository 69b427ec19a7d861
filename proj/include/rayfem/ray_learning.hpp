#pragma once

#include "rayfem/mesh.hpp"
#include "rayfem/nmla.hpp"
#include "rayfem/rays.hpp"
#include "rayfem/wavefield.hpp"

#include <optional>
#include <vector>

namespace rayfem {

// Direction estimate at one coarse node, ready for interpolation.
struct CoarseEstimate {
    std::vector<double> angles;
    double resolution = 0.0;  // merge tolerance carried into interpolation
    bool learned = false;     // false when filled by a fallback rule
};

// Barycentric interpolation of coarse-node direction estimates to every fine
// node. Directions are matched across the parent nodes by greedy angular
// nearest-neighbor with a cut at pi/4; matched groups are interpolated in
// angle (after unwrapping), unmatched ones are carried through unchanged.
RayField interpolate_directions(const CoarseFineMap& map,
                                const std::vector<CoarseEstimate>& coarse);

// Ray learning: NMLA at every coarse node of `target` (sampling `field`,
// whose mesh may be larger), fallbacks for failed nodes, then interpolation
// onto the fine nodes of `target`. When `prior` is given, nodes where NMLA
// fails keep the prior's directions instead of copying a neighbor's.
RayField ray_learning(double omega_field, double hc, const WaveSpeedFn& c, const WaveField& field,
                      const Mesh& target, const NmlaConfig& cfg,
                      const RayField* prior = nullptr);

}  // namespace rayfem
