#pragma once

#include "rayfem/mesh.hpp"
#include "rayfem/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace rayfem {

enum class RayProvenance : std::uint8_t { Learned, Interpolated, ExactRadial, Fallback };

// Per-node lists of unit ray directions over a mesh, in a flat CSR layout.
// Every node has at least one direction; directions at a node are pairwise
// separated by more than the merge tolerance used when they were produced.
class RayField {
  public:
    RayField() = default;
    explicit RayField(int nodeCount);

    int nodeCount() const { return static_cast<int>(prov_.size()); }
    int count(int node) const { return offsets_[node + 1] - offsets_[node]; }
    Vec2 dir(int node, int l) const { return dirs_[static_cast<size_t>(offsets_[node] + l)]; }
    RayProvenance provenance(int node) const { return prov_[static_cast<size_t>(node)]; }

    int totalDirections() const { return static_cast<int>(dirs_.size()); }

    // Uniform field: one identical direction at every node.
    static RayField uniform(int nodeCount, Vec2 d);

    // Builder: set all directions of one node at once (normalizes inputs,
    // drops near-duplicates within mergeTol, guarantees at least one entry
    // stays if any was given). Nodes must be filled in ascending order.
    class Builder {
      public:
        explicit Builder(int nodeCount, double mergeTol = 0.0);
        void setNode(int node, const std::vector<Vec2>& dirs, RayProvenance prov);
        // Nodes never set get the fallback direction (1, 0).
        RayField finish();

      private:
        int nodeCount_;
        double mergeTol_;
        std::vector<std::vector<Vec2>> dirs_;
        std::vector<RayProvenance> prov_;
        std::vector<bool> filled_;
    };

    // Nodes within `radius` of `source` get the single exact radial direction
    // (x_j - source)/|x_j - source|. The node at the source itself (if any)
    // keeps a fallback direction instead.
    static RayField withExactRadial(const RayField& base, const Mesh& mesh, Vec2 source,
                                    double radius);

    // Per-node angle lists, one line per node: "ix iz x z prov theta...".
    void dump(std::ostream& os, const Mesh& mesh) const;

  private:
    std::vector<int> offsets_;
    std::vector<Vec2> dirs_;
    std::vector<RayProvenance> prov_;
};

}  // namespace rayfem
