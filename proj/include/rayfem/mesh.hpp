#pragma once

#include "rayfem/types.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace rayfem {

struct Rect {
    double xmin = 0.0, xmax = 0.0, zmin = 0.0, zmax = 0.0;
    double width() const { return xmax - xmin; }
    double height() const { return zmax - zmin; }
    bool contains(double x, double z) const {
        return x >= xmin && x <= xmax && z >= zmin && z <= zmax;
    }
};

enum class NodeTag : std::uint8_t { Interior, Boundary, Pml };

struct PmlSides {
    bool left = true, right = true, bottom = true, top = true;
    static PmlSides all() { return {}; }
    static PmlSides none() { return {false, false, false, false}; }
};

// Structured triangulation of an axis-aligned rectangle. Nodes are ordered
// lexicographically by depth row (z) then x, so assembled matrices are block
// tridiagonal with one block per constant-z row. Each square cell is split
// along the bottom-left to top-right diagonal.
class Mesh {
  public:
    Mesh() = default;

    // Uniform mesh over `domain` with spacing `h` (must divide the edges).
    // Throws if the resulting node count exceeds `maxNodes`.
    static Mesh build(const Rect& domain, double h, long maxNodes = 20000000L);

    // Copy of `base` enlarged by `width` (a multiple of h) on the selected
    // sides; added nodes are tagged Pml. Original nodes keep their relative
    // lexicographic order.
    static Mesh extendWithPml(const Mesh& base, double width, PmlSides sides = PmlSides::all());

    int nx() const { return nx_; }
    int nz() const { return nz_; }
    double h() const { return h_; }
    int nodeCount() const { return nx_ * nz_; }
    int triangleCount() const { return 2 * (nx_ - 1) * (nz_ - 1); }

    const Rect& box() const { return box_; }            // full box including PML
    const Rect& physicalBox() const { return phys_; }   // PML-free interior box

    int nodeId(int ix, int iz) const { return iz * nx_ + ix; }
    int nodeIx(int id) const { return id % nx_; }
    int nodeIz(int id) const { return id / nx_; }
    Vec2 nodePos(int id) const { return nodePos(nodeIx(id), nodeIz(id)); }
    Vec2 nodePos(int ix, int iz) const {
        return {box_.xmin + ix * h_, box_.zmin + iz * h_};
    }

    NodeTag nodeTag(int id) const;
    bool isPmlNode(int id) const { return nodeTag(id) == NodeTag::Pml; }

    // Triangles of cell (cx, cz): lower = (v00, v10, v11), upper = (v00, v11, v01).
    std::array<int, 3> triangle(int t) const;

    // Node on the outer boundary of the full box.
    bool isOuterBoundary(int id) const {
        const int ix = nodeIx(id), iz = nodeIz(id);
        return ix == 0 || ix == nx_ - 1 || iz == 0 || iz == nz_ - 1;
    }

    // Locate the triangle containing (x, z); barycentric weights of its three
    // vertices are written to `w`. Throws if outside the box.
    int locate(double x, double z, std::array<double, 3>& w) const;

    // Sub-mesh spanning node rows [zlo, zhi] of this mesh (same x extent).
    Mesh slabRows(int zlo, int zhi) const;

    // Plain-text dump: header (nx nz h box) followed by node and triangle lists.
    void dump(std::ostream& os) const;

  private:
    int nx_ = 0, nz_ = 0;
    double h_ = 0.0;
    Rect box_;
    Rect phys_;
};

// Maps between a fine mesh and a coarse grid whose nodes coincide with fine
// nodes. The coarse grid is a tensor grid of fine-node index lines; the last
// interval on each axis may be shorter so the boundary is always covered.
class CoarseFineMap {
  public:
    // `hc` is the target coarse spacing; it is rounded to a whole number of
    // fine steps. Throws if hc < h.
    static CoarseFineMap build(const Mesh& fine, double hc);

    const Mesh& fine() const { return fine_; }
    int coarseNodeCount() const { return static_cast<int>(coarseToFine_.size()); }
    int coarseNx() const { return static_cast<int>(xlines_.size()); }
    int coarseNz() const { return static_cast<int>(zlines_.size()); }

    // Fine node id of coarse node c.
    int coarseToFine(int c) const { return coarseToFine_[c]; }
    Vec2 coarsePos(int c) const { return fine_.nodePos(coarseToFine_[c]); }

    struct Bary {
        std::array<int, 3> coarse;   // coarse node indices
        std::array<double, 3> w;     // weights in [0,1], summing to 1
    };
    const Bary& fineBary(int fineNode) const { return fineBary_[fineNode]; }

    double coarseSpacing() const { return hc_; }

  private:
    Mesh fine_;
    double hc_ = 0.0;
    std::vector<int> xlines_, zlines_;   // fine index lines of the coarse grid
    std::vector<int> coarseToFine_;
    std::vector<Bary> fineBary_;
};

}  // namespace rayfem
