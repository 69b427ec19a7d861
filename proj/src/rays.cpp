#include "rayfem/rays.hpp"

#include <ostream>
#include <stdexcept>

namespace rayfem {

RayField::RayField(int nodeCount)
    : offsets_(static_cast<size_t>(nodeCount) + 1, 0),
      prov_(static_cast<size_t>(nodeCount), RayProvenance::Fallback) {}

RayField RayField::uniform(int nodeCount, Vec2 d) {
    const Vec2 u = d.normalized();
    RayField f;
    f.offsets_.resize(static_cast<size_t>(nodeCount) + 1);
    for (int i = 0; i <= nodeCount; ++i) f.offsets_[static_cast<size_t>(i)] = i;
    f.dirs_.assign(static_cast<size_t>(nodeCount), u);
    f.prov_.assign(static_cast<size_t>(nodeCount), RayProvenance::Learned);
    return f;
}

RayField::Builder::Builder(int nodeCount, double mergeTol)
    : nodeCount_(nodeCount),
      mergeTol_(mergeTol),
      dirs_(static_cast<size_t>(nodeCount)),
      prov_(static_cast<size_t>(nodeCount), RayProvenance::Fallback),
      filled_(static_cast<size_t>(nodeCount), false) {}

void RayField::Builder::setNode(int node, const std::vector<Vec2>& dirs, RayProvenance prov) {
    if (node < 0 || node >= nodeCount_) throw std::out_of_range("RayField::Builder::setNode");
    auto& out = dirs_[static_cast<size_t>(node)];
    out.clear();
    for (const Vec2& d : dirs) {
        const double n = d.norm();
        if (n < 1e-300) throw std::invalid_argument("RayField: zero direction vector");
        const Vec2 u = {d.x / n, d.z / n};
        bool dup = false;
        for (const Vec2& e : out) {
            if (std::abs(wrapAngle(u.angle() - e.angle())) <= mergeTol_) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(u);
    }
    prov_[static_cast<size_t>(node)] = prov;
    filled_[static_cast<size_t>(node)] = !out.empty();
}

RayField RayField::Builder::finish() {
    RayField f;
    f.offsets_.resize(static_cast<size_t>(nodeCount_) + 1, 0);
    f.prov_ = prov_;
    for (int j = 0; j < nodeCount_; ++j) {
        if (!filled_[static_cast<size_t>(j)]) {
            dirs_[static_cast<size_t>(j)] = {Vec2{1.0, 0.0}};
            f.prov_[static_cast<size_t>(j)] = RayProvenance::Fallback;
        }
        f.offsets_[static_cast<size_t>(j) + 1] =
            f.offsets_[static_cast<size_t>(j)] + static_cast<int>(dirs_[static_cast<size_t>(j)].size());
    }
    f.dirs_.reserve(static_cast<size_t>(f.offsets_.back()));
    for (int j = 0; j < nodeCount_; ++j) {
        for (const Vec2& d : dirs_[static_cast<size_t>(j)]) f.dirs_.push_back(d);
    }
    return f;
}

RayField RayField::withExactRadial(const RayField& base, const Mesh& mesh, Vec2 source,
                                   double radius) {
    if (radius <= 0.0) return base;
    if (base.nodeCount() != mesh.nodeCount()) {
        throw std::invalid_argument("withExactRadial: field/mesh size mismatch");
    }
    Builder b(base.nodeCount());
    for (int j = 0; j < base.nodeCount(); ++j) {
        const Vec2 p = mesh.nodePos(j);
        const Vec2 d = p - source;
        const double dist = d.norm();
        if (dist <= radius) {
            if (dist < 1e-14) continue;  // source node: leave as fallback
            b.setNode(j, {d}, RayProvenance::ExactRadial);
        } else {
            std::vector<Vec2> dirs;
            dirs.reserve(static_cast<size_t>(base.count(j)));
            for (int l = 0; l < base.count(j); ++l) dirs.push_back(base.dir(j, l));
            b.setNode(j, dirs, base.provenance(j));
        }
    }
    return b.finish();
}

void RayField::dump(std::ostream& os, const Mesh& mesh) const {
    for (int j = 0; j < nodeCount(); ++j) {
        const Vec2 p = mesh.nodePos(j);
        os << mesh.nodeIx(j) << ' ' << mesh.nodeIz(j) << ' ' << p.x << ' ' << p.z << ' '
           << static_cast<int>(prov_[static_cast<size_t>(j)]);
        for (int l = 0; l < count(j); ++l) os << ' ' << dir(j, l).angle();
        os << '\n';
    }
}

}  // namespace rayfem
