#include "rayfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rayfem {

namespace {

int stepsOf(double length, double h, const char* what) {
    const double raw = length / h;
    const int n = static_cast<int>(std::lround(raw));
    if (n < 1 || std::abs(raw - n) > 1e-9 * std::max(1.0, raw)) {
        throw std::invalid_argument(std::string(what) + ": spacing does not divide the extent");
    }
    return n;
}

}  // namespace

Mesh Mesh::build(const Rect& domain, double h, long maxNodes) {
    if (h <= 0.0) throw std::invalid_argument("Mesh::build: h must be positive");
    Mesh m;
    m.h_ = h;
    m.box_ = domain;
    m.phys_ = domain;
    m.nx_ = stepsOf(domain.width(), h, "Mesh::build (x)") + 1;
    m.nz_ = stepsOf(domain.height(), h, "Mesh::build (z)") + 1;
    if (static_cast<long>(m.nx_) * m.nz_ > maxNodes) {
        throw std::invalid_argument("Mesh::build: node count exceeds cap");
    }
    return m;
}

Mesh Mesh::extendWithPml(const Mesh& base, double width, PmlSides sides) {
    if (width < 0.0) throw std::invalid_argument("extendWithPml: negative width");
    int layers = 0;
    if (width > 0.0) {
        const double raw = width / base.h_;
        layers = static_cast<int>(std::lround(raw));
        if (std::abs(raw - layers) > 1e-9 * std::max(1.0, raw)) {
            throw std::invalid_argument("extendWithPml: width is not a multiple of h");
        }
    }
    Mesh m = base;
    const double w = layers * base.h_;
    if (sides.left) m.box_.xmin -= w;
    if (sides.right) m.box_.xmax += w;
    if (sides.bottom) m.box_.zmin -= w;
    if (sides.top) m.box_.zmax += w;
    m.phys_ = base.phys_;
    m.nx_ = stepsOf(m.box_.width(), base.h_, "extendWithPml (x)") + 1;
    m.nz_ = stepsOf(m.box_.height(), base.h_, "extendWithPml (z)") + 1;
    return m;
}

NodeTag Mesh::nodeTag(int id) const {
    const Vec2 p = nodePos(id);
    const double tol = 1e-9 * h_;
    if (p.x < phys_.xmin - tol || p.x > phys_.xmax + tol || p.z < phys_.zmin - tol ||
        p.z > phys_.zmax + tol) {
        return NodeTag::Pml;
    }
    if (isOuterBoundary(id)) return NodeTag::Boundary;
    return NodeTag::Interior;
}

std::array<int, 3> Mesh::triangle(int t) const {
    const int cell = t / 2;
    const int cx = cell % (nx_ - 1);
    const int cz = cell / (nx_ - 1);
    const int v00 = nodeId(cx, cz);
    const int v10 = nodeId(cx + 1, cz);
    const int v01 = nodeId(cx, cz + 1);
    const int v11 = nodeId(cx + 1, cz + 1);
    if (t % 2 == 0) return {v00, v10, v11};
    return {v00, v11, v01};
}

int Mesh::locate(double x, double z, std::array<double, 3>& w) const {
    const double tol = 1e-9 * h_;
    if (x < box_.xmin - tol || x > box_.xmax + tol || z < box_.zmin - tol || z > box_.zmax + tol) {
        throw std::out_of_range("Mesh::locate: point outside mesh");
    }
    double fx = (x - box_.xmin) / h_;
    double fz = (z - box_.zmin) / h_;
    int cx = std::clamp(static_cast<int>(std::floor(fx)), 0, nx_ - 2);
    int cz = std::clamp(static_cast<int>(std::floor(fz)), 0, nz_ - 2);
    const double lx = std::clamp(fx - cx, 0.0, 1.0);
    const double lz = std::clamp(fz - cz, 0.0, 1.0);
    const int t = 2 * (cz * (nx_ - 1) + cx);
    if (lx >= lz) {
        w = {1.0 - lx, lx - lz, lz};
        return t;
    }
    w = {1.0 - lz, lx, lz - lx};
    return t + 1;
}

Mesh Mesh::slabRows(int zlo, int zhi) const {
    if (zlo < 0 || zhi >= nz_ || zhi <= zlo) {
        throw std::invalid_argument("Mesh::slabRows: bad row range");
    }
    Mesh m = *this;
    m.box_.zmin = box_.zmin + zlo * h_;
    m.box_.zmax = box_.zmin + zhi * h_;
    m.nz_ = zhi - zlo + 1;
    m.phys_.zmin = std::max(phys_.zmin, m.box_.zmin);
    m.phys_.zmax = std::min(phys_.zmax, m.box_.zmax);
    return m;
}

void Mesh::dump(std::ostream& os) const {
    os << nx_ << ' ' << nz_ << ' ' << h_ << ' ' << box_.xmin << ' ' << box_.xmax << ' '
       << box_.zmin << ' ' << box_.zmax << '\n';
    for (int id = 0; id < nodeCount(); ++id) {
        const Vec2 p = nodePos(id);
        os << p.x << ' ' << p.z << ' ' << static_cast<int>(nodeTag(id)) << '\n';
    }
    for (int t = 0; t < triangleCount(); ++t) {
        const auto tri = triangle(t);
        os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
    }
}

CoarseFineMap CoarseFineMap::build(const Mesh& fine, double hc) {
    if (hc < fine.h() - 1e-12) {
        throw std::invalid_argument("CoarseFineMap: hc must be >= h");
    }
    CoarseFineMap map;
    map.fine_ = fine;
    const int step = std::max(1, static_cast<int>(std::lround(hc / fine.h())));
    map.hc_ = step * fine.h();

    auto lines = [step](int n) {
        std::vector<int> out;
        for (int i = 0; i < n - 1; i += step) out.push_back(i);
        out.push_back(n - 1);
        return out;
    };
    map.xlines_ = lines(fine.nx());
    map.zlines_ = lines(fine.nz());

    const int ncx = static_cast<int>(map.xlines_.size());
    const int ncz = static_cast<int>(map.zlines_.size());
    map.coarseToFine_.resize(static_cast<size_t>(ncx) * ncz);
    for (int cz = 0; cz < ncz; ++cz) {
        for (int cx = 0; cx < ncx; ++cx) {
            map.coarseToFine_[static_cast<size_t>(cz) * ncx + cx] =
                fine.nodeId(map.xlines_[cx], map.zlines_[cz]);
        }
    }

    // Barycentric weights of every fine node inside its coarse cell, using
    // the same diagonal split as the fine triangulation.
    map.fineBary_.resize(static_cast<size_t>(fine.nodeCount()));
    auto cellOf = [](const std::vector<int>& ls, int idx) {
        const auto it = std::upper_bound(ls.begin(), ls.end(), idx);
        return std::clamp(static_cast<int>(it - ls.begin()) - 1, 0,
                          static_cast<int>(ls.size()) - 2);
    };
    for (int id = 0; id < fine.nodeCount(); ++id) {
        const int ix = fine.nodeIx(id), iz = fine.nodeIz(id);
        const int cx = cellOf(map.xlines_, ix);
        const int cz = cellOf(map.zlines_, iz);
        const double ex = static_cast<double>(ix - map.xlines_[cx]) /
                          (map.xlines_[cx + 1] - map.xlines_[cx]);
        const double ez = static_cast<double>(iz - map.zlines_[cz]) /
                          (map.zlines_[cz + 1] - map.zlines_[cz]);
        const int c00 = cz * ncx + cx;
        const int c10 = c00 + 1;
        const int c01 = c00 + ncx;
        const int c11 = c01 + 1;
        Bary b;
        if (ex >= ez) {
            b.coarse = {c00, c10, c11};
            b.w = {1.0 - ex, ex - ez, ez};
        } else {
            b.coarse = {c00, c11, c01};
            b.w = {1.0 - ez, ex, ez - ex};
        }
        map.fineBary_[static_cast<size_t>(id)] = b;
    }
    return map;
}

}  // namespace rayfem
