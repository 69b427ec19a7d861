#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rayfem/mesh.hpp"

#include <cmath>
#include <set>

using namespace rayfem;

namespace {

double signedArea(const Mesh& m, int t) {
    const auto tri = m.triangle(t);
    const Vec2 a = m.nodePos(tri[0]), b = m.nodePos(tri[1]), c = m.nodePos(tri[2]);
    return 0.5 * ((b.x - a.x) * (c.z - a.z) - (c.x - a.x) * (b.z - a.z));
}

}  // namespace

TEST_CASE("single cell") {
    const Mesh m = Mesh::build({0.0, 1.0, 0.0, 1.0}, 1.0);
    CHECK(m.nodeCount() == 4);
    CHECK(m.triangleCount() == 2);
}

TEST_CASE("unit square at 1/h = 120") {
    const Mesh m = Mesh::build({-0.5, 0.5, -0.5, 0.5}, 1.0 / 120.0);
    CHECK(m.nx() == 121);
    CHECK(m.nz() == 121);
    CHECK(m.nodeCount() == 121 * 121);
    CHECK(m.triangleCount() == 2 * 120 * 120);
}

TEST_CASE("triangles have positive area and tile the domain") {
    const Mesh m = Mesh::build({-0.5, 0.5, -0.25, 0.25}, 1.0 / 16.0);
    double total = 0.0;
    for (int t = 0; t < m.triangleCount(); ++t) {
        const double a = signedArea(m, t);
        CHECK(a > 0.0);
        total += a;
    }
    CHECK(total == doctest::Approx(m.box().width() * m.box().height()).epsilon(1e-12));
}

TEST_CASE("lexicographic ordering keeps adjacency within one depth row") {
    const Mesh m = Mesh::build({0.0, 1.0, 0.0, 1.0}, 0.25);
    for (int t = 0; t < m.triangleCount(); ++t) {
        const auto tri = m.triangle(t);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                CHECK(std::abs(m.nodeIz(tri[a]) - m.nodeIz(tri[b])) <= 1);
            }
        }
    }
}

TEST_CASE("node count cap") {
    CHECK_THROWS_AS(Mesh::build({0.0, 1.0, 0.0, 1.0}, 1e-5, 1000), std::invalid_argument);
}

TEST_CASE("extend_with_pml") {
    const Mesh base = Mesh::build({-0.5, 0.5, -0.5, 0.5}, 0.1);

    SUBCASE("width zero is the identity") {
        const Mesh e = Mesh::extendWithPml(base, 0.0);
        CHECK(e.nx() == base.nx());
        CHECK(e.nz() == base.nz());
        CHECK(e.box().xmin == base.box().xmin);
    }

    SUBCASE("five layers on every side") {
        const Mesh e = Mesh::extendWithPml(base, 0.5);
        CHECK(e.nx() == base.nx() + 10);
        CHECK(e.nz() == base.nz() + 10);

        // The PML-tagged set is exactly the added frame.
        int pml = 0;
        for (int id = 0; id < e.nodeCount(); ++id) {
            const bool inPhys = e.physicalBox().contains(e.nodePos(id).x, e.nodePos(id).z);
            CHECK(e.isPmlNode(id) == !inPhys);
            if (e.isPmlNode(id)) ++pml;
        }
        CHECK(pml == e.nodeCount() - base.nodeCount());

        // Restriction to the physical nodes returns the original coordinates.
        for (int iz = 0; iz < base.nz(); ++iz) {
            for (int ix = 0; ix < base.nx(); ++ix) {
                const Vec2 p = base.nodePos(ix, iz);
                const Vec2 q = e.nodePos(ix + 5, iz + 5);
                CHECK(p.x == doctest::Approx(q.x).epsilon(1e-15));
                CHECK(p.z == doctest::Approx(q.z).epsilon(1e-15));
            }
        }
    }

    SUBCASE("non-multiple width is rejected") {
        CHECK_THROWS_AS(Mesh::extendWithPml(base, 0.15), std::invalid_argument);
    }
}

TEST_CASE("locate returns barycentric weights that reproduce linears") {
    const Mesh m = Mesh::build({0.0, 1.0, 0.0, 1.0}, 0.2);
    auto lin = [](double x, double z) { return 2.0 + 3.0 * x - 7.0 * z; };
    for (double x = 0.013; x < 1.0; x += 0.9 / 7) {
        for (double z = 0.027; z < 1.0; z += 0.9 / 7) {
            std::array<double, 3> w;
            const int t = m.locate(x, z, w);
            const auto tri = m.triangle(t);
            double v = 0.0, sum = 0.0;
            for (int i = 0; i < 3; ++i) {
                const Vec2 p = m.nodePos(tri[i]);
                v += w[i] * lin(p.x, p.z);
                sum += w[i];
                CHECK(w[i] >= -1e-12);
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(v == doctest::Approx(lin(x, z)).epsilon(1e-12));
        }
    }
    std::array<double, 3> wOut;
    CHECK_THROWS_AS(m.locate(2.0, 0.5, wOut), std::out_of_range);
}

TEST_CASE("coarse map with hc = h is the identity") {
    const Mesh m = Mesh::build({0.0, 1.0, 0.0, 1.0}, 0.125);
    const CoarseFineMap map = CoarseFineMap::build(m, 0.125);
    CHECK(map.coarseNodeCount() == m.nodeCount());
    for (int c = 0; c < map.coarseNodeCount(); ++c) CHECK(map.coarseToFine(c) == c);
}

TEST_CASE("coarse map at the paper's resolution") {
    const double h = 1.0 / 120.0;
    const Mesh m = Mesh::build({-0.5, 0.5, -0.5, 0.5}, h);
    const double hc = h * std::round(std::sqrt(h) / h);
    const CoarseFineMap map = CoarseFineMap::build(m, hc);

    const double invHc = 1.0 / map.coarseSpacing();
    CHECK(invHc >= 10.0);
    CHECK(invHc <= 12.0);

    // Every coarse node coincides with a fine node.
    for (int c = 0; c < map.coarseNodeCount(); ++c) {
        const Vec2 p = map.coarsePos(c);
        const double gx = (p.x + 0.5) / h, gz = (p.z + 0.5) / h;
        CHECK(std::abs(gx - std::round(gx)) < 1e-14);
        CHECK(std::abs(gz - std::round(gz)) < 1e-14);
    }
}

TEST_CASE("barycentric interpolation through the map is exact on linears") {
    const Mesh m = Mesh::build({0.0, 1.0, 0.0, 1.0}, 1.0 / 64.0);
    const CoarseFineMap map = CoarseFineMap::build(m, 1.0 / 8.0);
    auto lin = [](double x, double z) { return -1.0 + 0.5 * x + 2.25 * z; };
    for (int j = 0; j < m.nodeCount(); ++j) {
        const auto& b = map.fineBary(j);
        double v = 0.0;
        for (int i = 0; i < 3; ++i) {
            const Vec2 p = map.coarsePos(b.coarse[i]);
            v += b.w[i] * lin(p.x, p.z);
        }
        const Vec2 q = m.nodePos(j);
        CHECK(v == doctest::Approx(lin(q.x, q.z)).epsilon(1e-12));
    }
}

TEST_CASE("hc below h is rejected") {
    const Mesh m = Mesh::build({0.0, 1.0, 0.0, 1.0}, 0.125);
    CHECK_THROWS_AS(CoarseFineMap::build(m, 0.0625), std::invalid_argument);
}
