#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qd/topology.hpp"

#include <cmath>
#include <random>

using namespace qd;

static RasterDroplet disc_union(const std::vector<std::pair<cplx, double>>& discs, double h) {
    double lo = 1e9, hi = -1e9;
    for (auto& [c, r] : discs) {
        lo = std::min({lo, c.real() - r, c.imag() - r});
        hi = std::max({hi, c.real() + r, c.imag() + r});
    }
    RasterDroplet m = make_raster(cplx(lo - 4 * h, lo - 4 * h), cplx(hi + 4 * h, hi + 4 * h), h);
    for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i)
            for (auto& [c, r] : discs)
                if (std::abs(m.cell_center(i, j) - c) <= r) m.set(i, j, true);
    return m;
}

// k concentric circles, outermost ring filled, regions alternating inward
static RasterDroplet concentric(int k, double h) {
    std::vector<double> radii;
    for (int t = 0; t < k; ++t) radii.push_back(1.05 - 0.25 * t);
    RasterDroplet m = make_raster(cplx(-1.3, -1.3), cplx(1.3, 1.3), h);
    for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i) {
            double r = std::abs(m.cell_center(i, j));
            int outside = 0;
            for (double rr : radii)
                if (rr > r) ++outside;
            if (outside % 2 == 1) m.set(i, j, true);
        }
    return m;
}

TEST_CASE("component labeling") {
    RasterDroplet two = disc_union({{cplx(0, 0), 0.5}, {cplx(2, 0), 0.5}}, 1.0 / 32);
    CHECK(label_components(two, 4).count == 2);
    CHECK(label_components(two, 8).count == 2);
    CHECK(label_complement(two).count == 1);

    RasterDroplet ann = make_raster(cplx(-1.5, -1.5), cplx(1.5, 1.5), 1.0 / 32);
    for (int j = 0; j < ann.ny; ++j)
        for (int i = 0; i < ann.nx; ++i) {
            double r = std::abs(ann.cell_center(i, j));
            if (r >= 0.5 && r <= 1.0) ann.set(i, j, true);
        }
    CHECK(label_components(ann, 4).count == 1);
    CHECK(label_complement(ann).count == 2);
}

TEST_CASE("checkerboard convention") {
    RasterDroplet m = make_raster(cplx(0, 0), cplx(4, 4), 1.0);
    m.set(1, 1, true);
    m.set(2, 2, true);
    CHECK(label_components(m, 4).count == 2);
    CHECK(label_components(m, 8).count == 1);
    // diagonal set cells stay disconnected, so two ovals, one complement region
    TopologyReport rep = analyze(m);
    CHECK(rep.k_components == 2);
    CHECK(rep.oval_count() == 2);
    CHECK(rep.q == 1);
}

TEST_CASE("oval extraction on simple shapes") {
    RasterDroplet d = disc_union({{cplx(0, 0), 1.0}}, 1.0 / 32);
    auto ovals = extract_ovals(d);
    CHECK(ovals.size() == 1);
    // ccw orientation and perimeter close to 2 pi
    double area2 = 0.0, len = 0.0;
    auto& c = ovals[0];
    for (size_t t = 0; t < c.size(); ++t) {
        cplx a = c[t], b = c[(t + 1) % c.size()];
        area2 += a.real() * b.imag() - b.real() * a.imag();
        len += std::abs(b - a);
    }
    CHECK(area2 > 0.0);
    CHECK(std::abs(0.5 * area2 - PI) <= 0.15);
    CHECK(std::abs(len - 2 * PI) <= 2.0); // staircase length exceeds the smooth one

    RasterDroplet ann = make_raster(cplx(-1.5, -1.5), cplx(1.5, 1.5), 1.0 / 32);
    for (int j = 0; j < ann.ny; ++j)
        for (int i = 0; i < ann.nx; ++i) {
            double r = std::abs(ann.cell_center(i, j));
            if (r >= 0.5 && r <= 1.0) ann.set(i, j, true);
        }
    CHECK(extract_ovals(ann).size() == 2);
}

TEST_CASE("report on a plain disc") {
    TopologyReport rep = analyze(disc_union({{cplx(0, 0), 1.0}}, 1.0 / 32));
    CHECK(rep.k_components == 1);
    CHECK(rep.q == 1);
    CHECK(rep.oval_count() == 1);
    CHECK(rep.conn == std::vector<int>{1});
    CHECK(rep.q_odd == 1);
    auto [b1, b2] = check_ovals_bound(rep, 0);
    CHECK(b1.pass);
    CHECK(b1.lhs == 2);
    CHECK(b1.rhs == 2);
    CHECK(b1.slack == 0);
    CHECK(b2.pass); // vacuous below d = 3
}

TEST_CASE("four concentric circles") {
    TopologyReport rep = analyze(concentric(4, 1.0 / 64));
    CHECK(rep.k_components == 2);
    CHECK(rep.oval_count() == 4);
    CHECK(rep.q == 3);
    REQUIRE(rep.q_hist.size() >= 3);
    CHECK(rep.q_hist[1] == 2);
    CHECK(rep.q_hist[2] == 1);
    CHECK(rep.q_odd == 2);
    auto [b1, b2] = check_ovals_bound(rep, 4);
    CHECK(b1.pass);
    CHECK(b1.lhs == 10);
    CHECK(b1.rhs == 10);
    CHECK(b1.slack == 0);
    CHECK(b2.pass);
}

TEST_CASE("five concentric circles") {
    TopologyReport rep = analyze(concentric(5, 1.0 / 64));
    CHECK(rep.k_components == 3);
    CHECK(rep.oval_count() == 5);
    CHECK(rep.q == 3);
    REQUIRE(rep.q_hist.size() >= 3);
    CHECK(rep.q_hist[1] == 1);
    CHECK(rep.q_hist[2] == 2);
    CHECK(rep.q_odd == 1);
    auto [b1, b2] = check_ovals_bound(rep, 6);
    CHECK(b1.pass);
    CHECK(b1.lhs == 14);
    CHECK(b1.rhs == 14);
    CHECK(b2.pass); // 5 <= 10
}

TEST_CASE("oval count equals the connectivity sum on random blobs") {
    std::mt19937 rng(20260815);
    std::uniform_real_distribution<double> pos(-1.0, 1.0), rad(0.1, 0.45);
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<std::pair<cplx, double>> discs;
        int nd = 3 + (int)(rng() % 5);
        for (int t = 0; t < nd; ++t) discs.push_back({cplx(pos(rng), pos(rng)), rad(rng)});
        TopologyReport rep = analyze(disc_union(discs, 1.0 / 48));
        int sum = 0;
        for (size_t j = 1; j < rep.q_hist.size(); ++j) sum += (int)j * rep.q_hist[j];
        CHECK(rep.oval_count() == sum);
        int qsum = 0;
        for (size_t j = 0; j < rep.q_hist.size(); ++j) qsum += rep.q_hist[j];
        CHECK(rep.q == qsum);
        CHECK(rep.q_odd <= rep.q);
    }
}

TEST_CASE("connectivity bound verdicts") {
    // order 2 with one finite double node: bound min(2+1-1, 2*2-2) = 2
    BoundVerdict v = check_theorem_A(2, 1, QDKind::UQD, 2);
    CHECK(v.pass);
    CHECK(v.rhs == 2);
    CHECK(v.slack == 0);
    CHECK_FALSE(check_theorem_A(2, 1, QDKind::UQD, 3).pass);

    // order 2, node at infinity only: bound d+n-2 = 1
    BoundVerdict w = check_theorem_A(2, 1, QDKind::UQDNodeAtInfinity, 1);
    CHECK(w.pass);
    CHECK(w.rhs == 1);

    // bounded order 3 with one triple node: bound min(3+1-2, 6-4) = 2
    BoundVerdict b = check_theorem_A(3, 1, QDKind::BQD, 2);
    CHECK(b.pass);
    CHECK(b.rhs == 2);

    // below the order threshold the domain must be simply connected
    CHECK(check_theorem_A(1, 1, QDKind::UQD, 1).pass);
    CHECK_FALSE(check_theorem_A(1, 1, QDKind::UQD, 2).pass);
    CHECK(check_theorem_A(0, 1, QDKind::UQD, 1).pass);
    CHECK(check_theorem_A(2, 1, QDKind::BQD, 1).pass);

    CHECK_THROWS_AS(check_theorem_A(2, 4, QDKind::UQD, 1), KindDomainMismatch);
    CHECK_THROWS_AS(check_theorem_A(2, 0, QDKind::UQD, 1), KindDomainMismatch);
}

TEST_CASE("packing verdicts") {
    BoundVerdict d9 = packing_check(PackingKind::DiscsInDisc, 9, 16);
    CHECK(d9.pass);
    CHECK(d9.slack == 0);
    CHECK_FALSE(packing_check(PackingKind::DiscsInDisc, 9, 17).pass);

    BoundVerdict c7 = packing_check(PackingKind::CardioidsInEllipse, 7, 21);
    CHECK(c7.pass);
    CHECK(c7.slack == 0);

    BoundVerdict d2 = packing_check(PackingKind::DiscsInDisc, 2, 2);
    CHECK(d2.pass);
    CHECK(d2.slack == 0);
}
