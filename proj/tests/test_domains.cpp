#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qd/domain.hpp"
#include "qd/raster.hpp"

#include <cmath>

using namespace qd;

#define CHECK_NEAR(a, b, tol) CHECK(std::abs((a) - (b)) <= (tol))

static DomainSpec poly3() {
    double b = -2.0 * std::sqrt(2.0) / 3.0;
    Rational phi(Polynomial({0.0, 1.0, b, 1.0 / 3.0}), Polynomial::constant(1.0), false);
    return riemann_map(phi, false, "poly3");
}

TEST_CASE("preset validation") {
    CHECK_THROWS_AS((void)disc(0.0, -1.0), DegenerateSpec);
    CHECK_THROWS_AS((void)limacon(1.0, 0.7), DegenerateSpec);
    CHECK_THROWS_AS((void)neumann_oval(1.0, 1.5), DegenerateSpec);
    CHECK_THROWS_AS((void)ellipse_exterior(1.0, 2.0), DegenerateSpec);
}

TEST_CASE("disc quadrature data") {
    DomainSpec s = disc(cplx(2.0, 1.0), 0.7);
    QuadratureData d = quadrature_data(s);
    REQUIRE(d.terms.size() == 1);
    CHECK_NEAR(d.terms[0].a.z, cplx(2.0, 1.0), 1e-12);
    CHECK(d.terms[0].m == 0);
    CHECK_NEAR(d.terms[0].c, cplx(PI * 0.49), 1e-12);
    CHECK(d.order() == 1);
}

TEST_CASE("cardioid quadrature data: double node at the center") {
    DomainSpec s = cardioid(1.0);
    QuadratureData d = quadrature_data(s);
    REQUIRE(d.terms.size() == 2);
    cplx c0, c1;
    for (auto& t : d.terms) {
        REQUIRE(!t.a.inf);
        CHECK_NEAR(t.a.z, cplx(0.0), 1e-10);
        if (t.m == 0) c0 = t.c;
        if (t.m == 1) c1 = t.c;
    }
    CHECK_NEAR(c0, cplx(1.5 * PI), 1e-9);
    CHECK_NEAR(c1, cplx(0.5 * PI), 1e-9);
    CHECK(d.order() == 2);
    CHECK(d.node_count() == 1);
    CHECK(d.max_finite_multiplicity() == 2);
}

TEST_CASE("exterior disc quadrature data: constant part only") {
    DomainSpec s = exterior_disc(cplx(0.3, 0.0), 1.0);
    QuadratureData d = quadrature_data(s);
    REQUIRE(d.terms.size() == 1);
    CHECK(d.terms[0].a.inf);
    CHECK(d.terms[0].m == 0);
    CHECK_NEAR(d.terms[0].c, cplx(0.3), 1e-12);
    CHECK(d.order() == 0);
    CHECK(d.node_count() == 0);
}

TEST_CASE("neumann oval: two simple nodes") {
    DomainSpec s = neumann_oval(1.0, 0.5);
    QuadratureData d = quadrature_data(s);
    REQUIRE(d.terms.size() == 2);
    // nodes are symmetric about 0
    CHECK_NEAR(d.terms[0].a.z + d.terms[1].a.z, cplx(0.0), 1e-9);
    CHECK(d.order() == 2);
    CHECK(d.node_count() == 2);
    CHECK(d.max_finite_multiplicity() == 1);
}

TEST_CASE("areas") {
    CHECK_NEAR(area(disc(cplx(1.0, -2.0), 0.8)), PI * 0.64, 1e-10);
    CHECK_NEAR(area(cardioid(1.0)), 1.5 * PI, 1e-10);
    CHECK_NEAR(area(poly3()), 28.0 * PI / 9.0, 1e-10);
    // unbounded: area of the complement
    CHECK_NEAR(area(exterior_disc(cplx(0.3, 0.0), 1.0)), PI, 1e-10);
    CHECK_NEAR(area(ellipse_exterior(2.0, 1.0)), 2.0 * PI, 1e-10);
}

TEST_CASE("boundary orientation keeps the domain on the left") {
    auto shoelace = [](const std::vector<BoundaryPoint>& bd) {
        double a = 0.0;
        for (size_t i = 0; i < bd.size(); ++i) {
            cplx u = bd[i].z, v = bd[(i + 1) % bd.size()].z;
            a += u.real() * v.imag() - u.imag() * v.real();
        }
        return 0.5 * a;
    };
    CHECK(shoelace(boundary(cardioid(1.0), 512)) > 0.0);        // ccw around Omega
    CHECK(shoelace(boundary(exterior_disc(0.0, 1.0), 512)) < 0.0); // cw around K
    CHECK(shoelace(boundary(ellipse_exterior(2.0, 1.0), 512)) < 0.0);
}

TEST_CASE("schwarz function on the boundary and inside") {
    for (auto spec : {cardioid(1.0), poly3(), limacon(1.0, 0.4)}) {
        auto bd = boundary(spec, 64);
        for (auto& b : bd) {
            CPoint s = schwarz_eval(spec, b.z);
            REQUIRE(!s.inf);
            CHECK_NEAR(s.z, std::conj(b.z), 1e-8 * (1.0 + std::abs(b.z)));
        }
    }
    // interior value of the cardioid continuation: S(phi(w)) = 1/w + 1/(2 w^2)
    DomainSpec c = cardioid(1.0);
    cplx w(0.5, 0.0);
    cplx z = c.phi(w);
    CHECK_NEAR(schwarz_eval(c, z).z, cplx(4.0), 1e-9);
}

TEST_CASE("map inversion across the reference disc") {
    DomainSpec s = poly3();
    for (double r : {0.2, 0.6, 0.9, 1.0}) {
        for (int k = 0; k < 16; ++k) {
            cplx w = std::polar(r, 2.0 * PI * (k + 0.3) / 16);
            cplx z = s.phi(w);
            CHECK_NEAR(map_inverse(s, z), w, 1e-9);
        }
    }
    CHECK_THROWS_AS((void)map_inverse(poly3(), cplx(50.0, 50.0)), InversionFailure);
}

TEST_CASE("univalence reports") {
    // phi = w + w^2 has a vanishing derivative at -1/2, inside the disc
    Rational bad(Polynomial({0.0, 1.0, 1.0}), Polynomial::constant(1.0), false);
    UnivalenceReport r1 = univalence_check(riemann_map(bad, false, "bad"));
    CHECK(!r1.ok);

    UnivalenceReport r2 = univalence_check(cardioid(1.0));
    CHECK(r2.ok);
    REQUIRE(r2.cusp_params.size() == 1);
    CHECK_NEAR(r2.cusp_params[0], PI, 1e-7);

    UnivalenceReport r3 = univalence_check(poly3());
    CHECK(r3.ok);
    REQUIRE(r3.cusp_params.size() == 2);
    double th = std::atan(1.0 / (2.0 * std::sqrt(2.0)));
    CHECK_NEAR(r3.cusp_params[0], -th, 1e-7);
    CHECK_NEAR(r3.cusp_params[1], th, 1e-7);

    UnivalenceReport r4 = univalence_check(neumann_oval(1.0, 0.5));
    CHECK(r4.ok);
    CHECK(r4.cusp_params.empty());
    CHECK(r4.nearest_selfdist > 0.0);
}

TEST_CASE("moments of origin-enclosing complements") {
    DomainSpec s = exterior_disc(cplx(0.3, 0.0), 1.0);
    Moments mo = moments(s, 3);
    CHECK_NEAR(mo.m[0], cplx(PI), 1e-10);
    CHECK_NEAR(mo.m[1], cplx(-0.3 * PI), 1e-10);
    CHECK(mo.relation_residual >= 0.0);
    CHECK(mo.relation_residual <= 1e-8);

    DomainSpec e = ellipse_exterior(2.0, 1.0);
    Moments me = moments(e, 2);
    CHECK_NEAR(me.m[0], cplx(2.0 * PI), 1e-10);
    CHECK_NEAR(me.m[1], cplx(0.0), 1e-10);
    CHECK_NEAR(me.m[2], cplx(-PI / 3.0), 1e-9);
    CHECK(me.relation_residual <= 1e-8);

    // origin inside Omega violates the precondition
    CHECK_THROWS_AS((void)moments(exterior_disc(cplx(3.0, 0.0), 1.0), 1), OriginInDomain);
}

TEST_CASE("point location") {
    DomainSpec c = cardioid(1.0);
    CHECK(point_location(c, cplx(0.1, 0.0)) == Location::Interior);
    CHECK(point_location(c, cplx(3.0, 0.0)) == Location::Complement);
    CHECK(point_location(c, c.phi(cplx(1.0))) == Location::Boundary);

    DomainSpec e = exterior_disc(cplx(0.3, 0.0), 1.0);
    CHECK(point_location(e, cplx(0.0)) == Location::Complement);
    CHECK(point_location(e, cplx(5.0, 0.0)) == Location::Interior);
}

TEST_CASE("circular inversion lowers the order by one") {
    DomainSpec d = disc(cplx(0.1, 0.0), 1.0);
    DomainSpec di = inverted(d);
    CHECK(di.kind == DomainKind::ExteriorDisc);
    CHECK(quadrature_data(d).order() == 1);
    CHECK(quadrature_data(di).order() == 0);
    double D = 0.01 - 1.0;
    CHECK_NEAR(di.center, cplx(0.1 / D), 1e-12);
    CHECK_NEAR(cplx(di.radius), cplx(1.0 / -D), 1e-12);

    DomainSpec c = cardioid(1.0);
    DomainSpec ci = inverted(c);
    CHECK(ci.unbounded);
    QuadratureData qc = quadrature_data(ci);
    CHECK(quadrature_data(c).order() == 2);
    CHECK(qc.order() == 1);
    // the single finite node of the inverted cardioid
    bool found = false;
    for (auto& t : qc.terms)
        if (!t.a.inf && t.m == 0) {
            found = true;
            CHECK_NEAR(t.a.z, cplx(-8.0 / 3.0), 1e-8);
        }
    CHECK(found);
}

TEST_CASE("json round trip") {
    for (auto spec : {disc(cplx(1.0, 2.0), 0.5), exterior_disc(cplx(0.3, 0.0), 1.0),
                      cardioid(2.0, cplx(1.0, 0.0), 0.3), poly3()}) {
        DomainSpec back = domain_from_json(domain_to_json(spec));
        CHECK(back.unbounded == spec.unbounded);
        if (spec.kind == DomainKind::Disc || spec.kind == DomainKind::ExteriorDisc) {
            CHECK_NEAR(back.center, spec.center, 0.0);
            CHECK(back.radius == spec.radius);
        } else {
            REQUIRE(back.phi.num().degree() == spec.phi.num().degree());
            for (int k = 0; k <= spec.phi.num().degree(); ++k)
                CHECK_NEAR(back.phi.num().coeffs()[k], spec.phi.num().coeffs()[k], 1e-15);
        }
    }
}

TEST_CASE("boundary-integral area agrees with the raster area") {
    DomainSpec c = cardioid(1.0);
    double h = 1.0 / 128.0;
    RasterDroplet m = rasterize(c, cplx(-1.2, -1.6), cplx(2.0, 1.6), h);
    double per = perimeter(m);
    CHECK_NEAR(cplx(area(c)), cplx(m.area()), 3.0 * h * per);
}
