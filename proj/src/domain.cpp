#include "qd/domain.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace qd {

namespace {

// phi with conjugated coefficients: phi*(w) = conj(phi(conj w))
Rational conj_map(const Rational& r) {
    return Rational(r.num().conj_coeffs(), r.den().conj_coeffs(), false);
}

// r(1/w) as a rational function of w
Rational compose_reciprocal(const Rational& r) {
    int M = std::max(r.num().degree(), r.den().degree());
    auto rev = [M](const Polynomial& p) {
        std::vector<cplx> c(M + 1, cplx(0.0));
        for (int j = 0; j <= p.degree(); ++j) c[M - j] = p.coeffs()[j];
        return Polynomial(std::move(c));
    };
    return Rational(rev(r.num()), rev(r.den()), true);
}

// r((A w + B)/(C w + D)) written over a common power of the Moebius denominator
Rational compose_mobius(const Rational& r, const Polynomial& AB, const Polynomial& CD) {
    int M = std::max(r.num().degree(), r.den().degree());
    auto lift = [&](const Polynomial& p) {
        Polynomial acc;
        for (int j = 0; j <= M; ++j) {
            cplx cj = j <= p.degree() ? p.coeffs()[j] : cplx(0.0);
            if (std::abs(cj) == 0.0) continue;
            Polynomial term = Polynomial::constant(cj);
            for (int k = 0; k < j; ++k) term = term * AB;
            for (int k = j; k < M; ++k) term = term * CD;
            acc = acc + term;
        }
        return acc;
    };
    return Rational(lift(r.num()), lift(r.den()), true);
}

bool is_map_kind(const DomainSpec& s) {
    return s.kind != DomainKind::Disc && s.kind != DomainKind::ExteriorDisc &&
           s.kind != DomainKind::RasterComplement;
}

// Per-spec derived data: derivative, boundary conjugate, Newton seed table.
struct MapData {
    Rational phi, dphi, psi; // psi(w) = phi*(1/w)
    std::vector<cplx> wseed, zseed;
    std::vector<cplx> key; // phi coefficients, for cache verification
};

std::vector<cplx> spec_key(const DomainSpec& s) {
    std::vector<cplx> k;
    k.push_back(cplx((double)(int)s.kind, s.unbounded ? 1.0 : 0.0));
    for (auto& c : s.phi.num().coeffs()) k.push_back(c);
    k.push_back(cplx(1e9, -1e9));
    for (auto& c : s.phi.den().coeffs()) k.push_back(c);
    return k;
}

const MapData& map_data(const DomainSpec& s) {
    static std::mutex mu;
    static std::unordered_map<size_t, std::vector<std::unique_ptr<MapData>>> cache;
    std::vector<cplx> key = spec_key(s);
    size_t h = 1469598103934665603ull;
    for (auto& c : key) {
        h = (h ^ std::hash<double>()(c.real())) * 1099511628211ull;
        h = (h ^ std::hash<double>()(c.imag())) * 1099511628211ull;
    }
    std::lock_guard<std::mutex> lk(mu);
    auto& slot = cache[h];
    for (auto& md : slot)
        if (md->key == key) return *md;

    auto md = std::make_unique<MapData>();
    md->key = key;
    md->phi = s.phi;
    md->dphi = s.phi.derivative();
    md->psi = compose_reciprocal(conj_map(s.phi));
    // seed table: 1024 boundary samples plus a few rings on the reference side
    std::vector<double> radii = s.unbounded
                                    ? std::vector<double>{1.0, 1.02, 1.08, 1.3, 2.0, 6.0}
                                    : std::vector<double>{1.0, 0.97, 0.9, 0.72, 0.45, 0.15};
    int per_ring = 1024 / (int)radii.size();
    for (double r : radii) {
        for (int k = 0; k < per_ring; ++k) {
            double th = 2.0 * PI * (k + 0.5) / per_ring;
            cplx w = r * cplx(std::cos(th), std::sin(th));
            CPoint z = md->phi.eval(CPoint(w));
            if (z.inf) continue;
            md->wseed.push_back(w);
            md->zseed.push_back(z.z);
        }
    }
    slot.push_back(std::move(md));
    return *slot.back();
}

double dist_point_segment(cplx p, cplx a, cplx b) {
    cplx ab = b - a;
    double L2 = std::norm(ab);
    if (L2 == 0.0) return std::abs(p - a);
    double t = std::clamp(((p - a) / ab).real(), 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

bool segments_intersect(cplx a, cplx b, cplx c, cplx d) {
    auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
    double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

double seg_seg_distance(cplx a, cplx b, cplx c, cplx d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min(std::min(dist_point_segment(a, c, d), dist_point_segment(b, c, d)),
                    std::min(dist_point_segment(c, a, b), dist_point_segment(d, a, b)));
}

int winding_number(const std::vector<cplx>& poly, cplx z) {
    double acc = 0.0;
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        cplx u = poly[i] - z, v = poly[(i + 1) % n] - z;
        acc += std::arg(v / u);
    }
    return (int)std::lround(acc / (2.0 * PI));
}

double shoelace(const std::vector<cplx>& p) {
    double a = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        cplx u = p[i], v = p[(i + 1) % p.size()];
        a += u.real() * v.imag() - u.imag() * v.real();
    }
    return 0.5 * a;
}

} // namespace

// ---- preset constructors ----

DomainSpec disc(cplx a, double rho) {
    if (!(rho > 0.0)) throw DegenerateSpec("disc: radius must be positive");
    DomainSpec s;
    s.kind = DomainKind::Disc;
    s.unbounded = false;
    s.center = a;
    s.radius = rho;
    s.phi = Rational(Polynomial({a, rho}), Polynomial::constant(1.0), false);
    s.label = "disc";
    return s;
}

DomainSpec exterior_disc(cplx a, double rho) {
    if (!(rho > 0.0)) throw DegenerateSpec("exterior_disc: radius must be positive");
    DomainSpec s;
    s.kind = DomainKind::ExteriorDisc;
    s.unbounded = true;
    s.center = a;
    s.radius = rho;
    s.phi = Rational(Polynomial({a, rho}), Polynomial::constant(1.0), false);
    s.label = "exterior_disc";
    return s;
}

DomainSpec ellipse_exterior(double A, double B) {
    if (!(A > B && B > 0.0)) throw DegenerateSpec("ellipse_exterior: need A > B > 0");
    DomainSpec s;
    s.kind = DomainKind::EllipseExterior;
    s.unbounded = true;
    double al = 0.5 * (A + B), be = 0.5 * (A - B);
    // phi(u) = al u + be / u on |u| > 1
    s.phi = Rational(Polynomial({be, 0.0, al}), Polynomial({0.0, 1.0}), false);
    s.label = "ellipse_exterior";
    return s;
}

DomainSpec cardioid(double sc, cplx c0, double rot) {
    if (!(sc > 0.0)) throw DegenerateSpec("cardioid: scale must be positive");
    DomainSpec s;
    s.kind = DomainKind::Cardioid;
    s.unbounded = false;
    cplx e = std::polar(1.0, rot);
    // z = c0 + sc e (w + w^2/2); cusp at w = -1
    s.phi = Rational(Polynomial({c0, sc * e, 0.5 * sc * e}), Polynomial::constant(1.0), false);
    s.label = "cardioid";
    return s;
}

DomainSpec limacon(double sc, double t) {
    if (!(sc > 0.0) || !(std::abs(t) < 0.5))
        throw DegenerateSpec("limacon: need scale > 0 and |t| < 1/2");
    DomainSpec s;
    s.kind = DomainKind::Limacon;
    s.unbounded = false;
    s.phi = Rational(Polynomial({0.0, sc, sc * t}), Polynomial::constant(1.0), false);
    s.label = "limacon";
    return s;
}

DomainSpec neumann_oval(double sc, double t) {
    if (!(sc > 0.0) || !(t > 0.0 && t < 1.0))
        throw DegenerateSpec("neumann_oval: need scale > 0 and 0 < t < 1");
    DomainSpec s;
    s.kind = DomainKind::NeumannOval;
    s.unbounded = false;
    // z = sc w / (1 - t^2 w^2): two simple nodes at +-sc t/(1 - t^4)
    s.phi = Rational(Polynomial({0.0, sc}), Polynomial({1.0, 0.0, -t * t}), false);
    s.label = "neumann_oval";
    return s;
}

DomainSpec joukowsky_exterior(cplx c) {
    double R = std::abs(1.0 - c);
    if (!(R > 0.0) || std::abs(-1.0 - c) >= R)
        throw DegenerateSpec("joukowsky_exterior: circle must pass through 1 and enclose -1");
    DomainSpec s;
    s.kind = DomainKind::JoukowskyExterior;
    s.unbounded = true;
    // u -> c + R u -> w + 1/w; cusp at u = (1-c)/R on |u| = 1
    Polynomial lin({c, R});
    s.phi = Rational(lin * lin + Polynomial::constant(1.0), lin, false);
    s.label = "joukowsky_exterior";
    return s;
}

DomainSpec riemann_map(Rational phi, bool unbounded, std::string label) {
    DomainSpec s;
    s.kind = DomainKind::RiemannMap;
    s.unbounded = unbounded;
    s.phi = std::move(phi);
    s.label = std::move(label);
    if (unbounded && s.phi.num().degree() != s.phi.den().degree() + 1)
        throw DegenerateSpec("riemann_map: unbounded map needs a simple pole at infinity");
    return s;
}

DomainSpec raster_complement(std::vector<std::vector<cplx>> curves, bool unbounded_component) {
    DomainSpec s;
    s.kind = DomainKind::RasterComplement;
    s.unbounded = unbounded_component;
    s.raster_curves = std::move(curves);
    s.label = "raster_complement";
    if (s.raster_curves.empty()) throw DegenerateSpec("raster_complement: no curves");
    return s;
}

// ---- boundary / area ----

std::vector<BoundaryPoint> boundary(const DomainSpec& spec, int n) {
    if (n < 8) throw Error("boundary: need n >= 8");
    std::vector<BoundaryPoint> out(n);
    if (spec.kind == DomainKind::RasterComplement) {
        // resample the stored polylines uniformly by vertex index
        std::vector<cplx> all;
        for (auto& c : spec.raster_curves) all.insert(all.end(), c.begin(), c.end());
        size_t m = all.size();
        for (int k = 0; k < n; ++k) {
            size_t i = (size_t)((double)k / n * m) % m;
            cplx a = all[i], b = all[(i + 1) % m];
            out[k] = {a, (b - a) * (double)m / (2.0 * PI)};
        }
        return out;
    }
    const MapData& md = map_data(spec);
    double sigma = spec.unbounded ? -1.0 : 1.0; // reversed traversal keeps Omega on the left
    for (int k = 0; k < n; ++k) {
        double th = 2.0 * PI * k / n;
        cplx w = std::polar(1.0, sigma * th);
        cplx z = md.phi(w);
        cplx dz = md.dphi(w) * cplx(0.0, sigma) * w;
        out[k] = {z, dz};
    }
    return out;
}

static cplx contour_integral(const DomainSpec& spec, int n,
                             const std::function<cplx(cplx z, cplx zbar)>& f) {
    auto bd = boundary(spec, n);
    cplx acc = 0.0;
    for (auto& b : bd) acc += f(b.z, std::conj(b.z)) * b.dz;
    return acc * (2.0 * PI / n) / cplx(0.0, 2.0);
}

double area(const DomainSpec& spec, double tol) {
    if (spec.kind == DomainKind::RasterComplement) {
        double a = 0.0;
        for (auto& c : spec.raster_curves) a += shoelace(c);
        return std::abs(a);
    }
    auto one = [](cplx, cplx zb) { return zb; };
    int n = 256;
    double prev = std::real(contour_integral(spec, n, one));
    for (; n <= (1 << 17); n *= 2) {
        double cur = std::real(contour_integral(spec, 2 * n, one));
        if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) {
            prev = cur;
            break;
        }
        prev = cur;
    }
    return spec.unbounded ? -prev : prev;
}

// ---- univalence ----

UnivalenceReport univalence_check(const DomainSpec& spec, int n) {
    UnivalenceReport rep;
    rep.nearest_selfdist = std::numeric_limits<double>::infinity();
    if (spec.kind == DomainKind::Disc || spec.kind == DomainKind::ExteriorDisc) {
        rep.nearest_selfdist = 2.0 * spec.radius;
        return rep;
    }
    if (spec.kind == DomainKind::RasterComplement) return rep;

    const Rational& phi = spec.phi;
    // pole locations relative to the reference domain
    if (phi.den().degree() > 0) {
        for (auto& rc : poly_roots(phi.den())) {
            double r = std::abs(rc.z);
            bool bad = spec.unbounded ? (r >= 1.0 - 1e-9) : (r <= 1.0 + 1e-9);
            if (bad) {
                rep.ok = false;
                rep.reason = "pole of the map on the reference domain";
                return rep;
            }
        }
    }
    if (spec.unbounded && phi.num().degree() != phi.den().degree() + 1) {
        rep.ok = false;
        rep.reason = "unbounded map lacks a simple pole at infinity";
        return rep;
    }
    // critical points of phi strictly on the reference side are disqualifying;
    // on the unit circle they are cusps and get reported
    Polynomial W = phi.wronskian();
    if (!W.is_zero(1e-14 * std::max(1.0, W.coeff_norm()))) {
        for (auto& rc : poly_roots(W)) {
            double r = std::abs(rc.z);
            if (std::abs(r - 1.0) <= 1e-7) {
                rep.cusp_params.push_back(std::arg(rc.z));
                continue;
            }
            bool inside_ref = spec.unbounded ? (r > 1.0) : (r < 1.0);
            if (inside_ref) {
                rep.ok = false;
                rep.reason = "derivative vanishes inside the reference domain";
                return rep;
            }
        }
    }
    // Self-intersection scan on a circle shrunk one sample spacing into the
    // reference side.  Cusps and tangential self-contacts that live exactly on
    // the unit circle separate there, while genuine overlap of the open image
    // (a positive-area defect) still shows up.  Injectivity on every interior
    // circle plus a nonvanishing derivative gives injectivity on the open side.
    double rho = 1.0 + (spec.unbounded ? 1.0 : -1.0) * 2.0 * PI / n;
    std::vector<cplx> p(n);
    for (int i = 0; i < n; ++i) p[i] = phi(std::polar(rho, 2.0 * PI * i / n));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue; // cyclically adjacent
            double d = seg_seg_distance(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n]);
            rep.nearest_selfdist = std::min(rep.nearest_selfdist, d);
            if (d == 0.0) {
                rep.ok = false;
                rep.reason = "boundary self-intersection";
                return rep;
            }
        }
    }
    std::sort(rep.cusp_params.begin(), rep.cusp_params.end());
    return rep;
}

// ---- inversion of phi and the Schwarz function ----

cplx map_inverse(const DomainSpec& spec, cplx z) {
    if (spec.kind == DomainKind::Disc || spec.kind == DomainKind::ExteriorDisc)
        return (z - spec.center) / spec.radius;
    if (!is_map_kind(spec)) throw InversionFailure("map_inverse: no analytic map");
    const MapData& md = map_data(spec);

    // nearest few seeds by image distance
    int tries = 4;
    std::vector<int> order(md.zseed.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
    std::partial_sort(order.begin(), order.begin() + tries, order.end(), [&](int a, int b) {
        return std::abs(md.zseed[a] - z) < std::abs(md.zseed[b] - z);
    });
    double zscale = 1.0 + std::abs(z);
    for (int t = 0; t < tries; ++t) {
        cplx w = md.wseed[order[t]];
        for (int it = 0; it < 50; ++it) {
            cplx f = md.phi(w) - z;
            if (std::abs(f) <= 1e-12 * zscale) break;
            cplx d = md.dphi(w);
            if (std::abs(d) < 1e-300) break;
            cplx step = f / d;
            if (std::abs(step) > 1.0 + std::abs(w)) step *= (1.0 + std::abs(w)) / std::abs(step);
            w -= step;
        }
        if (std::abs(md.phi(w) - z) <= 1e-10 * zscale) {
            double r = std::abs(w);
            bool on_side = spec.unbounded ? (r >= 1.0 - 5e-7) : (r <= 1.0 + 5e-7);
            if (on_side) return w;
        }
    }
    throw InversionFailure("map_inverse: Newton failed or point off the closure");
}

CPoint schwarz_eval(const DomainSpec& spec, cplx z) {
    switch (spec.kind) {
    case DomainKind::Disc:
    case DomainKind::ExteriorDisc: {
        cplx d = z - spec.center;
        if (std::abs(d) < 1e-14 * (1.0 + std::abs(spec.center))) return CPoint::infinity();
        return CPoint(std::conj(spec.center) + spec.radius * spec.radius / d);
    }
    case DomainKind::RasterComplement:
        throw Error("schwarz_eval: raster domains carry no Schwarz function");
    default: {
        cplx w = map_inverse(spec, z);
        return map_data(spec).psi.eval(CPoint(w));
    }
    }
}

// ---- quadrature data ----

QuadratureData quadrature_data(const DomainSpec& spec, double merge_tol) {
    QuadratureData out;
    if (spec.kind == DomainKind::Disc) {
        out.terms.push_back({CPoint(spec.center), 0, PI * spec.radius * spec.radius});
        return out;
    }
    if (spec.kind == DomainKind::ExteriorDisc) {
        out.terms.push_back({CPoint::infinity(), 0, std::conj(spec.center)});
        return out;
    }
    if (!is_map_kind(spec)) throw Error("quadrature_data: raster domains not supported");

    const MapData& md = map_data(spec);
    const Rational& psi = md.psi;

    // poles of psi on the reference side give the finite nodes
    std::vector<RootCluster> poles;
    if (psi.den().degree() > 0) {
        for (auto& rc : poly_roots(psi.den())) {
            double r = std::abs(rc.z);
            bool ref_side = spec.unbounded ? (r > 1.0 + 1e-7) : (r < 1.0 - 1e-7);
            if (ref_side) poles.push_back(rc);
        }
    }
    auto circle_int = [&](cplx w0, double rad, int j, cplx z0, int N) {
        // (1/2 pi i) oint psi(w) (phi(w)-z0)^(j-1) phi'(w) dw around w0
        cplx acc = 0.0;
        for (int k = 0; k < N; ++k) {
            double th = 2.0 * PI * k / N;
            cplx w = w0 + rad * std::polar(1.0, th);
            cplx val = psi(w) * md.dphi(w);
            cplx base = md.phi(w) - z0;
            cplx pw = 1.0;
            if (j - 1 >= 0)
                for (int q = 0; q < j - 1; ++q) pw *= base;
            else
                for (int q = 0; q < 1 - j; ++q) pw /= base;
            acc += val * pw * (w - w0);
        }
        return acc / double(N);
    };

    for (auto& pole : poles) {
        double gap = std::abs(std::abs(pole.z) - 1.0);
        double rad = 0.45 * gap;
        for (auto& other : poles)
            if (std::abs(other.z - pole.z) > 1e-14)
                rad = std::min(rad, 0.45 * std::abs(other.z - pole.z));
        CPoint z0p = md.phi.eval(CPoint(pole.z));
        if (z0p.inf) throw Error("quadrature_data: node maps to infinity");
        cplx z0 = z0p.z;
        for (int j = 1; j <= pole.mult; ++j) {
            cplx pj = circle_int(pole.z, rad, j, z0, 512);
            int m = j - 1;
            out.terms.push_back({CPoint(z0), m, PI * pj / std::tgamma(double(m + 1))});
        }
    }

    if (spec.unbounded) {
        // polynomial part of S at infinity (plus its constant term)
        int q = std::max(0, psi.num().degree() - psi.den().degree());
        double R = 2.0;
        if (psi.den().degree() > 0)
            for (auto& rc : poly_roots(psi.den())) R = std::max(R, 2.0 * std::abs(rc.z));
        // grow R until the image circle clears every finite node and the origin
        double need = 1.0;
        for (auto& t : out.terms)
            if (!t.a.inf) need = std::max(need, std::abs(t.a.z));
        int N = 1024;
        for (int att = 0; att < 40; ++att) {
            double im_min = std::numeric_limits<double>::infinity();
            for (int k = 0; k < N; k += 8)
                im_min = std::min(im_min,
                                  std::abs(md.phi(R * std::polar(1.0, 2.0 * PI * k / N))));
            if (im_min > 2.0 * need) break;
            R *= 1.5;
        }
        for (int j = 0; j <= q; ++j) {
            // b_j = (1/2 pi i) oint psi(u) phi(u)^(-j-1) phi'(u) du on |u| = R
            cplx acc = 0.0;
            for (int k = 0; k < N; ++k) {
                cplx u = R * std::polar(1.0, 2.0 * PI * k / N);
                cplx ph = md.phi(u);
                cplx pw = 1.0;
                for (int t = 0; t < j + 1; ++t) pw *= ph;
                acc += psi(u) * md.dphi(u) / pw * u;
            }
            cplx bj = acc / double(N);
            out.terms.push_back({CPoint::infinity(), j, bj});
        }
    }

    // merge nodes closer than merge_tol
    QuadratureData merged;
    for (auto& t : out.terms) {
        bool found = false;
        for (auto& u : merged.terms) {
            if (t.a.inf != u.a.inf) continue;
            bool same = t.a.inf || std::abs(t.a.z - u.a.z) <= merge_tol;
            if (same && t.m == u.m) {
                u.c += t.c;
                found = true;
                break;
            }
            if (same && !t.a.inf) t.a = u.a; // snap location, keep as separate order entry
        }
        if (!found) merged.terms.push_back(t);
    }
    double scale = 0.0;
    for (auto& t : merged.terms) scale = std::max(scale, std::abs(t.c));
    return merged.cleaned(1e-9 * std::max(1.0, scale));
}

// ---- moments ----

Moments moments(const DomainSpec& spec, int kmax) {
    if (!spec.unbounded) throw Error("moments: domain must be unbounded");
    if (point_location(spec, cplx(0.0), 1e-9) != Location::Complement)
        throw OriginInDomain("moments: origin must lie inside the complement");
    Moments out;
    out.m.resize(kmax + 1);
    for (int k = 0; k <= kmax; ++k) {
        auto f = [k](cplx z, cplx zb) {
            cplx pw = 1.0;
            for (int t = 0; t < k; ++t) pw /= z;
            return zb * pw;
        };
        int n = 512;
        cplx prev = contour_integral(spec, n, f);
        for (; n <= (1 << 15); n *= 2) {
            cplx cur = contour_integral(spec, 2 * n, f);
            if (std::abs(cur - prev) <= 1e-12 * std::max(1.0, std::abs(cur))) {
                prev = cur;
                break;
            }
            prev = cur;
        }
        out.m[k] = (k == 0) ? -prev : prev; // m_0 reported as the (positive) complement area
    }
    // consistency with the polynomial-part coefficients: m_k = -pi b_{k-1}
    QuadratureData qd = quadrature_data(spec);
    bool pure_poly = true;
    for (auto& t : qd.terms)
        if (!t.a.inf) pure_poly = false;
    if (pure_poly) {
        double res = 0.0;
        for (int k = 1; k <= kmax; ++k) {
            cplx b = 0.0;
            for (auto& t : qd.terms)
                if (t.a.inf && t.m == k - 1) b = t.c;
            res = std::max(res, std::abs(out.m[k] - (-PI * b)));
        }
        out.relation_residual = res;
    }
    return out;
}

// ---- point location ----

Location point_location(const DomainSpec& spec, cplx z, double boundary_band) {
    if (spec.kind == DomainKind::Disc || spec.kind == DomainKind::ExteriorDisc) {
        double d = std::abs(z - spec.center) - spec.radius;
        if (std::abs(d) <= boundary_band) return Location::Boundary;
        bool in_disc = d < 0.0;
        if (spec.kind == DomainKind::Disc) return in_disc ? Location::Interior : Location::Complement;
        return in_disc ? Location::Complement : Location::Interior;
    }
    if (spec.kind == DomainKind::RasterComplement) {
        // even-odd depth over the stored closed curves, orientation-insensitive
        int depth = 0;
        for (auto& c : spec.raster_curves) {
            double mind = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < c.size(); ++i)
                mind = std::min(mind, dist_point_segment(z, c[i], c[(i + 1) % c.size()]));
            if (mind <= boundary_band) return Location::Boundary;
            if (winding_number(c, z) % 2 != 0) ++depth;
        }
        bool odd = (depth % 2) != 0;
        if (spec.unbounded) return odd ? Location::Complement : Location::Interior;
        return odd ? Location::Interior : Location::Complement;
    }
    int n = 2048;
    auto bd = boundary(spec, n);
    std::vector<cplx> p(n);
    for (int i = 0; i < n; ++i) p[i] = bd[i].z;
    double mind = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < p.size(); ++i)
        mind = std::min(mind, dist_point_segment(z, p[i], p[(i + 1) % p.size()]));
    if (mind <= boundary_band) return Location::Boundary;
    int w = winding_number(p, z);
    bool enclosed = (w != 0);
    if (spec.unbounded) return enclosed ? Location::Complement : Location::Interior;
    return enclosed ? Location::Interior : Location::Complement;
}

// ---- circular inversion ----

DomainSpec inverted(const DomainSpec& spec) {
    if (spec.unbounded) throw Error("inverted: only bounded domains containing 0 are inverted here");
    if (point_location(spec, cplx(0.0)) != Location::Interior)
        throw Error("inverted: domain must contain the origin");
    if (spec.kind == DomainKind::Disc) {
        double D = std::norm(spec.center) - spec.radius * spec.radius; // negative: 0 inside
        return exterior_disc(spec.center / D, spec.radius / std::abs(D));
    }
    // z -> 1/conj(z): new map u -> 1/phi*(m(u)) with m a Moebius swap of inf and
    // the preimage of 0
    Rational phis = conj_map(spec.phi);
    cplx v0;
    {
        bool found = false;
        for (auto& rc : poly_roots(phis.num()))
            if (std::abs(rc.z) < 1.0) {
                v0 = rc.z;
                found = true;
                break;
            }
        if (!found) throw Error("inverted: could not locate the preimage of 0");
    }
    Polynomial A({cplx(1.0), v0});            // v0 u + 1 (ascending: 1 + v0 u)
    Polynomial B({std::conj(v0), cplx(1.0)}); // u + conj(v0)
    Rational comp = compose_mobius(phis, A, B);
    Rational g(comp.den(), comp.num(), true); // reciprocal
    return riemann_map(g, true, spec.label + "_inverted");
}

// ---- JSON ----

using nlohmann::json;

static json poly_json(const Polynomial& p) {
    json a = json::array();
    for (auto& c : p.coeffs()) a.push_back({c.real(), c.imag()});
    return a;
}
static Polynomial poly_from(const json& a) {
    std::vector<cplx> c;
    for (auto& v : a) c.push_back(cplx(v[0].get<double>(), v[1].get<double>()));
    return Polynomial(std::move(c));
}

std::string domain_to_json(const DomainSpec& s) {
    json j;
    switch (s.kind) {
    case DomainKind::Disc:
        j["kind"] = "disc";
        j["center"] = {s.center.real(), s.center.imag()};
        j["radius"] = s.radius;
        break;
    case DomainKind::ExteriorDisc:
        j["kind"] = "exterior_disc";
        j["center"] = {s.center.real(), s.center.imag()};
        j["radius"] = s.radius;
        break;
    default:
        j["kind"] = "riemann_map";
        j["sourcekind"] = s.label;
        j["unbounded"] = s.unbounded;
        j["num"] = poly_json(s.phi.num());
        j["den"] = poly_json(s.phi.den());
        break;
    }
    return j.dump(2);
}

DomainSpec domain_from_json(const std::string& text) {
    json j = json::parse(text);
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "disc")
        return disc(cplx(j["center"][0], j["center"][1]), j["radius"].get<double>());
    if (kind == "exterior_disc")
        return exterior_disc(cplx(j["center"][0], j["center"][1]), j["radius"].get<double>());
    if (kind == "ellipse_exterior")
        return ellipse_exterior(j["a"].get<double>(), j["b"].get<double>());
    if (kind == "cardioid")
        return cardioid(j.value("scale", 1.0),
                        cplx(j.value("cx", 0.0), j.value("cy", 0.0)), j.value("rot", 0.0));
    if (kind == "limacon") return limacon(j.value("scale", 1.0), j.at("t").get<double>());
    if (kind == "neumann_oval") return neumann_oval(j.value("scale", 1.0), j.at("t").get<double>());
    if (kind == "joukowsky_exterior")
        return joukowsky_exterior(cplx(j["c"][0].get<double>(), j["c"][1].get<double>()));
    if (kind == "riemann_map")
        return riemann_map(Rational(poly_from(j.at("num")), poly_from(j.at("den")), false),
                           j.at("unbounded").get<bool>(), j.value("sourcekind", "riemann_map"));
    throw Error("domain_from_json: unknown kind " + kind);
}

} // namespace qd
