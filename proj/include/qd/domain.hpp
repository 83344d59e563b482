#pragma once
// Domain presets and conformal-map domains.
//
// Map-based domains are images of the unit disc (bounded) or of its exterior
// (unbounded, phi(inf) = inf) under a rational univalent map phi. On |w| = 1 the
// boundary conjugate continues as S(phi(w)) = phi*(1/w) with phi* the
// coefficient-conjugated map; that function is the source of all quadrature data.

#include "qd/partial_fractions.hpp"

#include <string>
#include <vector>

namespace qd {

struct DegenerateSpec : Error {
    using Error::Error;
};
struct InversionFailure : Error {
    using Error::Error;
};
struct OriginInDomain : Error {
    using Error::Error;
};

enum class DomainKind {
    Disc,
    ExteriorDisc,
    EllipseExterior,
    Cardioid,
    Limacon,
    NeumannOval,
    JoukowskyExterior,
    RiemannMap,
    RasterComplement,
};

struct DomainSpec {
    DomainKind kind = DomainKind::Disc;
    bool unbounded = false;
    Rational phi;        // reference-plane map (all kinds except Disc/ExteriorDisc/RasterComplement)
    cplx center{0.0};    // disc kinds
    double radius = 1.0; // disc kinds
    std::vector<std::vector<cplx>> raster_curves; // RasterComplement: closed boundary polylines
    std::string label;
};

// ---- preset constructors ----
DomainSpec disc(cplx a, double rho);
DomainSpec exterior_disc(cplx a, double rho);
DomainSpec ellipse_exterior(double A, double B);                      // centered 0, axis-aligned, A > B > 0
DomainSpec cardioid(double s, cplx c0 = cplx(0.0), double rot = 0.0); // z = c0 + s e^{i rot}(w + w^2/2)
DomainSpec limacon(double s, double t);                               // z = s (w + t w^2), |t| < 1/2
DomainSpec neumann_oval(double s, double t);                          // z = s w / (1 - t^2 w^2), 0 < t < 1
DomainSpec joukowsky_exterior(cplx c);                                // w + 1/w over the exterior of the circle |w - c| = |1 - c|
DomainSpec riemann_map(Rational phi, bool unbounded, std::string label = "riemann_map");
DomainSpec raster_complement(std::vector<std::vector<cplx>> curves, bool unbounded_component);

struct BoundaryPoint {
    cplx z;
    cplx dz; // d z / d theta along the emitted orientation (Omega on the left)
};

// n samples of the positively-oriented boundary (relative to Omega)
std::vector<BoundaryPoint> boundary(const DomainSpec& spec, int n);

struct UnivalenceReport {
    bool ok = true;
    std::string reason;
    double nearest_selfdist = 0.0;    // min distance between non-adjacent boundary segments
    std::vector<double> cusp_params;  // boundary parameters where phi' vanishes on |w| = 1
};
UnivalenceReport univalence_check(const DomainSpec& spec, int n = 1024);

// area of Omega (bounded) or of the complement K (unbounded), Richardson-style doubling
double area(const DomainSpec& spec, double tol = 1e-12);

// Schwarz function at z in clos Omega; map kinds invert phi by seeded Newton (<= 50 iters)
CPoint schwarz_eval(const DomainSpec& spec, cplx z);

// inverse of phi at z (map kinds); |w| <= 1 bounded, |w| >= 1 unbounded
cplx map_inverse(const DomainSpec& spec, cplx z);

// principal parts of S at its poles in Omega plus the polynomial part at an
// infinite node; nodes closer than merge_tol are reported as one node
QuadratureData quadrature_data(const DomainSpec& spec, double merge_tol = 1e-6);

struct Moments {
    std::vector<cplx> m;              // m_0 = area of K, m_k = PV integral of z^{-k} over Omega
    double relation_residual = -1.0;  // vs m_k = -pi b_{k-1} when r is a polynomial; -1 if skipped
};
// unbounded Omega with 0 in the interior of the complement (else OriginInDomain)
Moments moments(const DomainSpec& spec, int kmax);

enum class Location { Interior, Boundary, Complement };
Location point_location(const DomainSpec& spec, cplx z, double boundary_band = 1e-9);

// circular inversion z -> 1/conj(z): bounded domain containing 0 <-> unbounded domain
DomainSpec inverted(const DomainSpec& spec);

// JSON (de)serialization of specs; see tools for the schema
std::string domain_to_json(const DomainSpec& spec);
DomainSpec domain_from_json(const std::string& text);

} // namespace qd
