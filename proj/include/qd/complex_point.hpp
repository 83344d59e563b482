#pragma once
// Points on the Riemann sphere: a finite complex value or the point at infinity.

#include <complex>
#include <cmath>

namespace qd {

using cplx = std::complex<double>;

constexpr double PI = 3.141592653589793238462643383279502884;

inline cplx I() { return cplx(0.0, 1.0); }

struct CPoint {
    cplx z{0.0, 0.0};
    bool inf = false;

    CPoint() = default;
    CPoint(cplx v) : z(v), inf(false) {}
    CPoint(double re, double im) : z(re, im), inf(false) {}

    static CPoint infinity() { CPoint p; p.inf = true; return p; }

    bool finite() const { return !inf; }
    double re() const { return z.real(); }
    double im() const { return z.imag(); }
};

// Chordal distance on the sphere; bounded by 2, continuous across infinity.
inline double chordal(const CPoint& a, const CPoint& b) {
    auto lift = [](const CPoint& p, double& x, double& y, double& s) {
        if (p.inf) { x = 0; y = 0; s = 0; return; }
        double n2 = std::norm(p.z);
        double d = 1.0 + n2;
        x = 2.0 * p.z.real() / d;
        y = 2.0 * p.z.imag() / d;
        s = (n2 - 1.0) / d;
    };
    double ax, ay, as, bx, by, bs;
    lift(a, ax, ay, as);
    if (a.inf) { as = 1.0; }
    lift(b, bx, by, bs);
    if (b.inf) { bs = 1.0; }
    return std::sqrt((ax - bx) * (ax - bx) + (ay - by) * (ay - by) + (as - bs) * (as - bs));
}

inline bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }

} // namespace qd
