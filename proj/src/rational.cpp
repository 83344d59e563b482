#include "qd/rational.hpp"

#include <algorithm>
#include <cmath>

namespace qd {

// Cancel shared roots of n and d by matched deflation. Tolerance is relative to
// the root magnitude; deflation is residual-checked so legitimate near-misses survive.
void cancel_common(Polynomial& n, Polynomial& d, double tol_rel) {
    if (n.is_zero(0.0) || d.degree() == 0) return;
    std::vector<RootCluster> rn, rd;
    try {
        rn = poly_roots(n);
        rd = poly_roots(d);
    } catch (const RootFindFailure&) {
        return; // leave unreduced; evaluation is still correct away from the common factor
    }
    for (auto& pr : rd) {
        for (auto& qr : rn) {
            if (pr.mult == 0 || qr.mult == 0) continue;
            double tol = tol_rel * std::max(1.0, std::abs(pr.z));
            if (std::abs(pr.z - qr.z) <= tol) {
                int k = std::min(pr.mult, qr.mult);
                cplx root = 0.5 * (pr.z + qr.z);
                for (int i = 0; i < k; ++i) {
                    n = n.deflate(root);
                    d = d.deflate(root);
                }
                pr.mult -= k;
                qr.mult -= k;
            }
        }
    }
}

Rational::Rational(Polynomial num, Polynomial den, bool reduce_common)
    : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero(0.0)) throw Error("Rational: zero denominator");
    if (reduce_common) cancel_common(num_, den_);
    normalize();
}

void Rational::normalize() {
    // scale so the denominator has unit leading coefficient
    cplx lead = den_.lead();
    num_ = num_ * (1.0 / lead);
    den_ = den_ * (1.0 / lead);
}

CPoint Rational::eval(const CPoint& z) const {
    int dn = num_.degree(), dd = den_.degree();
    if (z.inf) {
        if (num_.is_zero(0.0)) return CPoint(cplx(0.0));
        if (dn > dd) return CPoint::infinity();
        if (dn < dd) return CPoint(cplx(0.0));
        return CPoint(num_.lead() / den_.lead());
    }
    cplx nv = num_(z.z), dv = den_(z.z);
    double ns = num_.eval_scale(z.z), ds = den_.eval_scale(z.z);
    if (std::abs(dv) <= 1e-14 * std::max(1.0, ds)) {
        if (std::abs(nv) <= 1e-12 * std::max(1.0, ns)) {
            // nominally removable (should not survive reduction): L'Hopital once
            cplx n1 = num_.derivative()(z.z), d1 = den_.derivative()(z.z);
            if (std::abs(d1) > 1e-300) return CPoint(n1 / d1);
        }
        return CPoint::infinity();
    }
    return CPoint(nv / dv);
}

cplx Rational::operator()(cplx z) const {
    CPoint r = eval(CPoint(z));
    if (r.inf) return cplx(1e300, 0.0);
    return r.z;
}

Rational Rational::derivative() const {
    Polynomial w = wronskian();
    Polynomial d2 = den_ * den_;
    if (w.is_zero(1e-300)) return Rational(Polynomial(), Polynomial::constant(1.0), false);
    return Rational(std::move(w), std::move(d2), true);
}

Rational Rational::operator+(const Rational& o) const {
    return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}
Rational Rational::operator-(const Rational& o) const {
    return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}
Rational Rational::operator*(const Rational& o) const {
    return Rational(num_ * o.num_, den_ * o.den_);
}

std::vector<CriticalPoint> critical_points(const Rational& R) {
    int d = R.degree();
    if (d < 1) throw Error("critical_points: constant map");
    std::vector<CriticalPoint> out;
    Polynomial w = R.wronskian();
    int finite_total = 0;
    if (!w.is_zero(1e-14 * std::max(1.0, w.coeff_norm()))) {
        for (auto& rc : poly_roots(w)) {
            out.push_back({CPoint(rc.z), rc.mult});
            finite_total += rc.mult;
        }
    }

    // criticality at infinity from the degree data, computed independently of w
    int dn = R.num().degree(), dd = R.den().degree();
    int m_inf = 0;
    if (dn != dd) {
        m_inf = std::abs(dn - dd) - 1;
    } else {
        // order of vanishing of R(1/u) - R(inf) at u = 0
        const auto& nc = R.num().coeffs();
        const auto& dc = R.den().coeffs();
        cplx rinf = nc[dn] / dc[dd];
        double scale = std::max(R.num().coeff_norm(), R.den().coeff_norm());
        int ord = dn; // fallback: fully degenerate
        for (int i = 1; i <= dn; ++i) {
            cplx coef = nc[dn - i] - rinf * dc[dd - i];
            if (std::abs(coef) > 1e-11 * scale) {
                ord = i;
                break;
            }
        }
        m_inf = ord - 1;
    }
    if (m_inf > 0) out.push_back({CPoint::infinity(), m_inf});

    int total = finite_total + m_inf;
    if (total != 2 * d - 2)
        throw Error("critical_points: multiplicities sum to " + std::to_string(total) +
                    ", expected " + std::to_string(2 * d - 2));
    return out;
}

} // namespace qd
