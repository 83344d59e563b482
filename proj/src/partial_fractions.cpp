#include "qd/partial_fractions.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qd {

namespace {
double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}
} // namespace

int QuadratureData::order() const { return to_rational().degree(); }

int QuadratureData::node_count() const {
    std::vector<cplx> seen;
    int n = 0;
    for (auto& t : terms) {
        if (t.a.inf) continue;
        bool dup = false;
        for (auto& s : seen)
            if (std::abs(s - t.a.z) < 1e-9 * std::max(1.0, std::abs(s))) dup = true;
        if (!dup) {
            seen.push_back(t.a.z);
            ++n;
        }
    }
    if (has_infinite_node()) ++n;
    return n;
}

bool QuadratureData::has_infinite_node() const {
    for (auto& t : terms)
        if (t.a.inf && t.m >= 1 && std::abs(t.c) > 0.0) return true;
    return false;
}

int QuadratureData::max_finite_multiplicity() const {
    int m = 0;
    for (auto& t : terms)
        if (!t.a.inf) m = std::max(m, t.m + 1);
    return m;
}

Rational QuadratureData::to_rational() const {
    // r = sum c m!/(pi (z-a)^(m+1)) + poly, assembled over the grouped common
    // denominator prod (z-a)^(max multiplicity) so no cancellation is needed
    Polynomial poly;
    std::vector<cplx> nodes;
    std::vector<int> mult;
    for (auto& t : terms) {
        if (t.a.inf) {
            poly = poly + Polynomial::monomial(t.m, t.c);
            continue;
        }
        int found = -1;
        for (size_t k = 0; k < nodes.size(); ++k)
            if (std::abs(nodes[k] - t.a.z) < 1e-12 * std::max(1.0, std::abs(nodes[k])))
                found = (int)k;
        if (found < 0) {
            nodes.push_back(t.a.z);
            mult.push_back(t.m + 1);
        } else {
            mult[found] = std::max(mult[found], t.m + 1);
        }
    }
    Polynomial den = Polynomial::constant(1.0);
    for (size_t k = 0; k < nodes.size(); ++k) {
        Polynomial lin({-nodes[k], 1.0});
        for (int i = 0; i < mult[k]; ++i) den = den * lin;
    }
    Polynomial num = poly * den;
    for (auto& t : terms) {
        if (t.a.inf) continue;
        // cofactor: den / (z - a)^(m+1)
        Polynomial cof = den;
        for (int i = 0; i <= t.m; ++i) cof = cof.deflate(t.a.z);
        num = num + cof * (t.c * factorial(t.m) / PI);
    }
    return Rational(num, den, false);
}

QuadratureData QuadratureData::cleaned(double tol) const {
    QuadratureData out;
    for (auto& t : terms) {
        if (std::abs(t.c) <= tol) continue;
        bool merged = false;
        for (auto& u : out.terms) {
            bool same_loc = (u.a.inf && t.a.inf) ||
                            (!u.a.inf && !t.a.inf && std::abs(u.a.z - t.a.z) < 1e-12);
            if (same_loc && u.m == t.m) {
                u.c += t.c;
                merged = true;
                break;
            }
        }
        if (!merged) out.terms.push_back(t);
    }
    std::sort(out.terms.begin(), out.terms.end(), [](const QuadTerm& x, const QuadTerm& y) {
        if (x.a.inf != y.a.inf) return y.a.inf; // finite nodes first
        if (!x.a.inf && std::abs(x.a.z - y.a.z) > 1e-12)
            return x.a.z.real() != y.a.z.real() ? x.a.z.real() < y.a.z.real()
                                                : x.a.z.imag() < y.a.z.imag();
        return x.m < y.m;
    });
    return out;
}

QuadratureData partial_fractions(const Rational& r, double merge_tol) {
    QuadratureData out;
    Polynomial num = r.num(), den = r.den();

    // polynomial part
    Polynomial quo, rem;
    poly_divmod(num, den, quo, rem);
    if (!quo.is_zero(0.0)) {
        const auto& qc = quo.coeffs();
        for (int j = 0; j < (int)qc.size(); ++j)
            if (std::abs(qc[j]) > 0.0) out.terms.push_back({CPoint::infinity(), j, qc[j]});
    }
    if (den.degree() == 0) return out.cleaned();

    std::vector<RootCluster> poles = poly_roots(den);
    double scale = std::max(1.0, den.coeff_norm());
    for (size_t i = 0; i < poles.size(); ++i)
        for (size_t j = i + 1; j < poles.size(); ++j)
            if (std::abs(poles[i].z - poles[j].z) < merge_tol * scale)
                throw NearCoincidentPoles("partial_fractions: poles nearly coincide");

    // principal part at pole a of order M: expand num/(den/(z-a)^M) in a Taylor
    // series at a; the first M coefficients give p_{M}, p_{M-1}, ..., p_1.
    for (auto& pole : poles) {
        int M = pole.mult;
        Polynomial rest = den;
        for (int k = 0; k < M; ++k) rest = rest.deflate(pole.z);
        std::vector<cplx> tn = rem.taylor_at(pole.z); // use remainder: poly part removed
        std::vector<cplx> td = rest.taylor_at(pole.z);
        // series division tn/td up to M coefficients
        std::vector<cplx> g(M, cplx(0.0));
        for (int k = 0; k < M; ++k) {
            cplx acc = (k < (int)tn.size()) ? tn[k] : cplx(0.0);
            for (int j = 0; j < k; ++j) acc -= g[j] * ((k - j) < (int)td.size() ? td[k - j] : cplx(0.0));
            g[k] = acc / td[0];
        }
        // g[k] multiplies (z-a)^k / (z-a)^M: principal coefficient p_{M-k}
        for (int k = 0; k < M; ++k) {
            int p_order = M - k; // p / (z-a)^p_order
            int m = p_order - 1;
            cplx c = PI * g[k] / factorial(m);
            out.terms.push_back({CPoint(pole.z), m, c});
        }
    }
    return out.cleaned();
}

} // namespace qd
