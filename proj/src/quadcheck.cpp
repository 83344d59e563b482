#include "qd/quadcheck.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qd {

TestFunction TestFunction::monomial(int j) {
    if (j < 0) throw Error("monomial: degree must be >= 0");
    TestFunction f;
    f.kind = Kind::Monomial;
    f.j = j;
    return f;
}

TestFunction TestFunction::reciprocal(int j) {
    if (j < 1) throw Error("reciprocal: power must be >= 1");
    TestFunction f;
    f.kind = Kind::ReciprocalPower;
    f.j = j;
    return f;
}

TestFunction TestFunction::kernel(cplx b, int p) {
    if (p < 1) throw Error("kernel: order must be >= 1");
    TestFunction f;
    f.kind = Kind::PoleKernel;
    f.j = p;
    f.b = b;
    return f;
}

cplx TestFunction::operator()(cplx z) const {
    switch (kind) {
    case Kind::Monomial: return std::pow(z, j);
    case Kind::ReciprocalPower: return std::pow(z, -j);
    default: return std::pow(z - b, -j);
    }
}

namespace {

// falling factorial j (j-1) ... (j-m+1)
double falling(int j, int m) {
    double r = 1.0;
    for (int t = 0; t < m; ++t) r *= j - t;
    return r;
}

// (-1)^m p (p+1) ... (p+m-1)
double pole_deriv_factor(int p, int m) {
    double r = 1.0;
    for (int t = 0; t < m; ++t) r *= -(p + t);
    return r;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int t = 1; t <= k; ++t) r *= (double)(n - k + t) / t;
    return r;
}

} // namespace

cplx TestFunction::derivative(cplx a, int m) const {
    if (m < 0) throw Error("derivative: order must be >= 0");
    switch (kind) {
    case Kind::Monomial:
        if (m > j) return 0.0;
        return falling(j, m) * std::pow(a, j - m);
    case Kind::ReciprocalPower: return pole_deriv_factor(j, m) * std::pow(a, -j - m);
    default: return pole_deriv_factor(j, m) * std::pow(a - b, -j - m);
    }
}

cplx TestFunction::laurent(int k) const {
    if (k < 1) return 0.0;
    switch (kind) {
    case Kind::Monomial: return 0.0;
    case Kind::ReciprocalPower: return k == j ? 1.0 : 0.0;
    default:
        // (z-b)^-p = sum_{n>=0} C(p+n-1, n) b^n z^{-p-n}
        if (k < j) return 0.0;
        return binomial(k - 1, j - 1) * std::pow(b, k - j);
    }
}

std::string TestFunction::describe() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::Monomial: os << "z^" << j; break;
    case Kind::ReciprocalPower: os << "z^-" << j; break;
    default:
        os << "1/(z-(" << b.real() << (b.imag() < 0 ? "" : "+") << b.imag() << "i))";
        if (j > 1) os << "^" << j;
    }
    return os.str();
}

void require_admissible(const DomainSpec& spec, const TestFunction& f) {
    switch (f.kind) {
    case TestFunction::Kind::Monomial:
        if (spec.unbounded)
            throw InadmissibleTest("test function " + f.describe() +
                                   " does not vanish at infinity");
        return;
    case TestFunction::Kind::ReciprocalPower:
        if (point_location(spec, 0.0) != Location::Complement)
            throw InadmissibleTest("pole of " + f.describe() +
                                   " at the origin is not interior to the complement");
        return;
    default:
        if (point_location(spec, f.b) != Location::Complement)
            throw InadmissibleTest("pole of " + f.describe() +
                                   " is not interior to the complement");
    }
}

namespace {

// (1/2i) oint f(z) conj(z) dz over the boundary, domain kept on the left;
// trapezoid with doubling, spectrally accurate for analytic test functions
cplx contour_lhs(const DomainSpec& spec, const TestFunction& f, double tol) {
    auto eval = [&](int m) {
        auto bd = boundary(spec, m);
        cplx acc = 0.0;
        for (auto& p : bd) acc += f(p.z) * std::conj(p.z) * p.dz;
        return acc * (2.0 * PI / m) / cplx(0.0, 2.0);
    };
    int n = 512;
    cplx prev = eval(n);
    for (; n <= (1 << 16); n *= 2) {
        cplx cur = eval(2 * n);
        if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

} // namespace

QuadCheckResult check_one(const DomainSpec& spec, const QuadratureData& qd,
                          const TestFunction& f, double tol) {
    require_admissible(spec, f);
    QuadCheckResult r;
    r.test = f.describe();
    r.lhs = contour_lhs(spec, f, tol);
    r.rhs = 0.0;
    for (auto& t : qd.terms) {
        if (t.a.inf)
            r.rhs -= PI * t.c * f.laurent(t.m + 1);
        else
            r.rhs += t.c * f.derivative(t.a.z, t.m);
    }
    r.residual = std::abs(r.lhs - r.rhs);
    return r;
}

std::vector<QuadCheckResult> check_battery(const DomainSpec& spec,
                                           const QuadratureData& qd, int max_degree) {
    std::vector<QuadCheckResult> out;
    std::vector<TestFunction> fs;
    auto bd = boundary(spec, 256);
    if (!spec.unbounded) {
        for (int j = 0; j <= max_degree; ++j) fs.push_back(TestFunction::monomial(j));
        double maxr = 0.0;
        for (auto& p : bd) maxr = std::max(maxr, std::abs(p.z));
        double ring = 1.6 * maxr + 1.0;
        for (int t = 0; t < 4; ++t) {
            cplx b = std::polar(ring, PI * (2 * t + 1) / 4.0);
            fs.push_back(TestFunction::kernel(b, 1));
        }
        fs.push_back(TestFunction::kernel(cplx(ring, 0.0), 2));
    } else {
        if (point_location(spec, 0.0) == Location::Complement)
            for (int j = 1; j <= max_degree; ++j) fs.push_back(TestFunction::reciprocal(j));
        // pole kernels at admissible points of the compact complement: the
        // boundary centroid and a small ring around it
        cplx c0 = 0.0;
        for (auto& p : bd) c0 += p.z;
        c0 /= (double)bd.size();
        double dmin = std::numeric_limits<double>::infinity();
        for (auto& p : bd) dmin = std::min(dmin, std::abs(p.z - c0));
        std::vector<cplx> cands = {c0};
        for (int t = 0; t < 4; ++t) cands.push_back(c0 + std::polar(0.4 * dmin, PI * t / 2.0));
        for (auto& b : cands)
            if (point_location(spec, b) == Location::Complement) {
                fs.push_back(TestFunction::kernel(b, 1));
                fs.push_back(TestFunction::kernel(b, 2));
            }
    }
    for (auto& f : fs) out.push_back(check_one(spec, qd, f));
    return out;
}

double max_residual(const std::vector<QuadCheckResult>& results) {
    double m = 0.0;
    for (auto& r : results) m = std::max(m, r.residual);
    return m;
}

} // namespace qd
