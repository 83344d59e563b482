#pragma once
// Two-sided verification of the quadrature identity on analytic domains.
// The left side is the area integral of a test function f, evaluated as the
// boundary contour (1/2i) oint f(z) conj(z) dz; the right side is the node sum
// prescribed by a QuadratureData (exact derivatives and Laurent coefficients).

#include "qd/domain.hpp"

#include <string>
#include <vector>

namespace qd {

struct InadmissibleTest : Error {
    using Error::Error;
};

// Test functions with closed-form derivatives and Laurent data at infinity:
//   Monomial          z^j                  (bounded domains only)
//   ReciprocalPower   z^-j, j >= 1         (origin interior to the complement)
//   PoleKernel        (z-b)^-p, p >= 1     (b interior to the complement)
struct TestFunction {
    enum class Kind { Monomial, ReciprocalPower, PoleKernel };
    Kind kind = Kind::Monomial;
    int j = 0; // monomial degree / reciprocal power / kernel order
    cplx b;    // kernel pole location

    static TestFunction monomial(int j);
    static TestFunction reciprocal(int j);
    static TestFunction kernel(cplx b, int p = 1);

    cplx operator()(cplx z) const;
    cplx derivative(cplx a, int m) const; // f^(m)(a)
    cplx laurent(int k) const;            // coefficient of z^-k in f at infinity
    std::string describe() const;
};

// Throws InadmissibleTest unless f is holomorphic on the closure of the domain
// and, when the domain is unbounded, vanishes at infinity.
void require_admissible(const DomainSpec& spec, const TestFunction& f);

struct QuadCheckResult {
    cplx lhs;            // contour value of the area integral
    cplx rhs;            // node sum
    double residual = 0; // |lhs - rhs|
    std::string test;    // label of the test function
};

QuadCheckResult check_one(const DomainSpec& spec, const QuadratureData& qd,
                          const TestFunction& f, double tol = 1e-12);

// Standard battery: monomials 0..max_degree plus a ring of exterior pole
// kernels for bounded domains; reciprocal powers plus pole kernels inside the
// compact complement for unbounded ones.
std::vector<QuadCheckResult> check_battery(const DomainSpec& spec,
                                           const QuadratureData& qd,
                                           int max_degree = 5);

double max_residual(const std::vector<QuadCheckResult>& results);

} // namespace qd
