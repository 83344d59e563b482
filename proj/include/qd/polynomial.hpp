#pragma once
// Dense complex polynomials, coefficients ascending: p(z) = c[0] + c[1] z + ... + c[n] z^n.

#include "qd/complex_point.hpp"

#include <stdexcept>
#include <vector>

namespace qd {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Polynomial {
public:
    Polynomial() : c_{cplx(0.0)} {}
    explicit Polynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) c_.push_back(cplx(0.0));
        trim();
    }
    static Polynomial constant(cplx v) { return Polynomial({v}); }
    // z^k with unit coefficient
    static Polynomial monomial(int k, cplx a = 1.0);

    const std::vector<cplx>& coeffs() const { return c_; }
    int degree() const { return (int)c_.size() - 1; } // degree of the zero polynomial is 0 here
    bool is_zero(double tol = 0.0) const;
    cplx lead() const { return c_.back(); }

    cplx operator()(cplx z) const; // Horner
    // sum_k |c_k| |z|^k, the natural magnitude scale for residual tests
    double eval_scale(cplx z) const;

    Polynomial derivative() const;
    // antiderivative with zero constant term
    Polynomial antiderivative() const;
    // coefficient-wise conjugate: p*(z) = conj(p(conj z))
    Polynomial conj_coeffs() const;
    // synthetic division by (z - a); remainder returned through *rem if non-null
    Polynomial deflate(cplx a, cplx* rem = nullptr) const;
    // Taylor coefficients of p about a (same degree, shifted basis)
    std::vector<cplx> taylor_at(cplx a) const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(cplx s) const;

    double coeff_norm() const; // max |c_k|
    void trim(double tol = 0.0);

private:
    std::vector<cplx> c_;
};

// quotient and remainder of a/b; throws on zero divisor
void poly_divmod(const Polynomial& a, const Polynomial& b, Polynomial& q, Polynomial& r);

} // namespace qd
