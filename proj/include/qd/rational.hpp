#pragma once
// Rational functions num/den kept coprime (common roots cancelled numerically).
// Evaluation is sphere-aware: poles and the point at infinity produce CPoint::infinity().

#include "qd/polynomial.hpp"
#include "qd/roots.hpp"

namespace qd {

class Rational {
public:
    Rational() : num_(), den_(Polynomial::constant(1.0)) {}
    Rational(Polynomial num, Polynomial den, bool reduce_common = true);
    static Rational constant(cplx v) { return Rational(Polynomial::constant(v), Polynomial::constant(1.0), false); }

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }

    // degree as a map of the sphere: max(deg num, deg den)
    int degree() const { return num_.is_zero(0.0) ? 0 : std::max(num_.degree(), den_.degree()); }

    CPoint eval(const CPoint& z) const;
    cplx operator()(cplx z) const; // finite-input convenience; poles come back as huge values
    Rational derivative() const;   // quotient rule, reduced to coprime form

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;

    // numerator of the derivative before reduction: num' den - num den'
    Polynomial wronskian() const { return num_.derivative() * den_ - num_ * den_.derivative(); }

private:
    Polynomial num_, den_;
    void normalize();
};

struct CriticalPoint {
    CPoint z;
    int mult = 1;
};

// Critical points of R as a sphere map, the point at infinity included.
// Multiplicities sum to 2 deg R - 2 (checked; throws on mismatch).
std::vector<CriticalPoint> critical_points(const Rational& R);

// Cancel shared roots of n and d by matched deflation; tolerance relative to
// the root magnitude. Used both for exact reduction and, with a loose
// tolerance, for pruning near-cancelling pole/zero pairs from fits.
void cancel_common(Polynomial& n, Polynomial& d, double tol_rel = 1e-8);

} // namespace qd
