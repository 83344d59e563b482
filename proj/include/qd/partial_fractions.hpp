#pragma once
// Quadrature data <-> rational quadrature function.
//
// A quadrature function r encodes the identity
//     integral_Omega f dA  =  sum_k c_k f^(m_k)(a_k)        (finite nodes)
//                            - pi * sum_j b_j f_{j+1}        (node at infinity),
// where r(z) = sum_k c_k m_k! / (pi (z-a_k)^{m_k+1}) + sum_j b_j z^j and f_{k}
// are the Laurent coefficients of f at infinity (f(inf)=0 in the unbounded case).

#include "qd/rational.hpp"

#include <optional>

namespace qd {

struct NearCoincidentPoles : Error {
    using Error::Error;
};

struct QuadTerm {
    CPoint a;  // node location; a.inf means the polynomial part of r
    int m = 0; // derivative order (finite node) / power of z (infinite node)
    cplx c;    // quadrature coefficient c_k (finite) / coefficient b_m of z^m (infinite)
};

struct QuadratureData {
    std::vector<QuadTerm> terms;

    // d_Omega: degree of the rebuilt quadrature function
    int order() const;
    // number of distinct nodes; infinity counts when the polynomial part has degree >= 1
    int node_count() const;
    bool has_infinite_node() const; // polynomial part of degree >= 1
    int max_finite_multiplicity() const;
    Rational to_rational() const;
    // drop terms with |c| below tol, merge duplicate (a, m) entries
    QuadratureData cleaned(double tol = 1e-12) const;
};

// principal parts + polynomial part of r; poles closer than merge_tol are an error
QuadratureData partial_fractions(const Rational& r, double merge_tol = 1e-8);

} // namespace qd
