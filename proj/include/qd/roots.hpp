#pragma once
// Polynomial root finding: Aberth simultaneous iteration with a companion-matrix
// fallback, then multiplicity-aware polishing and clustering.

#include "qd/polynomial.hpp"

namespace qd {

struct RootFindFailure : Error {
    using Error::Error;
};

struct RootCluster {
    cplx z;
    int mult = 1;
};

struct RootOptions {
    double cluster_radius_rel = 1e-7; // scaled by max(1, root magnitude)
    int max_iters = 400;
    double residual_rel = 1e-9; // |p(r)| <= residual_rel * eval_scale(r)
};

// All roots with multiplicities; sum of multiplicities equals the degree.
// Throws RootFindFailure if neither Aberth nor the companion matrix produces
// roots passing the residual test.
std::vector<RootCluster> poly_roots(const Polynomial& p, const RootOptions& opt = {});

// Flat list (each root repeated per multiplicity), sorted by (re, im).
std::vector<cplx> poly_roots_flat(const Polynomial& p, const RootOptions& opt = {});

} // namespace qd
