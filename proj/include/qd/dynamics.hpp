#pragma once
// Anti-holomorphic iteration z -> conj(R(z)): fixed-point search and
// classification, critical-orbit audits of the attracting-point count,
// Schwarz-reflection orbits with membership bookkeeping, and the
// multiply-connected model covering built from prescribed boundary degrees.

#include "qd/domain.hpp"
#include "qd/raster.hpp"
#include "qd/rational.hpp"

#include <vector>

namespace qd {

struct SeedGridExhausted : Error {
    using Error::Error;
};
struct EpsilonTooLarge : Error {
    using Error::Error;
};

// one iteration step; infinity passes through the sphere-aware evaluation
CPoint antiholo_step(const Rational& R, const CPoint& z);

enum class FPClass { Attracting, Repelling, Neutral };

struct FixedPointRecord {
    CPoint location;
    double multiplier_modulus = 0.0; // |R'(z0)|
    FPClass cls = FPClass::Attracting;
};

// All isolated solutions of R(z) = conj(z), the point at infinity included
// when R fixes it.  Multi-start Newton (64x64 seeds over the 3x-inflated hull
// of the zeros and poles), duplicates merged at 1e-8.  Classification uses a
// neutral band of 1e-8 on |R'| - 1; points on a neutral continuum (where the
// Newton system is singular) are reported only if a seed lands on them.
// Throws SeedGridExhausted when a non-degenerate residual minimum of
// |R(z) - conj(z)| on the seed grid stays unclaimed by every Newton start.
std::vector<FixedPointRecord> find_fixed_points(const Rational& R);

enum class OrbitOutcome { Converged, Escaped, Cycle, BudgetExhausted };

struct OrbitRecord {
    CPoint seed;
    std::vector<CPoint> trajectory; // seed included; length <= budget + 1
    OrbitOutcome verdict = OrbitOutcome::BudgetExhausted;
    int fixed_point_id = -1; // Converged against a supplied fixed-point list
    int cycle_length = 0;    // Cycle only
    int exit_step = -1;      // Escaped only: first index located in K
};

struct CriticalAudit {
    std::vector<FixedPointRecord> fixed_points;
    std::vector<CPoint> critical; // one entry per distinct critical point
    std::vector<OrbitRecord> orbits;
    std::vector<int> basin_hits;          // per fixed point: critical orbits it captured
    std::vector<int> budget_exhausted;    // orbit indices that ran out of budget
    bool all_attracting_reached = false;  // every attracting fixed point captured >= 1
};

// Iterate every critical point of R under the anti-holomorphic step and pair
// the attracting fixed points with the critical orbits they capture.  A miss
// (all_attracting_reached false with budget to spare) indicates a numerical
// fault, not a counterexample.  Neutral fixed points are excluded.
CriticalAudit critical_orbit_audit(const Rational& R, int budget = 10000);

struct ModelMap {
    Rational f;
    double epsilon = 0.0;
    int halvings = 0;     // schedule steps taken before the checks passed
    RasterDroplet U;      // window raster of {|f| < eps} resolving the bounded holes
    cplx v_center{0.0};   // V = {|z - v_center| < v_radius}
    double v_radius = 0.0;
    int connectivity = 0;
    std::vector<int> degrees; // boundary covering degrees: holes at 1..m-1, outer last
};

// f = eps^2 z^{nu_m} [1 + sum_{k<m} (z-k)^{-nu_k}], V = {|z| < eps},
// U = {|f| < eps}.  Verifies connectivity m, the boundary covering degrees
// via winding numbers along traced boundary components, clos V inside U, and
// sampled orbit convergence to 0; halves eps (at most 20 times) until all
// checks pass, then reports the accepted eps.  eps0 <= 0 selects the default
// schedule start 1/(10 * sum(nu) * m).
ModelMap model_map(const std::vector<int>& nu, double eps0 = 0.0);

// Orbits of z -> conj(S(z)) from the given seeds with membership bookkeeping:
// each step is located against Omega, its boundary, and the complement K; the
// first step landing in K ends the orbit (Escaped + exit_step).  Boundary
// seeds are fixed by the reflection.  InversionFailure from the Schwarz
// evaluation propagates.
std::vector<OrbitRecord> schwarz_dynamics(const DomainSpec& spec, const std::vector<cplx>& seeds,
                                          int budget = 256);

} // namespace qd
