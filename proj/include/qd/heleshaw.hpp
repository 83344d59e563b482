#pragma once
// Backward Hele-Shaw chains of algebraic droplets via an obstacle problem.
//
// A seed droplet K0 with rational anti-holomorphic velocity h (poles off K0)
// determines the potential Q = |z|^2 - H, where H = 2 Re integral of h plus an
// integration constant per component of K0, fixed so that |z|^2 - H + U^{K0}
// vanishes at a deep interior point of each component. Smaller droplets of
// mass pi*t are coincidence sets {V = Q} of the largest subharmonic function
// V below (Q on the localization mask, +infinity off it) that grows like
// t log|z - source|^2 + c; suction at a finite point a adds the sink term
// (t0 - t) log(1/|z - a|^2) to the obstacle.

#include "qd/partial_fractions.hpp"
#include "qd/raster.hpp"
#include "qd/topology.hpp"
#include "qd/transforms.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qd {

struct PeriodNonzero : Error {
    using Error::Error;
};
struct PoleInDroplet : Error {
    using Error::Error;
};
struct BoxTooSmall : Error {
    using Error::Error;
};
struct NonConvergence : Error {
    using Error::Error;
};

struct PotentialField {
    RasterDroplet K0; // seed droplet, the usual localization mask
    Rational h;       // rational velocity; poles lie off K0
    GridField Q;      // |z|^2 - H with the per-component constants folded in
    std::vector<double> constants; // integration constant per 4-component of K0
    std::vector<cplx> poles;       // distinct finite poles of h
    double t0 = 0.0;               // area(K0)/pi
};

// Integrate 2 Re int h dz over a spanning tree of grid cells whose paths keep
// maximal clearance from the poles (Simpson rule per edge), then fix the
// constant of each K0 component and assemble Q on the whole grid (cells off
// K0 use the constant of the nearest component, so Q is only meaningful as an
// obstacle through a localization mask).
// Throws PoleInDroplet when a pole cell lies in K0, and PeriodNonzero when a
// pole inside the grid has a residue with nonzero imaginary part (H would be
// multivalued around it); tolerance 1e-6 on the real period 2*pi*Im(res).
PotentialField build_potential(const Rational& h, const RasterDroplet& K0);

// max |discrete Laplacian of Q - 4| over K0 cells whose 4-neighbourhood stays
// in K0 and which sit at least pole_margin cells from every pole
double laplacian_defect(const PotentialField& P, int pole_margin = 20);

struct ObstacleResult {
    GridField V;
    RasterDroplet coincidence; // cells with V = obstacle
    double c = 0.0;            // calibrated constant in the boundary data
    double mass = 0.0;         // area(coincidence)/pi
    int sweeps = 0;            // projected SOR sweeps over all levels and recalibrations
    double final_update = 0.0; // last max update at the finest level
    double harmonic_defect = 0.0;    // max |Lap V| over interior cells off the coincidence set
    double min_subharmonicity = 0.0; // min Lap V over interior cells
};

// Solve the obstacle problem for mass pi*t on localization mask K (same grid
// as P.Q). Projected red-black SOR (omega = 1.8, convergence when the max
// update drops below 1e-10 * data scale) under a coarse-to-fine cascade; the
// boundary constant c is calibrated by a bracketed secant loop until
// |mass - t| <= mass_rtol * t. source = nullopt means suction at infinity.
// Throws BoxTooSmall when K or the coincidence set comes within 3 cells of
// the data ring or the far-field data fail the normal-derivative check at the
// ring, and NonConvergence when the calibration stalls.
ObstacleResult obstacle_solve(const PotentialField& P, const RasterDroplet& K, double t,
                              std::optional<cplx> source = std::nullopt,
                              double mass_rtol = 0.01);

// support of the area measure of a coincidence raster: keep the union of all
// fully set 2x2 blocks (drops isolated cells and width-1 filaments), then peel
// any remaining cells with at most one 4-neighbour
RasterDroplet droplet_from_coincidence(const RasterDroplet& K_star);

struct ChainStage {
    double t = 0.0;
    RasterDroplet K;     // cleaned droplet
    RasterDroplet Kstar; // raw coincidence set
    double area = 0.0;
    double area_defect = 0.0; // |area - pi t|
    int components = 0;
    bool singular = false; // component count changed since the previous stage
    double gamma = 0.0;    // equilibrium constant U^K + Q_eff on the droplet
    double equilibrium_dev = 0.0;
    double c = 0.0;
    int sweeps = 0;
};

struct ChainRecord {
    std::vector<ChainStage> stages;
    std::optional<cplx> source;
    bool monotone = true;        // K_{t_i} subset of K_{t_j} for t_i < t_j
    bool strong_monotone = true; // filled hull of K_{t_i} inside eroded filled hull
                                 // of K_{t_j} when pi (t_j - t_i) > 10 cell areas
    double max_area_defect = 0.0;
    double max_equilibrium_dev = 0.0;
};

// One obstacle solve per time (ascending, max <= area(K)/pi), droplets cleaned
// by droplet_from_coincidence, nesting and area and equilibrium diagnostics
// recorded. Equilibrium is checked against Q plus the sink term when source
// is finite.
ChainRecord chain(const PotentialField& P, const RasterDroplet& K,
                  const std::vector<double>& times,
                  std::optional<cplx> source = std::nullopt);

// Back off the terminal mass by dt (default: 20 cell areas / pi) and re-solve,
// resolving double contact points of a singular seed droplet into separated
// components.
RasterDroplet perturb_to_nonsingular(const PotentialField& P, const RasterDroplet& K,
                                     double dt = -1.0,
                                     std::optional<cplx> source = std::nullopt);

// masks K_0000.pgm... plus manifest.json {times, areas, components, singular}
void save_chain(const ChainRecord& rec, const std::string& dir);

} // namespace qd
