#pragma once
// Raster topology: component labeling under the 4/8 duality convention (set
// cells 4-connected, complement cells 8-connected), boundary-oval extraction,
// connectivity bookkeeping of complement components, and the connectivity and
// oval-count bound checkers.

#include "qd/raster.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qd {

struct PinchDetected : Error {
    using Error::Error;
};
struct KindDomainMismatch : Error {
    using Error::Error;
};

struct LabeledGrid {
    int nx = 0, ny = 0;
    int count = 0;          // number of components
    std::vector<int> label; // 0 = not part of the labeled set, 1..count otherwise
    int at(int i, int j) const { return label[(size_t)j * nx + i]; }
};

LabeledGrid label_components(const RasterDroplet& mask, int connectivity = 4);
// Complement labeling (8-connectivity); everything outside the grid belongs to
// the first component, so border-touching complement cells join it.
LabeledGrid label_complement(const RasterDroplet& mask);

// Closed boundary loops on the cell-edge lattice, set kept on the left (outer
// loops ccw, hole loops cw).  At saddle vertices the trace hugs its own set
// cell, which keeps diagonal set cells disconnected (the 4/8 convention).
// Vertices are physical coordinates; closure is implicit.
std::vector<std::vector<cplx>> extract_ovals(const RasterDroplet& mask);

struct TopologyReport {
    int k_components = 0;    // 4-connected components of the mask
    int q = 0;               // 8-connected components of the complement
    std::vector<int> conn;   // per complement component: number of boundary ovals
    std::vector<int> q_hist; // q_hist[j] = # complement components with conn == j
    int q_odd = 0;           // q_1 + q_3 + q_5 + ...
    std::vector<std::vector<cplx>> ovals;
    int oval_count() const { return (int)ovals.size(); }
};

// Labeling + oval extraction + adjacency.  Throws PinchDetected when one oval
// touches two different complement components (a zero-width corridor).
TopologyReport analyze(const RasterDroplet& mask);

// mask with its bounded complement components filled in (polynomial hull)
RasterDroplet fill_holes(const RasterDroplet& mask);

struct BoundVerdict {
    bool pass = false;
    std::string binding; // which bound was evaluated / binding
    int lhs = 0, rhs = 0;
    int slack = 0; // rhs - lhs
};

enum class QDKind { UQD, UQDNodeAtInfinity, BQD, BQDNoTripleNodes };

// Connectivity bound for a quadrature domain of order d with n nodes.  Below
// the kind's order threshold (2 unbounded, 3 bounded) no bound applies and the
// domain must be simply connected; inconsistent node counts throw
// KindDomainMismatch.
BoundVerdict check_theorem_A(int d, int n, QDKind kind, int conn);

// first: ovals + q_odd + 4(q - q_1) <= 2d + 2; second: ovals <= 2d - 2,
// which applies for d >= 3 only (vacuous pass below).
std::pair<BoundVerdict, BoundVerdict> check_ovals_bound(const TopologyReport& rep, int d);

enum class PackingKind { DiscsInDisc, CardioidsInEllipse };

// component-count bounds for packings of m subdomains: 2m - 2 for discs in a
// disc, 3m for cardioids in an ellipse
BoundVerdict packing_check(PackingKind kind, int m, int c);

} // namespace qd
