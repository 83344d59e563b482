#pragma once
// Cauchy transforms and logarithmic potentials of uniform area measures, in
// closed form for discs and as midpoint sums over cell masks, plus the
// identity verifiers built on them.
//
// Conventions: C^E(z) = (1/pi) integral_E dA(w)/(z - w), and
// U^E(z) = (1/pi) integral_E log(1/|z - w|^2) dA(w) = -(2/pi) integral log|z - w|.
// Each cell is integrated as the disc of equal area centered at the cell
// center (radius h/sqrt(pi)), which keeps both transforms finite and
// continuous through cell centers.

#include "qd/raster.hpp"

#include <utility>
#include <vector>

namespace qd {

struct RankDeficient : Error {
    using Error::Error;
};

// disc transform: rho^2/(z-a) outside, conj(z-a) inside (continuous across |z-a|=rho)
cplx cauchy_disc(cplx a, double rho, cplx z);

cplx cauchy_raster(const RasterDroplet& K, cplx z);
double log_potential_raster(const RasterDroplet& K, cplx z);

// U^K sampled on every cell of K's grid via FFT convolution
GridField log_potential_grid(const RasterDroplet& K);

struct SchwarzResidual {
    double max_residual = 0.0;  // over all boundary samples
    double far_residual = 0.0;  // samples at least cusp_band from every cusp
    double near_cusp_residual = 0.0;
    double cusp_band = 0.0;
};
// max over boundary samples of |conj(z) - r(z) - C^{complement}(z)|.
// K is the compact-side mask: the complement for unbounded specs, Omega itself
// for bounded ones (the principal-value complement transform of a bounded
// domain is conj(z) - C^{Omega}(z), by exhausting the plane with centered discs).
SchwarzResidual verify_schwarz_identity(const DomainSpec& spec, const RasterDroplet& K,
                                        const QuadratureData& r, int n_samples = 1024);

struct EquilibriumReport {
    double gamma = 0.0;     // median of U^K + Q over the interior cells
    double deviation = 0.0; // max |U^K + Q - gamma| over cells >= 2 cells inside K
};
EquilibriumReport verify_equilibrium(const RasterDroplet& K, const GridField& Q);

// least-squares rational fit r = P/Q to samples of a Cauchy transform taken in
// the complement; linearized solve, reweighted, then one Gauss-Newton pass.
// Near-cancelling pole/zero pairs are pruned. poly_degree bounds the
// polynomial part (nodes at infinity).
QuadratureData fit_quadrature_function(const std::vector<std::pair<cplx, cplx>>& samples,
                                       int pole_budget, int poly_degree = 2);

} // namespace qd
