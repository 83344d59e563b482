#include "qd/transforms.hpp"

#include <Eigen/Dense>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qd {

namespace {
const double INV_SQRT_PI = 0.5641895835477563; // 1/sqrt(pi)

// uniform-measure potential of one cell, as the equal-area disc
inline double cell_log_potential(double dist, double h) {
    double r = h * INV_SQRT_PI;
    if (dist >= r) return -2.0 * r * r * std::log(dist);
    return -2.0 * r * r * std::log(r) + (r * r - dist * dist);
}
} // namespace

cplx cauchy_disc(cplx a, double rho, cplx z) {
    cplx d = z - a;
    if (std::abs(d) < rho) return std::conj(d);
    return rho * rho / d;
}

cplx cauchy_raster(const RasterDroplet& K, cplx z) {
    double r = K.h * INV_SQRT_PI;
    double w = K.h * K.h / PI; // = r^2
    cplx acc = 0.0;
    for (int j = 0; j < K.ny; ++j) {
        double y = K.origin.imag() + (j + 0.5) * K.h;
        const std::uint8_t* row = &K.mask[(size_t)j * K.nx];
        for (int i = 0; i < K.nx; ++i) {
            if (!row[i]) continue;
            cplx d = z - cplx(K.origin.real() + (i + 0.5) * K.h, y);
            double dd = std::norm(d);
            if (dd >= r * r)
                acc += w / d;
            else
                acc += std::conj(d);
        }
    }
    return acc;
}

double log_potential_raster(const RasterDroplet& K, cplx z) {
    double acc = 0.0;
    for (int j = 0; j < K.ny; ++j) {
        double y = K.origin.imag() + (j + 0.5) * K.h;
        const std::uint8_t* row = &K.mask[(size_t)j * K.nx];
        for (int i = 0; i < K.nx; ++i) {
            if (!row[i]) continue;
            cplx d = z - cplx(K.origin.real() + (i + 0.5) * K.h, y);
            acc += cell_log_potential(std::abs(d), K.h);
        }
    }
    return acc;
}

GridField log_potential_grid(const RasterDroplet& K) {
    int NX = 2 * K.nx, NY = 2 * K.ny;
    size_t n = (size_t)NX * NY;
    size_t nc = (size_t)NY * (NX / 2 + 1);
    double* a = fftw_alloc_real(n);
    double* b = fftw_alloc_real(n);
    fftw_complex* fa = fftw_alloc_complex(nc);
    fftw_complex* fb = fftw_alloc_complex(nc);
    std::fill(a, a + n, 0.0);
    std::fill(b, b + n, 0.0);
    for (int j = 0; j < K.ny; ++j)
        for (int i = 0; i < K.nx; ++i)
            if (K.at(i, j)) a[(size_t)j * NX + i] = 1.0;
    // kernel with circular (wrap-around) index layout
    for (int dj = -K.ny + 1; dj < K.ny; ++dj)
        for (int di = -K.nx + 1; di < K.nx; ++di) {
            double dist = K.h * std::hypot((double)di, (double)dj);
            int jj = (dj + NY) % NY, ii = (di + NX) % NX;
            b[(size_t)jj * NX + ii] = cell_log_potential(dist, K.h);
        }
    fftw_plan pa = fftw_plan_dft_r2c_2d(NY, NX, a, fa, FFTW_ESTIMATE);
    fftw_plan pb = fftw_plan_dft_r2c_2d(NY, NX, b, fb, FFTW_ESTIMATE);
    fftw_execute(pa);
    fftw_execute(pb);
    for (size_t k = 0; k < nc; ++k) {
        double re = fa[k][0] * fb[k][0] - fa[k][1] * fb[k][1];
        double im = fa[k][0] * fb[k][1] + fa[k][1] * fb[k][0];
        fa[k][0] = re / (double)n;
        fa[k][1] = im / (double)n;
    }
    fftw_plan pi = fftw_plan_dft_c2r_2d(NY, NX, fa, a, FFTW_ESTIMATE);
    fftw_execute(pi);
    GridField U;
    U.origin = K.origin;
    U.h = K.h;
    U.nx = K.nx;
    U.ny = K.ny;
    U.v.assign((size_t)K.nx * K.ny, 0.0);
    for (int j = 0; j < K.ny; ++j)
        for (int i = 0; i < K.nx; ++i) U.at(i, j) = a[(size_t)j * NX + i];
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pi);
    fftw_free(a);
    fftw_free(b);
    fftw_free(fa);
    fftw_free(fb);
    return U;
}

SchwarzResidual verify_schwarz_identity(const DomainSpec& spec, const RasterDroplet& K,
                                        const QuadratureData& r, int n_samples) {
    Rational rr = r.to_rational();
    auto bd = boundary(spec, n_samples);
    std::vector<cplx> cusps;
    for (double th : univalence_check(spec).cusp_params) {
        cplx w = std::polar(1.0, th);
        cusps.push_back(spec.phi(w));
    }
    SchwarzResidual out;
    out.cusp_band = 5.0 * K.h;
    for (auto& bp : bd) {
        cplx z = bp.z;
        cplx comp = spec.unbounded ? cauchy_raster(K, z)
                                   : std::conj(z) - cauchy_raster(K, z);
        double res = std::abs(std::conj(z) - rr(z) - comp);
        out.max_residual = std::max(out.max_residual, res);
        double dc = std::numeric_limits<double>::infinity();
        for (auto& c : cusps) dc = std::min(dc, std::abs(z - c));
        if (dc < out.cusp_band)
            out.near_cusp_residual = std::max(out.near_cusp_residual, res);
        else
            out.far_residual = std::max(out.far_residual, res);
    }
    return out;
}

EquilibriumReport verify_equilibrium(const RasterDroplet& K, const GridField& Q) {
    if (Q.nx != K.nx || Q.ny != K.ny) throw Error("verify_equilibrium: geometry mismatch");
    GridField U = log_potential_grid(K);
    RasterDroplet interior = erode(K, 2);
    std::vector<double> vals;
    for (int j = 0; j < K.ny; ++j)
        for (int i = 0; i < K.nx; ++i)
            if (interior.at(i, j)) vals.push_back(U.at(i, j) + Q.at(i, j));
    EquilibriumReport rep;
    if (vals.empty()) return rep;
    size_t mid = vals.size() / 2;
    std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
    rep.gamma = vals[mid];
    for (double v : vals) rep.deviation = std::max(rep.deviation, std::abs(v - rep.gamma));
    return rep;
}

QuadratureData fit_quadrature_function(const std::vector<std::pair<cplx, cplx>>& samples,
                                       int pole_budget, int poly_degree) {
    using Mat = Eigen::MatrixXcd;
    using Vec = Eigen::VectorXcd;
    int b = pole_budget, p = std::max(0, poly_degree);
    int np = b + p + 1; // numerator coefficients
    int unknowns = np + b;
    if ((int)samples.size() < unknowns)
        throw RankDeficient("fit_quadrature_function: fewer samples than unknowns");

    int ns = (int)samples.size();
    Vec weights = Vec::Ones(ns);
    Vec sol(unknowns);
    for (int pass = 0; pass < 6; ++pass) {
        Mat A(ns, unknowns);
        Vec rhs(ns);
        for (int i = 0; i < ns; ++i) {
            cplx z = samples[i].first, C = samples[i].second;
            cplx pw = 1.0;
            for (int k = 0; k < np; ++k) {
                A(i, k) = pw * weights(i);
                pw *= z;
            }
            pw = 1.0;
            for (int k = 0; k < b; ++k) {
                A(i, np + k) = -C * pw * weights(i);
                pw *= z;
            }
            rhs(i) = C * pw * weights(i); // pw = z^b, the monic leading term
        }
        Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        sol = svd.solve(rhs);
        // reweight by the current denominator magnitude
        for (int i = 0; i < ns; ++i) {
            cplx z = samples[i].first, pw = 1.0;
            cplx qv = 0.0;
            for (int k = 0; k < b; ++k) {
                qv += sol(np + k) * pw;
                pw *= z;
            }
            qv += pw; // monic
            weights(i) = 1.0 / std::max(1e-8, std::abs(qv));
        }
    }
    std::vector<cplx> pc(np), qc(b + 1);
    for (int k = 0; k < np; ++k) pc[k] = sol(k);
    for (int k = 0; k < b; ++k) qc[k] = sol(np + k);
    qc[b] = 1.0;
    Polynomial P(pc), Q(qc);
    // prune near-cancelling pole/zero pairs, then exact common factors
    cancel_common(P, Q, 1e-5);
    Rational fitted(P, Q, true);

    // one Gauss-Newton pass on pole locations and principal-part coefficients
    QuadratureData qd = partial_fractions(fitted, 1e-6);
    {
        std::vector<QuadTerm>& T = qd.terms;
        int nfin = 0;
        for (auto& t : T)
            if (!t.a.inf) ++nfin;
        if (nfin > 0) {
            // parameters: each finite term's coefficient, plus one shared
            // location offset per distinct node
            std::vector<cplx> nodes;
            std::vector<int> node_of(T.size(), -1);
            for (size_t ti = 0; ti < T.size(); ++ti) {
                if (T[ti].a.inf) continue;
                int found = -1;
                for (size_t k = 0; k < nodes.size(); ++k)
                    if (std::abs(nodes[k] - T[ti].a.z) < 1e-9) found = (int)k;
                if (found < 0) {
                    nodes.push_back(T[ti].a.z);
                    found = (int)nodes.size() - 1;
                }
                node_of[ti] = found;
            }
            int nu = (int)T.size() + (int)nodes.size();
            Mat J(ns, nu);
            Vec F(ns);
            auto eval_terms = [&](cplx z) {
                cplx acc = 0.0;
                for (auto& t : T) {
                    if (t.a.inf) {
                        cplx pw = 1.0;
                        for (int q2 = 0; q2 < t.m; ++q2) pw *= z;
                        acc += t.c * pw;
                    } else {
                        cplx den = 1.0;
                        for (int q2 = 0; q2 <= t.m; ++q2) den *= (z - t.a.z);
                        acc += (t.c * std::tgamma(double(t.m + 1)) / PI) / den;
                    }
                }
                return acc;
            };
            for (int i = 0; i < ns; ++i) {
                cplx z = samples[i].first;
                F(i) = samples[i].second - eval_terms(z);
                for (size_t ti = 0; ti < T.size(); ++ti) {
                    auto& t = T[ti];
                    if (t.a.inf) {
                        cplx pw = 1.0;
                        for (int q2 = 0; q2 < t.m; ++q2) pw *= z;
                        J(i, ti) = pw;
                    } else {
                        cplx den = 1.0;
                        for (int q2 = 0; q2 <= t.m; ++q2) den *= (z - t.a.z);
                        J(i, ti) = (std::tgamma(double(t.m + 1)) / PI) / den;
                    }
                }
                for (size_t k = 0; k < nodes.size(); ++k) {
                    cplx dsum = 0.0;
                    for (size_t ti = 0; ti < T.size(); ++ti) {
                        auto& t = T[ti];
                        if (t.a.inf || node_of[ti] != (int)k) continue;
                        cplx den = 1.0;
                        for (int q2 = 0; q2 <= t.m + 1; ++q2) den *= (z - t.a.z);
                        dsum += (t.c * std::tgamma(double(t.m + 2)) / PI) / den;
                    }
                    J(i, T.size() + k) = dsum;
                }
            }
            Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
            Vec step = svd.solve(F);
            QuadratureData trial = qd;
            for (size_t ti = 0; ti < T.size(); ++ti) trial.terms[ti].c += step(ti);
            for (size_t ti = 0; ti < T.size(); ++ti)
                if (node_of[ti] >= 0)
                    trial.terms[ti].a.z += step(T.size() + node_of[ti]);
            // keep the step only if it reduces the worst residual
            auto worst = [&](const QuadratureData& d) {
                Rational rr = d.to_rational();
                double w = 0.0;
                for (auto& s : samples) w = std::max(w, std::abs(rr(s.first) - s.second));
                return w;
            };
            if (worst(trial) < worst(qd)) qd = trial;
        }
    }
    double scale = 0.0;
    for (auto& t : qd.terms) scale = std::max(scale, std::abs(t.c));
    return qd.cleaned(1e-6 * std::max(1e-30, scale));
}

} // namespace qd
