#include "qd/dynamics.hpp"

#include "qd/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

namespace qd {

namespace {

constexpr double kNeutralBand = 1e-8;
const double kInf = std::numeric_limits<double>::infinity();

FPClass classify(double mod) {
    if (std::abs(mod - 1.0) <= kNeutralBand) return FPClass::Neutral;
    return mod < 1.0 ? FPClass::Attracting : FPClass::Repelling;
}

// |R(z) - conj z|; poles come back as +inf
double fp_residual(const Rational& R, cplx z) {
    CPoint w = R.eval(CPoint(z));
    if (w.inf) return kInf;
    return std::abs(w.z - std::conj(z));
}

// The 2-real-dimensional system F(z) = R(z) - conj(z).  With R' = a + bi the
// Jacobian is [[a-1, -b], [b, a+1]], det = |R'|^2 - 1; it degenerates exactly
// on the neutral set.
bool newton_fixed(const Rational& R, const Rational& Rp, cplx z, cplx& out) {
    for (int it = 0; it < 60; ++it) {
        CPoint w = R.eval(CPoint(z));
        if (w.inf) return false;
        cplx F = w.z - std::conj(z);
        double scale = std::max({1.0, std::abs(z), std::abs(w.z)});
        if (std::abs(F) <= 1e-11 * scale) {
            out = z;
            return true;
        }
        CPoint dp = Rp.eval(CPoint(z));
        if (dp.inf) return false;
        double a = dp.z.real(), b = dp.z.imag();
        double det = a * a + b * b - 1.0;
        if (std::abs(det) < 1e-14) return false;
        double u = F.real(), v = F.imag();
        double dx = -(u * (a + 1.0) + v * b) / det;
        double dy = (u * b - v * (a - 1.0)) / det;
        double sl = std::hypot(dx, dy);
        double cap = 10.0 * std::max(1.0, std::abs(z));
        if (sl > cap) {
            dx *= cap / sl;
            dy *= cap / sl;
        }
        z += cplx(dx, dy);
    }
    return false;
}

// Levenberg-Marquardt descent on |F|^2; unlike the plain Newton step it stays
// bounded where the Jacobian degenerates (neutral continua), so it can refine
// a residual-grid minimum far enough to decide what lives there.
cplx lm_polish(const Rational& R, const Rational& Rp, cplx z) {
    double f0 = fp_residual(R, z);
    double lambda = 1e-6;
    for (int it = 0; it < 80 && std::isfinite(f0); ++it) {
        CPoint w = R.eval(CPoint(z));
        CPoint dp = Rp.eval(CPoint(z));
        if (w.inf || dp.inf) break;
        cplx F = w.z - std::conj(z);
        double a = dp.z.real(), b = dp.z.imag();
        // J^T J for J = [[a-1, -b], [b, a+1]]
        double g11 = (a - 1.0) * (a - 1.0) + b * b;
        double g22 = (a + 1.0) * (a + 1.0) + b * b;
        double g12 = (a - 1.0) * (-b) + b * (a + 1.0); // = 2b
        double u = F.real(), v = F.imag();
        double r1 = (a - 1.0) * u + b * v;
        double r2 = -b * u + (a + 1.0) * v;
        double m11 = g11 + lambda, m22 = g22 + lambda;
        double det = m11 * m22 - g12 * g12;
        if (det == 0.0) break;
        double dx = -(m22 * r1 - g12 * r2) / det;
        double dy = -(-g12 * r1 + m11 * r2) / det;
        cplx zn = z + cplx(dx, dy);
        double fn = fp_residual(R, zn);
        if (fn < f0) {
            z = zn;
            f0 = fn;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (f0 < 1e-13 * std::max(1.0, std::abs(z))) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    return z;
}

double deriv_modulus(const Rational& Rp, cplx z) {
    CPoint dp = Rp.eval(CPoint(z));
    return dp.inf ? kInf : std::abs(dp.z);
}

} // namespace

CPoint antiholo_step(const Rational& R, const CPoint& z) {
    CPoint w = R.eval(z);
    if (w.inf) return w;
    return CPoint(std::conj(w.z));
}

std::vector<FixedPointRecord> find_fixed_points(const Rational& R) {
    if (R.degree() == 0) {
        // constant map: everything lands on conj(c) in one step
        FixedPointRecord rec;
        rec.location = CPoint(std::conj(R(cplx(0.0))));
        rec.multiplier_modulus = 0.0;
        rec.cls = FPClass::Attracting;
        return {rec};
    }
    Rational Rp = R.derivative();

    // seed box: hull of the zeros and poles, inflated 3x, half-width >= 2
    std::vector<cplx> anchors;
    for (const Polynomial* p : {&R.num(), &R.den()}) {
        if (p->degree() < 1) continue;
        try {
            for (const auto& rc : poly_roots(*p)) anchors.push_back(rc.z);
        } catch (const RootFindFailure&) {
        }
    }
    double xlo = 0.0, xhi = 0.0, ylo = 0.0, yhi = 0.0;
    for (size_t i = 0; i < anchors.size(); ++i) {
        double x = anchors[i].real(), y = anchors[i].imag();
        if (i == 0) {
            xlo = xhi = x;
            ylo = yhi = y;
        } else {
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
        }
    }
    cplx ctr(0.5 * (xlo + xhi), 0.5 * (ylo + yhi));
    double hw = 3.0 * std::max(0.5 * (xhi - xlo), 0.5 * (yhi - ylo));
    hw = std::max(hw, 2.0);

    const int N = 64;
    double cell = 2.0 * hw / N;
    auto seed_at = [&](int i, int j) {
        return ctr + cplx(-hw + (i + 0.5) * cell, -hw + (j + 0.5) * cell);
    };

    std::vector<cplx> sols;
    auto claim = [&](cplx z) {
        for (cplx s : sols)
            if (std::abs(s - z) <= 1e-8 * std::max(1.0, std::abs(s))) return;
        sols.push_back(z);
    };
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) {
            cplx out;
            if (newton_fixed(R, Rp, seed_at(i, j), out)) claim(out);
        }

    // residual scan: a sharp interior minimum of |R(z) - conj z| that no Newton
    // start claimed and that is not on a neutral set means the grid missed a
    // genuine solution
    std::vector<double> resid((size_t)N * N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) resid[(size_t)j * N + i] = fp_residual(R, seed_at(i, j));
    for (int j = 1; j < N - 1; ++j)
        for (int i = 1; i < N - 1; ++i) {
            double r0 = resid[(size_t)j * N + i];
            if (!std::isfinite(r0)) continue;
            bool strict_min = true;
            for (int dj = -1; dj <= 1 && strict_min; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (!di && !dj) continue;
                    if (resid[(size_t)(j + dj) * N + (i + di)] <= r0) {
                        strict_min = false;
                        break;
                    }
                }
            if (!strict_min) continue;
            cplx g = seed_at(i, j);
            if (r0 > 0.75 * cell * (deriv_modulus(Rp, g) + 1.0)) continue;
            bool near_sol = false;
            for (cplx s : sols)
                if (std::abs(s - g) <= 2.0 * cell) near_sol = true;
            if (near_sol) continue;
            cplx zp = lm_polish(R, Rp, g);
            for (cplx s : sols)
                if (std::abs(s - zp) <= 1e-6 * std::max(1.0, std::abs(s))) near_sol = true;
            if (near_sol) continue;
            if (std::abs(deriv_modulus(Rp, zp) - 1.0) < 1e-3) continue; // neutral set
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "fixed-point search: residual minimum %.3e at (%.6g, %.6g) unclaimed",
                          fp_residual(R, zp), zp.real(), zp.imag());
            throw SeedGridExhausted(buf);
        }

    std::sort(sols.begin(), sols.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    std::vector<FixedPointRecord> out;
    for (cplx s : sols) {
        FixedPointRecord rec;
        rec.location = CPoint(s);
        rec.multiplier_modulus = deriv_modulus(Rp, s);
        rec.cls = classify(rec.multiplier_modulus);
        out.push_back(rec);
    }

    // infinity is fixed iff R has a pole there; in the chart w = 1/z the map
    // reads w -> conj(1/R(1/w)), multiplier |den lead / num lead| when the
    // degree gap is one and zero beyond that
    int dn = R.num().is_zero(0.0) ? 0 : R.num().degree();
    int dd = R.den().degree();
    if (dn > dd) {
        FixedPointRecord rec;
        rec.location = CPoint::infinity();
        rec.multiplier_modulus = dn - dd >= 2 ? 0.0 : std::abs(R.den().lead() / R.num().lead());
        rec.cls = classify(rec.multiplier_modulus);
        out.push_back(rec);
    }
    return out;
}

CriticalAudit critical_orbit_audit(const Rational& R, int budget) {
    if (R.degree() < 2) throw Error("critical_orbit_audit: degree must be at least 2");
    CriticalAudit A;
    A.fixed_points = find_fixed_points(R);
    for (const CriticalPoint& cp : critical_points(R)) A.critical.push_back(cp.z);
    A.basin_hits.assign(A.fixed_points.size(), 0);

    for (size_t ci = 0; ci < A.critical.size(); ++ci) {
        OrbitRecord rec;
        rec.seed = A.critical[ci];
        rec.trajectory.push_back(rec.seed);
        CPoint z = rec.seed;
        CPoint anchor = z; // Brent bracketing: anchor advances at powers of two
        int power = 1, lam = 1;
        rec.verdict = OrbitOutcome::BudgetExhausted;
        for (int step = 1; step <= budget; ++step) {
            z = antiholo_step(R, z);
            rec.trajectory.push_back(z);
            int hit = -1;
            for (size_t k = 0; k < A.fixed_points.size(); ++k)
                if (chordal(z, A.fixed_points[k].location) < 1e-9) {
                    hit = (int)k;
                    break;
                }
            if (hit >= 0) {
                rec.verdict = OrbitOutcome::Converged;
                rec.fixed_point_id = hit;
                A.basin_hits[(size_t)hit]++;
                break;
            }
            if (chordal(z, anchor) < 1e-10) {
                rec.verdict = OrbitOutcome::Cycle;
                rec.cycle_length = lam;
                break;
            }
            if (lam == power) {
                anchor = z;
                power *= 2;
                lam = 0;
            }
            ++lam;
        }
        if (rec.verdict == OrbitOutcome::BudgetExhausted) A.budget_exhausted.push_back((int)ci);
        A.orbits.push_back(std::move(rec));
    }

    A.all_attracting_reached = true;
    for (size_t k = 0; k < A.fixed_points.size(); ++k)
        if (A.fixed_points[k].cls == FPClass::Attracting && A.basin_hits[k] == 0)
            A.all_attracting_reached = false;
    return A;
}

namespace {

double absf(const Rational& f, cplx z) {
    CPoint w = f.eval(CPoint(z));
    return w.inf ? kInf : std::abs(w.z);
}

// num = eps^2 z^{nu_m} (Q + sum_j Q/(z-j)^{nu_j}), den = Q with
// Q = prod_{k<m} (z-k)^{nu_k}; the den factors never divide the num (the
// bracket is nonzero at each pole), so the pair is already coprime
Rational build_model(const std::vector<int>& nu, double eps) {
    int m = (int)nu.size();
    auto lin = [](int k) { return Polynomial({cplx(-(double)k), cplx(1.0)}); };
    Polynomial Q = Polynomial::constant(1.0);
    for (int k = 1; k < m; ++k)
        for (int t = 0; t < nu[(size_t)k - 1]; ++t) Q = Q * lin(k);
    Polynomial S = Polynomial::constant(0.0);
    for (int j = 1; j < m; ++j) {
        Polynomial P = Polynomial::constant(1.0);
        for (int k = 1; k < m; ++k) {
            if (k == j) continue;
            for (int t = 0; t < nu[(size_t)k - 1]; ++t) P = P * lin(k);
        }
        S = S + P;
    }
    Polynomial num = (Polynomial::monomial(nu.back()) * (Q + S)) * cplx(eps * eps);
    return Rational(num, Q);
}

// winding number of f along a closed polyline, by stepwise argument increments;
// callers keep vertex spacing small enough that each increment stays under pi
double winding_along(const Rational& f, const std::vector<cplx>& loop) {
    double tot = 0.0;
    cplx prev = f(loop.back());
    for (cplx v : loop) {
        cplx cur = f(v);
        tot += std::arg(cur / prev);
        prev = cur;
    }
    return tot / (2.0 * PI);
}

RasterDroplet sublevel_mask(const Rational& f, cplx lo, cplx hi, double h, double eps) {
    RasterDroplet m = make_raster(lo, hi, h);
    for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i)
            if (absf(f, m.cell_center(i, j)) < eps) m.set(i, j, true);
    return m;
}

bool loop_touches_border(const std::vector<cplx>& loop, const RasterDroplet& m) {
    double x1 = m.origin.real(), y1 = m.origin.imag();
    double x2 = x1 + m.nx * m.h, y2 = y1 + m.ny * m.h;
    double band = 0.51 * m.h;
    for (cplx v : loop)
        if (v.real() < x1 + band || v.real() > x2 - band || v.imag() < y1 + band ||
            v.imag() > y2 - band)
            return true;
    return false;
}

// one attempt at a given eps; false = shrink eps and retry
bool model_verify(const Rational& f, const std::vector<int>& nu, double eps, ModelMap& mm) {
    int m = (int)nu.size();
    double Rout = std::pow(eps, -1.0 / nu.back());
    std::vector<double> hole_r((size_t)m - 1, 0.0);

    if (m >= 2 && eps >= 0.25) return false; // V must clear the pole at 1 by a wide margin

    // bound each pole's excluded patch {|f| >= eps} by a circle: bisect the
    // largest radius where the ring still meets the patch
    for (int k = 1; k < m; ++k) {
        auto ring_max = [&](double r) {
            double mx = 0.0;
            for (int q = 0; q < 64; ++q) {
                double th = 2.0 * PI * q / 64;
                mx = std::max(mx, absf(f, cplx((double)k, 0.0) + std::polar(r, th)));
            }
            return mx;
        };
        double rlo = 1e-12, rhi = 0.45;
        if (!(ring_max(rlo) >= eps)) return false;
        if (!(ring_max(rhi) < eps)) return false; // patch reaches halfway to a neighbor
        for (int it = 0; it < 60; ++it) {
            double rm = 0.5 * (rlo + rhi);
            (ring_max(rm) >= eps ? rlo : rhi) = rm;
        }
        hole_r[(size_t)k - 1] = rhi;
        if (rhi > 0.125) return false;
    }

    mm.degrees.assign((size_t)m, 0);

    // fine window per pole: the patch must be a single bounded complement
    // component containing the pole, its boundary winding |nu_k|
    for (int k = 1; k < m; ++k) {
        double r = hole_r[(size_t)k - 1];
        double w = 3.0 * r, hk = r / 8.0;
        cplx c((double)k, 0.0);
        RasterDroplet M = sublevel_mask(f, c - cplx(w, w), c + cplx(w, w), hk, eps);
        for (int i = 0; i < M.nx; ++i)
            if (!M.at(i, 0) || !M.at(i, M.ny - 1)) return false;
        for (int j = 0; j < M.ny; ++j)
            if (!M.at(0, j) || !M.at(M.nx - 1, j)) return false;
        LabeledGrid comp = label_complement(M);
        if (comp.count != 2) return false; // frame + exactly one hole
        auto [pi, pj] = M.locate(c);
        if (!M.in_bounds(pi, pj) || comp.at(pi, pj) != 2) return false;
        std::vector<std::vector<cplx>> loops;
        for (auto& L : extract_ovals(M))
            if (!loop_touches_border(L, M)) loops.push_back(std::move(L));
        if (loops.size() != 1) return false;
        double wind = std::abs(winding_along(f, loops[0]));
        int got = (int)std::lround(wind);
        if (std::abs(wind - got) > 0.2 || got != nu[(size_t)k - 1]) return false;
        mm.degrees[(size_t)k - 1] = got;
    }

    // coarse window around the whole of U
    double L = 1.3 * Rout;
    RasterDroplet C = sublevel_mask(f, cplx(-L, -L), cplx(L, L), 2.0 * L / 512, eps);
    if (C.empty()) return false;
    for (int i = 0; i < C.nx; ++i)
        if (C.at(i, 0) || C.at(i, C.ny - 1)) return false;
    for (int j = 0; j < C.ny; ++j)
        if (C.at(0, j) || C.at(C.nx - 1, j)) return false;
    LabeledGrid comp = label_complement(C);
    for (int lab = 2; lab <= comp.count; ++lab) {
        bool has_pole = false;
        for (int k = 1; k < m; ++k) {
            auto [pi, pj] = C.locate(cplx((double)k, 0.0));
            if (C.in_bounds(pi, pj) && comp.at(pi, pj) == lab) has_pole = true;
        }
        if (!has_pole) return false; // a hole the fine windows did not certify
    }

    // outer boundary: the largest oval; its winding is the covering degree there
    std::vector<std::vector<cplx>> ovals = extract_ovals(C);
    if (ovals.empty()) return false;
    size_t best = 0;
    double bestspan = -1.0;
    for (size_t i = 0; i < ovals.size(); ++i) {
        double x1 = kInf, x2 = -kInf, y1 = kInf, y2 = -kInf;
        for (cplx v : ovals[i]) {
            x1 = std::min(x1, v.real());
            x2 = std::max(x2, v.real());
            y1 = std::min(y1, v.imag());
            y2 = std::max(y2, v.imag());
        }
        double span = (x2 - x1) * (y2 - y1);
        if (span > bestspan) {
            bestspan = span;
            best = i;
        }
    }
    if (loop_touches_border(ovals[best], C)) return false;
    double wout = std::abs(winding_along(f, ovals[best]));
    int got = (int)std::lround(wout);
    if (std::abs(wout - got) > 0.2 || got != nu.back()) return false;
    mm.degrees.back() = got;

    // clos V inside U: f is pole-free on clos V, so the circle maximum bounds
    // the disc by the maximum principle; a dense sample cross-checks the ring
    for (int q = 0; q < 512; ++q)
        if (!(absf(f, std::polar(eps, 2.0 * PI * q / 512)) < eps)) return false;
    for (int j = -16; j <= 16; ++j)
        for (int i = -16; i <= 16; ++i) {
            cplx z(eps * i / 16.0, eps * j / 16.0);
            if (std::abs(z) <= eps && !(absf(f, z) < eps)) return false;
        }

    // orbits from around U must fall into V at the first step and then to 0
    std::vector<cplx> seeds;
    for (int q = 0; q < 8; ++q) seeds.push_back(std::polar(0.6 * Rout, 2.0 * PI * (q + 0.5) / 8));
    for (int k = 1; k < m; ++k)
        seeds.push_back(cplx((double)k, 0.0) + std::polar(2.0 * hole_r[(size_t)k - 1], PI / 3));
    seeds.push_back(cplx(0.5, 0.0));
    for (cplx s : seeds) {
        if (!(absf(f, s) < eps)) continue; // only seeds genuinely in U
        CPoint z(s);
        bool down = false;
        for (int step = 1; step <= 300; ++step) {
            z = antiholo_step(f, z);
            if (z.inf) return false;
            if (step == 1 && !(std::abs(z.z) < eps)) return false;
            if (std::abs(z.z) <= 1e-12) {
                down = true;
                break;
            }
        }
        if (!down) return false;
    }

    mm.f = f;
    mm.epsilon = eps;
    mm.U = std::move(C);
    mm.v_center = cplx(0.0);
    mm.v_radius = eps;
    mm.connectivity = m;
    return true;
}

} // namespace

ModelMap model_map(const std::vector<int>& nu, double eps0) {
    if (nu.empty()) throw Error("model_map: degree list is empty");
    long snu = 0;
    for (int v : nu) {
        if (v < 1) throw Error("model_map: degrees must be positive");
        snu += v;
    }
    double eps = eps0 > 0.0 ? eps0 : 1.0 / (10.0 * (double)snu * (double)nu.size());
    for (int h = 0; h <= 20; ++h) {
        ModelMap mm;
        if (model_verify(build_model(nu, eps), nu, eps, mm)) {
            mm.halvings = h;
            return mm;
        }
        eps *= 0.5;
    }
    throw EpsilonTooLarge("model map: epsilon schedule exhausted 20 halvings");
}

std::vector<OrbitRecord> schwarz_dynamics(const DomainSpec& spec, const std::vector<cplx>& seeds,
                                          int budget) {
    std::vector<OrbitRecord> out;
    out.reserve(seeds.size());
    for (cplx s : seeds) {
        OrbitRecord rec;
        rec.seed = CPoint(s);
        rec.trajectory.push_back(rec.seed);
        if (point_location(spec, s) == Location::Complement) {
            rec.verdict = OrbitOutcome::Escaped;
            rec.exit_step = 0;
            out.push_back(std::move(rec));
            continue;
        }
        cplx z = s;
        CPoint anchor(s);
        int power = 1, lam = 1;
        rec.verdict = OrbitOutcome::BudgetExhausted;
        for (int step = 1; step <= budget; ++step) {
            CPoint w = schwarz_eval(spec, z);
            CPoint next = w.inf ? CPoint::infinity() : CPoint(std::conj(w.z));
            rec.trajectory.push_back(next);
            if (next.inf) {
                // infinity lies in K exactly when Omega is bounded; either way
                // the finite-chart iteration stops here
                if (!spec.unbounded) {
                    rec.verdict = OrbitOutcome::Escaped;
                    rec.exit_step = step;
                }
                break;
            }
            Location loc = point_location(spec, next.z);
            if (loc == Location::Complement) {
                rec.verdict = OrbitOutcome::Escaped;
                rec.exit_step = step;
                break;
            }
            if (loc == Location::Boundary || chordal(next, CPoint(z)) < 1e-12) {
                rec.verdict = OrbitOutcome::Converged; // reflection fixes the boundary
                break;
            }
            if (chordal(next, anchor) < 1e-12) {
                rec.verdict = OrbitOutcome::Cycle;
                rec.cycle_length = lam;
                break;
            }
            if (lam == power) {
                anchor = next;
                power *= 2;
                lam = 0;
            }
            ++lam;
            z = next.z;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace qd
