#include "qd/heleshaw.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <queue>
#include <vector>

#include <json.hpp>

namespace qd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// multi-source BFS cell distance (4-neighbourhood) from the cells containing
// the poles and their 8-neighbourhoods; "far" when there are no poles in view
std::vector<int> pole_cell_distance(const RasterDroplet& g, const std::vector<cplx>& poles) {
    int nx = g.nx, ny = g.ny;
    int far = nx + ny + 2;
    std::vector<int> dist((size_t)nx * ny, far);
    std::queue<int> q;
    for (cplx p : poles) {
        auto [pi, pj] = g.locate(p);
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                int i = pi + di, j = pj + dj;
                if (!g.in_bounds(i, j)) continue;
                size_t id = (size_t)j * nx + i;
                if (dist[id] != 0) {
                    dist[id] = 0;
                    q.push((int)id);
                }
            }
    }
    const int DX[4] = {1, -1, 0, 0}, DY[4] = {0, 0, 1, -1};
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        int i = u % nx, j = u / nx;
        for (int d = 0; d < 4; ++d) {
            int ii = i + DX[d], jj = j + DY[d];
            if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) continue;
            size_t id = (size_t)jj * nx + ii;
            if (dist[id] > dist[(size_t)u] + 1) {
                dist[id] = dist[(size_t)u] + 1;
                q.push((int)id);
            }
        }
    }
    return dist;
}

// F = 2 Re int h along a spanning tree whose paths maximize the minimal
// clearance from the poles (bottleneck Dijkstra); Simpson rule per cell edge
std::vector<double> integrate_velocity(const RasterDroplet& g, const Rational& h,
                                       const std::vector<int>& dist) {
    int nx = g.nx, ny = g.ny;
    size_t n = (size_t)nx * ny;
    std::vector<double> F(n, 0.0);
    std::vector<int> bot(n, -1);
    std::vector<char> done(n, 0);
    int root = 0;
    {
        long long best = -1;
        for (size_t u = 0; u < n; ++u) {
            int i = (int)(u % nx), j = (int)(u / nx);
            // prefer central cells among equal clearances
            long long score = (long long)dist[u] * 4 * (nx + ny) -
                              (std::abs(2 * i - nx) + std::abs(2 * j - ny));
            if (score > best) {
                best = score;
                root = (int)u;
            }
        }
    }
    std::priority_queue<std::pair<int, int>> pq;
    bot[(size_t)root] = dist[(size_t)root];
    pq.push({bot[(size_t)root], root});
    const int DX[4] = {1, -1, 0, 0}, DY[4] = {0, 0, 1, -1};
    while (!pq.empty()) {
        auto [b, u] = pq.top();
        pq.pop();
        if (done[(size_t)u]) continue;
        done[(size_t)u] = 1;
        int i = u % nx, j = u / nx;
        cplx zu = g.cell_center(i, j);
        for (int d = 0; d < 4; ++d) {
            int ii = i + DX[d], jj = j + DY[d];
            if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) continue;
            size_t v = (size_t)jj * nx + ii;
            if (done[v]) continue;
            int nb = std::min(b, dist[v]);
            if (nb > bot[v]) {
                bot[v] = nb;
                cplx zv = g.cell_center(ii, jj);
                cplx seg = (zv - zu) / 6.0 * (h(zu) + 4.0 * h(0.5 * (zu + zv)) + h(zv));
                double val = F[(size_t)u] + 2.0 * std::real(seg);
                F[v] = std::isfinite(val) ? val : F[(size_t)u]; // exact pole hit
                pq.push({nb, (int)v});
            }
        }
    }
    return F;
}

// per-cell label of the nearest K0 component (BFS flood outward from K0)
std::vector<int> nearest_component(const RasterDroplet& K0, const LabeledGrid& comps) {
    int nx = K0.nx, ny = K0.ny;
    std::vector<int> lab((size_t)nx * ny, 0);
    std::queue<int> q;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (comps.at(i, j) > 0) {
                lab[(size_t)j * nx + i] = comps.at(i, j);
                q.push(j * nx + i);
            }
    if (q.empty()) throw Error("build_potential: empty droplet");
    const int DX[4] = {1, -1, 0, 0}, DY[4] = {0, 0, 1, -1};
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        int i = u % nx, j = u / nx;
        for (int d = 0; d < 4; ++d) {
            int ii = i + DX[d], jj = j + DY[d];
            if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) continue;
            size_t id = (size_t)jj * nx + ii;
            if (lab[id] == 0) {
                lab[id] = lab[(size_t)(j * nx + i)];
                q.push((int)id);
            }
        }
    }
    return lab;
}

} // namespace

PotentialField build_potential(const Rational& h, const RasterDroplet& K0) {
    PotentialField P;
    P.K0 = K0;
    P.h = h;
    P.t0 = K0.area() / PI;

    QuadratureData pf = partial_fractions(h, 1e-8);
    std::vector<cplx> residues;
    for (const auto& tm : pf.terms) {
        if (tm.a.inf) continue;
        int k = -1;
        for (size_t s = 0; s < P.poles.size(); ++s)
            if (std::abs(P.poles[s] - tm.a.z) < 1e-12) k = (int)s;
        if (k < 0) {
            P.poles.push_back(tm.a.z);
            residues.push_back(0.0);
            k = (int)P.poles.size() - 1;
        }
        if (tm.m == 0) residues[(size_t)k] += tm.c / PI;
    }
    for (size_t k = 0; k < P.poles.size(); ++k) {
        auto [i, j] = K0.locate(P.poles[k]);
        if (K0.at(i, j)) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "pole at (%g, %g) lies inside the droplet",
                          P.poles[k].real(), P.poles[k].imag());
            throw PoleInDroplet(buf);
        }
        // a loop in the grid can only wind around poles the grid contains
        double re_period = 2.0 * PI * std::abs(std::imag(residues[k]));
        if (K0.in_bounds(i, j) && re_period > 1e-6) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "residue at (%g, %g) has Im = %.3e, real period %.3e > 1e-6",
                          P.poles[k].real(), P.poles[k].imag(), std::imag(residues[k]),
                          re_period);
            throw PeriodNonzero(buf);
        }
    }

    std::vector<int> pdist = pole_cell_distance(K0, P.poles);
    std::vector<double> F = integrate_velocity(K0, h, pdist);

    LabeledGrid comps = label_components(K0, 4);
    // representative per component: a deepest-interior cell
    std::vector<int> depth((size_t)K0.nx * K0.ny, 0);
    {
        std::queue<int> q;
        for (int j = 0; j < K0.ny; ++j)
            for (int i = 0; i < K0.nx; ++i)
                if (!K0.at(i, j) || i == 0 || j == 0 || i == K0.nx - 1 || j == K0.ny - 1) {
                    depth[(size_t)j * K0.nx + i] = 1;
                    q.push(j * K0.nx + i);
                }
        const int DX[4] = {1, -1, 0, 0}, DY[4] = {0, 0, 1, -1};
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            int i = u % K0.nx, j = u / K0.nx;
            for (int d = 0; d < 4; ++d) {
                int ii = i + DX[d], jj = j + DY[d];
                if (ii < 0 || ii >= K0.nx || jj < 0 || jj >= K0.ny) continue;
                size_t id = (size_t)jj * K0.nx + ii;
                if (depth[id] == 0) {
                    depth[id] = depth[(size_t)(j * K0.nx + i)] + 1;
                    q.push((int)id);
                }
            }
        }
    }
    std::vector<int> rep((size_t)comps.count, -1);
    for (int j = 0; j < K0.ny; ++j)
        for (int i = 0; i < K0.nx; ++i) {
            int l = comps.at(i, j);
            if (l == 0) continue;
            int u = j * K0.nx + i;
            if (rep[(size_t)l - 1] < 0 || depth[(size_t)u] > depth[(size_t)rep[(size_t)l - 1]])
                rep[(size_t)l - 1] = u;
        }
    P.constants.resize((size_t)comps.count, 0.0);
    for (int l = 0; l < comps.count; ++l) {
        int u = rep[(size_t)l];
        cplx zl = K0.cell_center(u % K0.nx, u / K0.nx);
        P.constants[(size_t)l] =
            std::norm(zl) + log_potential_raster(K0, zl) - F[(size_t)u];
    }

    std::vector<int> near = nearest_component(K0, comps);
    P.Q = make_field(K0.origin, K0.origin + cplx(K0.nx * K0.h, K0.ny * K0.h), K0.h);
    for (int j = 0; j < K0.ny; ++j)
        for (int i = 0; i < K0.nx; ++i) {
            size_t id = (size_t)j * K0.nx + i;
            cplx z = K0.cell_center(i, j);
            P.Q.at(i, j) = std::norm(z) - F[id] - P.constants[(size_t)near[id] - 1];
        }
    return P;
}

double laplacian_defect(const PotentialField& P, int pole_margin) {
    const RasterDroplet& K = P.K0;
    std::vector<int> pdist = pole_cell_distance(K, P.poles);
    double h2 = K.h * K.h, worst = 0.0;
    for (int j = 1; j < K.ny - 1; ++j)
        for (int i = 1; i < K.nx - 1; ++i) {
            if (!K.at(i, j) || !K.at(i + 1, j) || !K.at(i - 1, j) || !K.at(i, j + 1) ||
                !K.at(i, j - 1))
                continue;
            if (pdist[(size_t)j * K.nx + i] < pole_margin) continue;
            double lap = (P.Q.at(i + 1, j) + P.Q.at(i - 1, j) + P.Q.at(i, j + 1) +
                          P.Q.at(i, j - 1) - 4.0 * P.Q.at(i, j)) /
                         h2;
            worst = std::max(worst, std::abs(lap - 4.0));
        }
    return worst;
}

namespace {

// Obstacle-problem machinery.  The converging iteration is the projected
// red-black SOR sweep (omega = 1.8, stop when its max update drops below
// 1e-10 * scale); between sweeps a constrained multigrid correction removes
// the smooth error that plain SOR transports too slowly.  The correction
// respects the obstacle on every level: each level carries a headroom cap
// (how far the solution may still rise), smoothing projects onto e <= cap,
// and restriction takes the min headroom over child cells, so a prolonged
// coarse correction can never push the fine solution through the obstacle.
struct MLevel {
    int nx = 0, ny = 0;
    double hh = 0.0;
    std::vector<double> psi, V, e, rhs, cap;
};

struct Obstacle {
    cplx origin;
    double t = 0.0;
    cplx anchor;        // far-field data anchor (source point or the origin)
    double scale = 1.0; // tolerance unit
    double snap = 0.0;  // contact threshold
    double c_cur = 0.0;
    long long sweeps = 0;
    std::vector<MLevel> lv;

    cplx center(int k, int i, int j) const {
        return origin + cplx((i + 0.5) * lv[(size_t)k].hh, (j + 0.5) * lv[(size_t)k].hh);
    }
    double data(cplx z, double c) const { return 2.0 * t * std::log(std::abs(z - anchor)) + c; }

    void build(const GridField& Q, const RasterDroplet& K, double sink_coeff,
               std::optional<cplx> source) {
        origin = Q.origin;
        MLevel f;
        f.nx = Q.nx;
        f.ny = Q.ny;
        f.hh = Q.h;
        f.psi.assign((size_t)f.nx * f.ny, kInf);
        for (int j = 0; j < f.ny; ++j)
            for (int i = 0; i < f.nx; ++i)
                if (K.at(i, j)) {
                    double v = Q.at(i, j);
                    if (source)
                        v -= 2.0 * sink_coeff * std::log(std::abs(K.cell_center(i, j) - *source));
                    f.psi[(size_t)j * f.nx + i] = v;
                }
        f.V.assign(f.psi.size(), 0.0);
        f.e.assign(f.psi.size(), 0.0);
        f.rhs.assign(f.psi.size(), 0.0);
        f.cap.assign(f.psi.size(), kInf);
        lv.push_back(std::move(f));
        while (std::min(lv.back().nx, lv.back().ny) > 16 && lv.size() < 9) {
            const MLevel& p = lv.back();
            MLevel c;
            c.nx = (p.nx + 1) / 2;
            c.ny = (p.ny + 1) / 2;
            c.hh = 2.0 * p.hh;
            c.psi.assign((size_t)c.nx * c.ny, kInf);
            for (int J = 0; J < c.ny; ++J)
                for (int I = 0; I < c.nx; ++I) {
                    double m = kInf;
                    for (int dj = 0; dj < 2; ++dj)
                        for (int di = 0; di < 2; ++di) {
                            int i = 2 * I + di, j = 2 * J + dj;
                            if (i < p.nx && j < p.ny)
                                m = std::min(m, p.psi[(size_t)j * p.nx + i]);
                        }
                    c.psi[(size_t)J * c.nx + I] = m;
                }
            c.V.assign(c.psi.size(), 0.0);
            c.e.assign(c.psi.size(), 0.0);
            c.rhs.assign(c.psi.size(), 0.0);
            c.cap.assign(c.psi.size(), kInf);
            lv.push_back(std::move(c));
        }
        double mx = 1.0;
        for (double p : lv[0].psi)
            if (std::isfinite(p)) mx = std::max(mx, std::abs(p));
        cplx corner = origin + cplx(Q.nx * Q.h, Q.ny * Q.h);
        mx = std::max(mx, std::abs(data(corner, 0.0)));
        scale = mx;
        snap = 1e-9 * scale;
    }

    void set_ring(int k, double c) {
        MLevel& L = lv[(size_t)k];
        for (int i = 0; i < L.nx; ++i) {
            L.V[(size_t)i] = data(center(k, i, 0), c);
            L.V[(size_t)(L.ny - 1) * L.nx + i] = data(center(k, i, L.ny - 1), c);
        }
        for (int j = 0; j < L.ny; ++j) {
            L.V[(size_t)j * L.nx] = data(center(k, 0, j), c);
            L.V[(size_t)j * L.nx + L.nx - 1] = data(center(k, L.nx - 1, j), c);
        }
    }

    double psor(int k, double omega) {
        MLevel& L = lv[(size_t)k];
        double mx = 0.0;
        for (int par = 0; par < 2; ++par) {
#pragma omp parallel for reduction(max : mx) schedule(static)
            for (int j = 1; j < L.ny - 1; ++j) {
                int i0 = 1 + ((par + j + 1) & 1);
                for (int i = i0; i < L.nx - 1; i += 2) {
                    size_t id = (size_t)j * L.nx + i;
                    double avg = 0.25 * (L.V[id - 1] + L.V[id + 1] + L.V[id - (size_t)L.nx] +
                                         L.V[id + (size_t)L.nx]);
                    double cand = L.V[id] + omega * (avg - L.V[id]);
                    if (cand > L.psi[id]) cand = L.psi[id];
                    double d = std::abs(cand - L.V[id]);
                    if (d > mx) mx = d;
                    L.V[id] = cand;
                }
            }
        }
        ++sweeps;
        return mx;
    }

    // projected Gauss-Seidel on the correction: e <= cap cellwise
    void smooth_e(int k, int iters) {
        MLevel& L = lv[(size_t)k];
        double h2 = L.hh * L.hh;
        for (int it = 0; it < iters; ++it)
            for (int par = 0; par < 2; ++par) {
#pragma omp parallel for schedule(static)
                for (int j = 1; j < L.ny - 1; ++j) {
                    int i0 = 1 + ((par + j + 1) & 1);
                    for (int i = i0; i < L.nx - 1; i += 2) {
                        size_t id = (size_t)j * L.nx + i;
                        double tgt = 0.25 * (L.e[id - 1] + L.e[id + 1] + L.e[id - (size_t)L.nx] +
                                             L.e[id + (size_t)L.nx] - h2 * L.rhs[id]);
                        L.e[id] = std::min(tgt, L.cap[id]);
                    }
                }
            }
    }

    // defect of (Lap e = rhs) averaged onto level k+1; the coarse headroom is
    // the smallest remaining headroom among the child cells
    void restrict_defect(int k) {
        MLevel& f = lv[(size_t)k];
        MLevel& c = lv[(size_t)k + 1];
        double h2 = f.hh * f.hh;
        for (int J = 0; J < c.ny; ++J)
            for (int I = 0; I < c.nx; ++I) {
                size_t cid = (size_t)J * c.nx + I;
                double acc = 0.0, room = kInf;
                int cnt = 0;
                for (int dj = 0; dj < 2; ++dj)
                    for (int di = 0; di < 2; ++di) {
                        int i = 2 * I + di, j = 2 * J + dj;
                        if (i >= f.nx || j >= f.ny) continue;
                        ++cnt;
                        size_t id = (size_t)j * f.nx + i;
                        if (i == 0 || j == 0 || i == f.nx - 1 || j == f.ny - 1) {
                            room = 0.0; // Dirichlet ring cell, no correction
                            continue;
                        }
                        room = std::min(room, f.cap[id] - f.e[id]);
                        double lap = (f.e[id - 1] + f.e[id + 1] + f.e[id - (size_t)f.nx] +
                                      f.e[id + (size_t)f.nx] - 4.0 * f.e[id]) /
                                     h2;
                        acc += f.rhs[id] - lap;
                    }
                c.rhs[cid] = cnt ? acc / cnt : 0.0;
                c.cap[cid] = std::max(0.0, room);
                c.e[cid] = 0.0;
            }
    }

    void vcycle(int k) {
        if (k == (int)lv.size() - 1) {
            smooth_e(k, 300);
            return;
        }
        smooth_e(k, 3);
        restrict_defect(k);
        vcycle(k + 1);
        MLevel& f = lv[(size_t)k];
        MLevel& c = lv[(size_t)k + 1];
        for (int j = 1; j < f.ny - 1; ++j)
            for (int i = 1; i < f.nx - 1; ++i) {
                size_t id = (size_t)j * f.nx + i;
                double e = f.e[id] + c.e[(size_t)(j / 2) * c.nx + i / 2];
                f.e[id] = std::min(e, f.cap[id]);
            }
        smooth_e(k, 3);
    }

    // relax the complementarity system at level k; true when the projected
    // sweep update and the last multigrid correction are below tol
    bool solve_lcp(int k, double tol, int max_cycles, double& final_update) {
        MLevel& L = lv[(size_t)k];
        double corr = kInf, upd = kInf;
        for (int cyc = 0; cyc < max_cycles; ++cyc) {
            upd = psor(k, 1.8);
            upd = psor(k, 1.8);
            if (upd < tol && corr < 10.0 * tol) {
                final_update = upd;
                return true;
            }
            double h2 = L.hh * L.hh;
            for (int j = 1; j < L.ny - 1; ++j)
                for (int i = 1; i < L.nx - 1; ++i) {
                    size_t id = (size_t)j * L.nx + i;
                    L.e[id] = 0.0;
                    L.cap[id] = std::max(0.0, L.psi[id] - L.V[id]);
                    double lap = (L.V[id - 1] + L.V[id + 1] + L.V[id - (size_t)L.nx] +
                                  L.V[id + (size_t)L.nx] - 4.0 * L.V[id]) /
                                 h2;
                    L.rhs[id] = -lap;
                }
            vcycle(k);
            corr = 0.0;
            for (int j = 1; j < L.ny - 1; ++j)
                for (int i = 1; i < L.nx - 1; ++i) {
                    size_t id = (size_t)j * L.nx + i;
                    corr = std::max(corr, std::abs(L.e[id]));
                    L.V[id] = std::min(L.V[id] + L.e[id], L.psi[id]);
                }
        }
        final_update = upd;
        return false;
    }

    double mass(int k) const {
        const MLevel& L = lv[(size_t)k];
        size_t cnt = 0;
        for (size_t id = 0; id < L.psi.size(); ++id)
            if (std::isfinite(L.psi[id]) && L.V[id] >= L.psi[id] - snap) ++cnt;
        return (double)cnt * L.hh * L.hh / PI;
    }

    // move the boundary constant and re-relax; warm-started from the shifted V
    double eval_mass(int k, double c, double tol, int max_cycles) {
        MLevel& L = lv[(size_t)k];
        double dc = c - c_cur;
        if (dc != 0.0) {
            for (int j = 1; j < L.ny - 1; ++j)
                for (int i = 1; i < L.nx - 1; ++i) {
                    size_t id = (size_t)j * L.nx + i;
                    L.V[id] = std::min(L.V[id] + dc, L.psi[id]);
                }
        }
        set_ring(k, c);
        c_cur = c;
        double fu = 0.0;
        if (!solve_lcp(k, tol, max_cycles, fu)) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "projected SOR stalled at level %d, last update %.3e (tol %.3e)", k,
                          fu, tol);
            throw NonConvergence(buf);
        }
        return mass(k);
    }

    // Bracketed secant on the mass defect.  The aim point sits slightly below
    // the requested mass: mass(c) saturates at the full raster mass, and on
    // that plateau the mass carries no information about c, so an in-window
    // hit at the plateau value only bounds the search and the iteration keeps
    // walking left until the bracket collapses onto the attachment edge (the
    // smallest c reaching the window, which is the physical constant).  Hits
    // off the plateau are accepted outright.  Raster mass moves in whole-cell
    // steps (symmetric masks flip several cells at once), so when the bracket
    // collapses across one such step the nearest acceptable c wins; the
    // caller validates the final mass defect.
    void calibrate(int k, double target, double rtol, double tol, int max_cycles) {
        const MLevel& L = lv[(size_t)k];
        size_t nfin = 0;
        for (double p : L.psi)
            if (std::isfinite(p)) ++nfin;
        double msat = (double)nfin * L.hh * L.hh / PI;
        double tb = target * (1.0 - 0.5 * rtol);
        double win = 0.5 * rtol * target;
        double best = kInf; // smallest c seen with an in-window mass
        auto hit = [&](double c, double m) {
            if (std::abs(m - tb) > win) return false;
            if (m < msat - 0.5 * L.hh * L.hh / PI) return true;
            best = std::min(best, c);
            return false;
        };
        double m = eval_mass(k, c_cur, tol, max_cycles);
        if (hit(c_cur, m)) return;
        double cl, ml, ch, mh;
        double step = std::max(0.5, 0.25 * std::abs(c_cur));
        if (m < tb) {
            cl = c_cur;
            ml = m;
            ch = cl;
            mh = ml;
            for (int it = 0;; ++it) {
                if (it >= 16) throw NonConvergence("mass calibration found no upper bracket");
                ch += step;
                step *= 2.0;
                mh = eval_mass(k, ch, tol, max_cycles);
                if (hit(ch, mh)) return;
                if (mh >= tb) break;
                cl = ch;
                ml = mh;
            }
        } else {
            ch = c_cur;
            mh = m;
            cl = ch;
            ml = mh;
            for (int it = 0;; ++it) {
                if (it >= 16) throw NonConvergence("mass calibration found no lower bracket");
                cl -= step;
                step *= 2.0;
                ml = eval_mass(k, cl, tol, max_cycles);
                if (hit(cl, ml)) return;
                if (ml < tb) break;
                ch = cl;
                mh = ml;
            }
        }
        double clast = cl;
        for (int it = 0; it < 64; ++it) {
            double cs;
            if (it % 4 == 3 || mh - ml <= 1e-300)
                cs = 0.5 * (cl + ch);
            else
                cs = ch - (mh - tb) * (ch - cl) / (mh - ml);
            if (!(cs > cl && cs < ch)) cs = 0.5 * (cl + ch);
            double ms = eval_mass(k, cs, tol, max_cycles);
            clast = cs;
            if (hit(cs, ms)) return;
            if (ms < tb) {
                cl = cs;
                ml = ms;
            } else {
                ch = cs;
                mh = ms;
            }
            if (ch - cl < 1e-7 * std::max(1.0, std::abs(ch))) break;
        }
        double cb = best;
        if (!std::isfinite(cb)) cb = (std::abs(ml - tb) <= std::abs(mh - tb)) ? cl : ch;
        if (cb != clast) eval_mass(k, cb, tol, max_cycles);
    }
};

} // namespace

ObstacleResult obstacle_solve(const PotentialField& P, const RasterDroplet& K, double t,
                              std::optional<cplx> source, double mass_rtol) {
    const GridField& Q = P.Q;
    if (Q.nx != K.nx || Q.ny != K.ny || Q.h != K.h || Q.origin != K.origin)
        throw Error("obstacle_solve: localization mask is on a different grid");
    double tK = K.area() / PI;
    if (!(t > 0.0) || t > tK * (1.0 + 1e-9) + 1e-12)
        throw Error("obstacle_solve: mass must lie in (0, area(K)/pi]");
    for (int j = 0; j < K.ny; ++j)
        for (int i = 0; i < K.nx; ++i)
            if (K.at(i, j) &&
                std::min(std::min(i, j), std::min(K.nx - 1 - i, K.ny - 1 - j)) <= 3)
                throw BoxTooSmall("localization mask within 3 cells of the data ring");

    Obstacle ob;
    ob.t = t;
    if (source) {
        ob.anchor = *source;
    } else {
        // anchor the far-field data at the mask centroid to keep the imposed
        // boundary values free of a dipole error for off-center droplets
        cplx acc = 0.0;
        size_t cnt = 0;
        for (int j = 0; j < K.ny; ++j)
            for (int i = 0; i < K.nx; ++i)
                if (K.at(i, j)) {
                    acc += K.cell_center(i, j);
                    ++cnt;
                }
        ob.anchor = acc / (double)cnt;
    }
    ob.build(Q, K, tK - t, source);
    int kc = (int)ob.lv.size() - 1;

    // seed constant: exact for the centered-disc potential, close elsewhere
    ob.c_cur = t * (1.0 - std::log(t));
    {
        MLevel& L = ob.lv[(size_t)kc];
        for (int j = 0; j < L.ny; ++j)
            for (int i = 0; i < L.nx; ++i) {
                size_t id = (size_t)j * L.nx + i;
                L.V[id] = std::min(L.psi[id], ob.data(ob.center(kc, i, j), ob.c_cur));
            }
    }
    double final_update = 0.0;
    for (int k = kc; k >= 0; --k) {
        MLevel& L = ob.lv[(size_t)k];
        if (k < kc) {
            const MLevel& C = ob.lv[(size_t)k + 1];
            for (int j = 1; j < L.ny - 1; ++j)
                for (int i = 1; i < L.nx - 1; ++i) {
                    size_t id = (size_t)j * L.nx + i;
                    L.V[id] = std::min(L.psi[id], C.V[(size_t)(j / 2) * C.nx + i / 2]);
                }
        }
        ob.set_ring(k, ob.c_cur);
        double tol = (k == 0 ? 1e-10 : 1e-9) * ob.scale;
        double rtol = (k == 0) ? mass_rtol : 0.05;
        double cell_mass = L.hh * L.hh / PI;
        if (t >= 12.0 * cell_mass) {
            ob.calibrate(k, t, rtol, tol, 60);
        } else if (!ob.solve_lcp(k, tol, 60, final_update)) {
            throw NonConvergence("projected SOR stalled on an under-resolved level");
        }
        if (k == 0 && !ob.solve_lcp(k, tol, 60, final_update))
            throw NonConvergence("projected SOR stalled at the finest level");
        if (k > 0) {
            // re-center the far-field data on this level's coincidence set so
            // the imposed log carries no dipole term; by the finest level the
            // anchor has converged to the droplet centroid
            cplx acc = 0.0;
            size_t cnt = 0;
            for (int j = 0; j < L.ny; ++j)
                for (int i = 0; i < L.nx; ++i) {
                    size_t id = (size_t)j * L.nx + i;
                    if (std::isfinite(L.psi[id]) && L.V[id] >= L.psi[id] - ob.snap) {
                        acc += ob.center(k, i, j);
                        ++cnt;
                    }
                }
            if (cnt) ob.anchor = acc / (double)cnt;
        }
    }

    const MLevel& L = ob.lv[0];
    ObstacleResult res;
    res.c = ob.c_cur;
    res.sweeps = (int)std::min<long long>(ob.sweeps, std::numeric_limits<int>::max());
    res.final_update = final_update;
    res.V = make_field(Q.origin, Q.origin + cplx(Q.nx * Q.h, Q.ny * Q.h), Q.h);
    res.V.v = L.V;
    res.coincidence = make_raster(Q.origin, Q.origin + cplx(Q.nx * Q.h, Q.ny * Q.h), Q.h);
    for (int j = 0; j < L.ny; ++j)
        for (int i = 0; i < L.nx; ++i) {
            size_t id = (size_t)j * L.nx + i;
            if (std::isfinite(L.psi[id]) && L.V[id] >= L.psi[id] - ob.snap)
                res.coincidence.set(i, j, true);
        }
    res.mass = res.coincidence.area() / PI;
    // raster quantization floor: symmetric masks gain mass in jumps of
    // several cells at once, which no boundary constant can split
    double allowed = std::max(mass_rtol * t, 16.0 * Q.h * Q.h / PI);
    if (std::abs(res.mass - t) > allowed) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "calibrated mass %.6g misses target %.6g by %.3e", res.mass,
                      t, std::abs(res.mass - t) / t);
        throw NonConvergence(buf);
    }

    double h2 = L.hh * L.hh;
    res.min_subharmonicity = kInf;
    for (int j = 1; j < L.ny - 1; ++j)
        for (int i = 1; i < L.nx - 1; ++i) {
            size_t id = (size_t)j * L.nx + i;
            double lap = (L.V[id - 1] + L.V[id + 1] + L.V[id - (size_t)L.nx] +
                          L.V[id + (size_t)L.nx] - 4.0 * L.V[id]) /
                         h2;
            res.min_subharmonicity = std::min(res.min_subharmonicity, lap);
            if (!res.coincidence.at(i, j))
                res.harmonic_defect = std::max(res.harmonic_defect, std::abs(lap));
            if (res.coincidence.at(i, j) &&
                std::min(std::min(i, j), std::min(L.nx - 1 - i, L.ny - 1 - j)) <= 3)
                throw BoxTooSmall("coincidence set within 3 cells of the data ring");
        }

    // far-field check: the inward increment of V along the ring must follow
    // the imposed data increment up to the truncated multipole tail of the
    // droplet's own logarithmic potential
    {
        cplx m[5] = {0.0, 0.0, 0.0, 0.0, 0.0};
        for (int j = 0; j < L.ny; ++j)
            for (int i = 0; i < L.nx; ++i)
                if (res.coincidence.at(i, j)) {
                    cplx d = res.coincidence.cell_center(i, j) - ob.anchor;
                    cplx p = d;
                    for (int q = 1; q <= 4; ++q, p *= d) m[q] += p;
                }
        for (int q = 1; q <= 4; ++q) m[q] *= h2;
        double worst = 0.0, slope = 0.0;
        int wi = 0, wj = 0;
        auto probe = [&](int bi, int bj, int ii, int ij) {
            double dV = L.V[(size_t)ij * L.nx + ii] - L.V[(size_t)bj * L.nx + bi];
            cplx zb = ob.center(0, bi, bj);
            double r = std::abs(zb - ob.anchor);
            double dD =
                2.0 * t * (std::log(std::abs(ob.center(0, ii, ij) - ob.anchor)) - std::log(r));
            double allow = 0.0, rk = r * r;
            for (int q = 1; q <= 4; ++q, rk *= r) allow += std::abs(m[q]) / rk;
            allow *= 1.5 * (2.0 / PI) * L.hh;
            double excess = std::abs(dV - dD) - allow;
            if (excess > worst) {
                worst = excess;
                wi = bi;
                wj = bj;
            }
            slope = std::max(slope, std::abs(dD));
        };
        for (int i = 1; i < L.nx - 1; ++i) {
            probe(i, 0, i, 1);
            probe(i, L.ny - 1, i, L.ny - 2);
        }
        for (int j = 1; j < L.ny - 1; ++j) {
            probe(0, j, 1, j);
            probe(L.nx - 1, j, L.nx - 2, j);
        }
        if (worst > 0.15 * slope + 1e-6 * ob.scale) {
            char buf[192];
            std::snprintf(
                buf, sizeof buf,
                "far-field data mismatch %.3e exceeds 15%% of the ring slope %.3e at cell %d,%d",
                worst, slope, wi, wj);
            throw BoxTooSmall(buf);
        }
    }
    return res;
}

RasterDroplet droplet_from_coincidence(const RasterDroplet& K_star) {
    RasterDroplet out = K_star;
    std::fill(out.mask.begin(), out.mask.end(), 0);
    auto block = [&](int i, int j) {
        return K_star.at(i, j) && K_star.at(i + 1, j) && K_star.at(i, j + 1) &&
               K_star.at(i + 1, j + 1);
    };
    for (int j = 0; j < K_star.ny; ++j)
        for (int i = 0; i < K_star.nx; ++i) {
            if (!K_star.at(i, j)) continue;
            if (block(i, j) || block(i - 1, j) || block(i, j - 1) || block(i - 1, j - 1))
                out.set(i, j, true);
        }
    for (bool changed = true; changed;) {
        changed = false;
        for (int j = 0; j < out.ny; ++j)
            for (int i = 0; i < out.nx; ++i) {
                if (!out.at(i, j)) continue;
                int nb = (int)out.at(i + 1, j) + out.at(i - 1, j) + out.at(i, j + 1) +
                         out.at(i, j - 1);
                if (nb <= 1) {
                    out.set(i, j, false);
                    changed = true;
                }
            }
    }
    return out;
}

ChainRecord chain(const PotentialField& P, const RasterDroplet& K,
                  const std::vector<double>& times, std::optional<cplx> source) {
    if (times.empty()) throw Error("chain: no times");
    double tK = K.area() / PI;
    for (size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0)) throw Error("chain: times must be positive");
        if (i && times[i] <= times[i - 1]) throw Error("chain: times must ascend");
    }
    if (times.back() > tK * (1.0 + 1e-9) + 1e-12)
        throw Error("chain: final mass exceeds the localization mask");

    ChainRecord rec;
    rec.source = source;
    for (size_t s = 0; s < times.size(); ++s) {
        double t = times[s];
        ObstacleResult ores = obstacle_solve(P, K, t, source);
        ChainStage st;
        st.t = t;
        st.Kstar = ores.coincidence;
        st.K = droplet_from_coincidence(ores.coincidence);
        st.area = st.K.area();
        st.area_defect = std::abs(st.area - PI * t);
        st.components = label_components(st.K, 4).count;
        st.c = ores.c;
        st.sweeps = ores.sweeps;

        GridField Qeff = P.Q;
        if (source) {
            double sc = tK - t;
            for (int j = 0; j < Qeff.ny; ++j)
                for (int i = 0; i < Qeff.nx; ++i)
                    Qeff.at(i, j) -=
                        2.0 * sc * std::log(std::abs(Qeff.cell_center(i, j) - *source));
        }
        EquilibriumReport eq = verify_equilibrium(st.K, Qeff);
        st.gamma = eq.gamma;
        st.equilibrium_dev = eq.deviation;

        if (!rec.stages.empty()) {
            const ChainStage& prev = rec.stages.back();
            st.singular = st.components != prev.components;
            if (!is_subset(prev.K, st.K)) rec.monotone = false;
            if (PI * (t - prev.t) > 10.0 * K.h * K.h &&
                !is_subset(fill_holes(prev.K), erode(fill_holes(st.K), 1)))
                rec.strong_monotone = false;
        }
        rec.max_area_defect = std::max(rec.max_area_defect, st.area_defect);
        rec.max_equilibrium_dev = std::max(rec.max_equilibrium_dev, st.equilibrium_dev);
        rec.stages.push_back(std::move(st));
    }
    return rec;
}

RasterDroplet perturb_to_nonsingular(const PotentialField& P, const RasterDroplet& K, double dt,
                                     std::optional<cplx> source) {
    if (dt <= 0.0) dt = 20.0 * K.h * K.h / PI;
    double t = K.area() / PI - dt;
    if (t <= 0.0) throw Error("perturb_to_nonsingular: mask smaller than the perturbation");
    ObstacleResult res = obstacle_solve(P, K, t, source);
    return droplet_from_coincidence(res.coincidence);
}

void save_chain(const ChainRecord& rec, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    nlohmann::json man;
    man["times"] = nlohmann::json::array();
    man["areas"] = nlohmann::json::array();
    man["components"] = nlohmann::json::array();
    man["singular"] = nlohmann::json::array();
    man["masks"] = nlohmann::json::array();
    if (rec.source)
        man["source"] = {rec.source->real(), rec.source->imag()};
    else
        man["source"] = nullptr;
    for (size_t s = 0; s < rec.stages.size(); ++s) {
        const ChainStage& st = rec.stages[s];
        char name[32];
        std::snprintf(name, sizeof name, "K_%04zu.pgm", s);
        save_raster(st.K, (fs::path(dir) / name).string());
        man["times"].push_back(st.t);
        man["areas"].push_back(st.area);
        man["components"].push_back(st.components);
        man["singular"].push_back(st.singular);
        man["masks"].push_back(name);
    }
    std::ofstream out(fs::path(dir) / "manifest.json");
    out << man.dump(2) << "\n";
}

} // namespace qd
