#include "qd/roots.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace qd {

namespace {

// Aberth-Ehrlich pass on a polynomial assumed to have nonzero constant term.
// Returns deg(p) approximate roots; convergence is not guaranteed here.
std::vector<cplx> aberth(const Polynomial& p, int max_iters, bool& converged) {
    int n = p.degree();
    Polynomial dp = p.derivative();
    const auto& c = p.coeffs();

    // initial circle: geometric-mean-ish radius, irrational angle offset breaks symmetry
    double r0 = std::pow(std::abs(c[0] / c[n]), 1.0 / n);
    if (!(r0 > 0.0) || !std::isfinite(r0)) r0 = 1.0;
    std::vector<cplx> z(n);
    for (int k = 0; k < n; ++k) {
        double th = 2.0 * PI * k / n + 0.376991;
        z[k] = r0 * cplx(std::cos(th), std::sin(th));
    }

    converged = false;
    for (int it = 0; it < max_iters; ++it) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            cplx pz = p(z[i]);
            cplx dz = dp(z[i]);
            if (std::abs(dz) < 1e-300) {
                z[i] += cplx(1e-8, 1e-8);
                worst = 1.0;
                continue;
            }
            cplx N = pz / dz;
            cplx S = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) S += 1.0 / (z[i] - z[j]);
            cplx denom = 1.0 - N * S;
            cplx w = (std::abs(denom) < 1e-300) ? N : N / denom;
            z[i] -= w;
            worst = std::max(worst, std::abs(w) / (1.0 + std::abs(z[i])));
        }
        if (worst < 1e-14) {
            converged = true;
            break;
        }
    }
    return z;
}

std::vector<cplx> companion_roots(const Polynomial& p) {
    int n = p.degree();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    cplx lead = p.coeffs()[n];
    for (int i = 1; i < n; ++i) M(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) M(i, n - 1) = -p.coeffs()[i] / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    std::vector<cplx> z(n);
    for (int i = 0; i < n; ++i) z[i] = es.eigenvalues()(i);
    return z;
}

// Local multiplicity estimate from u' where u = p/p'; near an m-fold root u' -> 1/m.
int estimate_mult(const Polynomial& p, const Polynomial& dp, const Polynomial& ddp, cplx z, int n) {
    cplx pz = p(z), dz = dp(z), d2 = ddp(z);
    cplx den = dz * dz - pz * d2;
    if (std::abs(den) < 1e-300) return 1;
    double m = std::real(dz * dz / den);
    int mi = (int)std::lround(m);
    return std::clamp(mi, 1, n);
}

} // namespace

std::vector<RootCluster> poly_roots(const Polynomial& p, const RootOptions& opt) {
    Polynomial q = p;
    q.trim(1e-14 * p.coeff_norm());
    int n = q.degree();
    if (n == 0) {
        if (q.is_zero(0.0)) throw RootFindFailure("poly_roots: zero polynomial");
        return {};
    }

    // peel exact roots at the origin (trailing ~zero coefficients)
    int zero_mult = 0;
    {
        const double tiny = 1e-14 * q.coeff_norm();
        std::vector<cplx> c = q.coeffs();
        while ((int)c.size() > 1 && std::abs(c.front()) <= tiny) {
            c.erase(c.begin());
            ++zero_mult;
        }
        q = Polynomial(std::move(c));
        n = q.degree();
    }

    std::vector<cplx> raw;
    if (n == 1) {
        raw = {-q.coeffs()[0] / q.coeffs()[1]};
    } else if (n == 2) {
        cplx a = q.coeffs()[2], b = q.coeffs()[1], c0 = q.coeffs()[0];
        cplx s = std::sqrt(b * b - 4.0 * a * c0);
        if (std::real(std::conj(b) * s) < 0.0) s = -s; // stable sign choice
        cplx qq = -0.5 * (b + s);
        raw = {qq / a, (std::abs(qq) > 0 ? c0 / qq : -b / a - qq / a)};
    } else if (n > 0) {
        bool ok = false;
        raw = aberth(q, opt.max_iters, ok);
        if (!ok) raw = companion_roots(q);
    }

    // multiplicity-aware Newton polish; steps are accepted only when they
    // reduce |p|, so noise-dominated evaluations near multiple roots stall
    // harmlessly instead of walking away
    Polynomial dp = q.derivative(), ddp = dp.derivative();
    auto polish = [&](cplx& z, int iters) {
        for (int it = 0; it < iters; ++it) {
            int m = estimate_mult(q, dp, ddp, z, n);
            cplx pz = q(z), dz = dp(z);
            if (std::abs(dz) < 1e-300) break;
            cplx step = double(m) * pz / dz;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
            if (std::abs(step) > 0.1 * (1.0 + std::abs(z))) break;
            cplx znew = z - step;
            if (std::abs(q(znew)) > std::abs(pz)) break;
            z = znew;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
        }
    };
    for (auto& z : raw) polish(z, 6);

    // residual check against the coefficient scale
    double bad = 0.0;
    for (auto& z : raw) bad = std::max(bad, std::abs(q(z)) / (1e-300 + q.eval_scale(z)));
    if (bad > opt.residual_rel) {
        // Aberth path failed quality; retry from the companion matrix once
        raw = companion_roots(q);
        for (auto& z : raw) polish(z, 8);
        bad = 0.0;
        for (auto& z : raw) bad = std::max(bad, std::abs(q(z)) / (1e-300 + q.eval_scale(z)));
        if (bad > opt.residual_rel) throw RootFindFailure("poly_roots: residual test failed");
    }

    // greedy clustering; centroid of an m-cluster is first-order accurate
    std::sort(raw.begin(), raw.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    std::vector<RootCluster> out;
    std::vector<bool> used(raw.size(), false);
    for (size_t i = 0; i < raw.size(); ++i) {
        if (used[i]) continue;
        cplx sum = raw[i];
        int cnt = 1;
        used[i] = true;
        double rad = opt.cluster_radius_rel * std::max(1.0, std::abs(raw[i]));
        for (size_t j = i + 1; j < raw.size(); ++j) {
            if (!used[j] && std::abs(raw[j] - sum / double(cnt)) <= rad) {
                sum += raw[j];
                ++cnt;
                used[j] = true;
            }
        }
        out.push_back({sum / double(cnt), cnt});
    }
    // An m-fold root is a simple root of the (m-1)-th derivative, where plain
    // Newton reaches machine precision (the root location itself is
    // conditioning-limited to ~eps^(1/m) when read off p directly).
    std::vector<Polynomial> derivs = {q};
    for (int k = 1; k < n; ++k) derivs.push_back(derivs.back().derivative());
    auto refine_mfold = [&](cplx z, int m) {
        const Polynomial& d = derivs[std::min(m - 1, (int)derivs.size() - 1)];
        Polynomial dd = d.derivative();
        for (int it = 0; it < 12; ++it) {
            cplx dz = dd(z);
            if (std::abs(dz) < 1e-300) break;
            cplx step = d(z) / dz;
            z -= step;
            if (std::abs(step) < 1e-16 * (1.0 + std::abs(z))) break;
        }
        return z;
    };
    // the candidate m-fold root must annihilate p, p', ..., p^(m-1) to
    // machine precision, otherwise the cluster members are genuinely distinct
    auto verified = [&](cplx a, int m) {
        for (int k = 0; k < m && k < (int)derivs.size(); ++k) {
            double scale = derivs[k].eval_scale(a);
            if (std::abs(derivs[k](a)) > 1e-10 * std::max(1e-300, scale)) return false;
        }
        return true;
    };
    for (auto& rc : out) {
        if (rc.mult < 2) continue;
        cplx z = refine_mfold(rc.z, rc.mult);
        double rad = opt.cluster_radius_rel * std::max(1.0, std::abs(rc.z));
        if (std::abs(z - rc.z) <= 100.0 * rad && verified(z, rc.mult)) rc.z = z;
    }
    // wide-cluster pass: multiple roots that the noise floor spread beyond the
    // clustering radius are merged only after verification
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < out.size() && !changed; ++i) {
            for (size_t j = i + 1; j < out.size() && !changed; ++j) {
                double wide = 1e-3 * std::max(1.0, std::abs(out[i].z));
                if (std::abs(out[i].z - out[j].z) > wide) continue;
                int m = out[i].mult + out[j].mult;
                if (m > n) continue;
                cplx a = refine_mfold(0.5 * (out[i].z + out[j].z), m);
                if (std::abs(a - out[i].z) > 2.0 * wide || !verified(a, m)) continue;
                out[i] = {a, m};
                out.erase(out.begin() + j);
                changed = true;
            }
        }
    }
    if (zero_mult > 0) out.push_back({cplx(0.0), zero_mult});
    std::sort(out.begin(), out.end(), [](const RootCluster& a, const RootCluster& b) {
        return a.z.real() != b.z.real() ? a.z.real() < b.z.real() : a.z.imag() < b.z.imag();
    });
    return out;
}

std::vector<cplx> poly_roots_flat(const Polynomial& p, const RootOptions& opt) {
    std::vector<cplx> out;
    for (auto& rc : poly_roots(p, opt))
        for (int k = 0; k < rc.mult; ++k) out.push_back(rc.z);
    return out;
}

} // namespace qd
