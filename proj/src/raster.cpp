#include "qd/raster.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace qd {

size_t RasterDroplet::count() const {
    size_t n = 0;
    for (auto b : mask) n += (b != 0);
    return n;
}

RasterDroplet make_raster(cplx lo, cplx hi, double h) {
    if (!(h > 0.0) || hi.real() <= lo.real() || hi.imag() <= lo.imag())
        throw Error("make_raster: bad box");
    RasterDroplet m;
    m.origin = lo;
    m.h = h;
    m.nx = (int)std::lround((hi.real() - lo.real()) / h);
    m.ny = (int)std::lround((hi.imag() - lo.imag()) / h);
    m.mask.assign((size_t)m.nx * m.ny, 0);
    return m;
}

GridField make_field(cplx lo, cplx hi, double h) {
    RasterDroplet m = make_raster(lo, hi, h);
    GridField f;
    f.origin = m.origin;
    f.h = m.h;
    f.nx = m.nx;
    f.ny = m.ny;
    f.v.assign((size_t)f.nx * f.ny, 0.0);
    return f;
}

RasterDroplet raster_fill(const std::vector<std::vector<cplx>>& curves, cplx lo, cplx hi,
                          double h) {
    RasterDroplet m = make_raster(lo, hi, h);
    std::vector<double> xs;
    for (int j = 0; j < m.ny; ++j) {
        double y = lo.imag() + (j + 0.5) * h;
        xs.clear();
        for (auto& c : curves) {
            size_t n = c.size();
            for (size_t i = 0; i < n; ++i) {
                cplx a = c[i], b = c[(i + 1) % n];
                double ya = a.imag(), yb = b.imag();
                if ((ya <= y) == (yb <= y)) continue; // no crossing (half-open rule)
                double t = (y - ya) / (yb - ya);
                xs.push_back(a.real() + t * (b.real() - a.real()));
            }
        }
        std::sort(xs.begin(), xs.end());
        for (size_t p = 0; p + 1 < xs.size(); p += 2) {
            int i0 = (int)std::ceil((xs[p] - lo.real()) / h - 0.5);
            int i1 = (int)std::floor((xs[p + 1] - lo.real()) / h - 0.5);
            for (int i = std::max(0, i0); i <= std::min(m.nx - 1, i1); ++i) m.set(i, j, true);
        }
    }
    return m;
}

RasterDroplet rasterize(const DomainSpec& spec, cplx lo, cplx hi, double h) {
    if (spec.kind == DomainKind::Disc || spec.kind == DomainKind::ExteriorDisc) {
        RasterDroplet m = make_raster(lo, hi, h);
        for (int j = 0; j < m.ny; ++j)
            for (int i = 0; i < m.nx; ++i)
                if (std::abs(m.cell_center(i, j) - spec.center) < spec.radius) m.set(i, j, true);
        return m;
    }
    std::vector<std::vector<cplx>> curves;
    if (spec.kind == DomainKind::RasterComplement) {
        curves = spec.raster_curves;
    } else {
        int n = 4096;
        auto bd = boundary(spec, n);
        std::vector<cplx> c(n);
        for (int i = 0; i < n; ++i) c[i] = bd[i].z;
        curves.push_back(std::move(c));
    }
    return raster_fill(curves, lo, hi, h);
}

static RasterDroplet morph(const RasterDroplet& m, int steps, bool grow) {
    RasterDroplet cur = m;
    for (int s = 0; s < steps; ++s) {
        RasterDroplet next = cur;
        for (int j = 0; j < cur.ny; ++j) {
            for (int i = 0; i < cur.nx; ++i) {
                bool c = cur.at(i, j);
                bool n4 = cur.at(i - 1, j) || cur.at(i + 1, j) || cur.at(i, j - 1) ||
                          cur.at(i, j + 1);
                if (grow)
                    next.set(i, j, c || n4);
                else {
                    bool all4 = cur.at(i - 1, j) && cur.at(i + 1, j) && cur.at(i, j - 1) &&
                                cur.at(i, j + 1);
                    next.set(i, j, c && all4);
                }
            }
        }
        cur = std::move(next);
    }
    return cur;
}

RasterDroplet erode(const RasterDroplet& m, int steps) { return morph(m, steps, false); }
RasterDroplet dilate(const RasterDroplet& m, int steps) { return morph(m, steps, true); }

static void check_same_geom(const RasterDroplet& a, const RasterDroplet& b) {
    if (a.nx != b.nx || a.ny != b.ny || std::abs(a.h - b.h) > 1e-15 ||
        std::abs(a.origin - b.origin) > 1e-12)
        throw Error("raster: geometry mismatch");
}

bool is_subset(const RasterDroplet& a, const RasterDroplet& b) {
    check_same_geom(a, b);
    for (size_t k = 0; k < a.mask.size(); ++k)
        if (a.mask[k] && !b.mask[k]) return false;
    return true;
}

RasterDroplet set_minus(const RasterDroplet& a, const RasterDroplet& b) {
    check_same_geom(a, b);
    RasterDroplet r = a;
    for (size_t k = 0; k < r.mask.size(); ++k) r.mask[k] = a.mask[k] && !b.mask[k];
    return r;
}
RasterDroplet set_and(const RasterDroplet& a, const RasterDroplet& b) {
    check_same_geom(a, b);
    RasterDroplet r = a;
    for (size_t k = 0; k < r.mask.size(); ++k) r.mask[k] = a.mask[k] && b.mask[k];
    return r;
}
RasterDroplet set_or(const RasterDroplet& a, const RasterDroplet& b) {
    check_same_geom(a, b);
    RasterDroplet r = a;
    for (size_t k = 0; k < r.mask.size(); ++k) r.mask[k] = a.mask[k] || b.mask[k];
    return r;
}

static std::vector<cplx> boundary_cells(const RasterDroplet& m) {
    std::vector<cplx> out;
    for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i) {
            if (!m.at(i, j)) continue;
            if (!m.at(i - 1, j) || !m.at(i + 1, j) || !m.at(i, j - 1) || !m.at(i, j + 1))
                out.push_back(m.cell_center(i, j));
        }
    return out;
}

double hausdorff(const RasterDroplet& a, const RasterDroplet& b) {
    check_same_geom(a, b);
    // symmetric-difference cells only need distances to the other set's boundary
    std::vector<cplx> ba = boundary_cells(a), bb = boundary_cells(b);
    if (ba.empty() || bb.empty()) return (ba.empty() && bb.empty()) ? 0.0 : 1e300;
    auto onesided = [&](const RasterDroplet& from, const RasterDroplet& to,
                        const std::vector<cplx>& tob) {
        double worst = 0.0;
        for (int j = 0; j < from.ny; ++j)
            for (int i = 0; i < from.nx; ++i) {
                if (!from.at(i, j) || to.at(i, j)) continue;
                cplx z = from.cell_center(i, j);
                double best = std::numeric_limits<double>::infinity();
                for (auto& w : tob) best = std::min(best, std::abs(z - w));
                worst = std::max(worst, best);
            }
        return worst;
    };
    return std::max(onesided(a, b, bb), onesided(b, a, ba));
}

double perimeter(const RasterDroplet& m) { return (double)boundary_cells(m).size() * m.h; }

void save_raster(const RasterDroplet& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("save_raster: cannot open " + path);
    f << "P5\n" << m.nx << " " << m.ny << "\n255\n";
    for (int j = m.ny - 1; j >= 0; --j) // top row first, image convention
        for (int i = 0; i < m.nx; ++i) f.put(m.at(i, j) ? (char)255 : (char)0);
    nlohmann::json hdr;
    hdr["origin"] = {m.origin.real(), m.origin.imag()};
    hdr["h"] = m.h;
    hdr["nx"] = m.nx;
    hdr["ny"] = m.ny;
    std::ofstream g(path + ".json");
    g << hdr.dump(2) << "\n";
}

RasterDroplet load_raster(const std::string& path) {
    std::ifstream g(path + ".json");
    if (!g) throw Error("load_raster: missing header " + path + ".json");
    nlohmann::json hdr = nlohmann::json::parse(g);
    RasterDroplet m;
    m.origin = cplx(hdr["origin"][0].get<double>(), hdr["origin"][1].get<double>());
    m.h = hdr["h"].get<double>();
    m.nx = hdr["nx"].get<int>();
    m.ny = hdr["ny"].get<int>();
    m.mask.assign((size_t)m.nx * m.ny, 0);
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("load_raster: cannot open " + path);
    std::string magic;
    int w, hgt, maxv;
    f >> magic >> w >> hgt >> maxv;
    if (magic != "P5" || w != m.nx || hgt != m.ny) throw Error("load_raster: bad PGM");
    f.get();
    for (int j = m.ny - 1; j >= 0; --j)
        for (int i = 0; i < m.nx; ++i) {
            int c = f.get();
            m.set(i, j, c > 127);
        }
    return m;
}

} // namespace qd
