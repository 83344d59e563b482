#include "qd/topology.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace qd {

namespace {

const int DX4[] = {1, -1, 0, 0}, DY4[] = {0, 0, 1, -1};
const int DX8[] = {1, -1, 0, 0, 1, 1, -1, -1}, DY8[] = {0, 0, 1, -1, 1, -1, 1, -1};

void flood(LabeledGrid& g, const std::vector<char>& in, int i0, int j0, int lab, int conn) {
    const int* dx = conn == 8 ? DX8 : DX4;
    const int* dy = conn == 8 ? DY8 : DY4;
    std::vector<std::pair<int, int>> stack{{i0, j0}};
    g.label[(size_t)j0 * g.nx + i0] = lab;
    while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        for (int t = 0; t < conn; ++t) {
            int a = i + dx[t], b = j + dy[t];
            if (a < 0 || b < 0 || a >= g.nx || b >= g.ny) continue;
            size_t idx = (size_t)b * g.nx + a;
            if (in[idx] && g.label[idx] == 0) {
                g.label[idx] = lab;
                stack.push_back({a, b});
            }
        }
    }
}

LabeledGrid label_cells(const std::vector<char>& in, int nx, int ny, int conn) {
    LabeledGrid g;
    g.nx = nx;
    g.ny = ny;
    g.label.assign((size_t)nx * ny, 0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            size_t idx = (size_t)j * nx + i;
            if (in[idx] && g.label[idx] == 0) flood(g, in, i, j, ++g.count, conn);
        }
    return g;
}

} // namespace

LabeledGrid label_components(const RasterDroplet& mask, int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw Error("label_components: connectivity must be 4 or 8");
    std::vector<char> in((size_t)mask.nx * mask.ny);
    for (size_t k = 0; k < in.size(); ++k) in[k] = mask.mask[k] ? 1 : 0;
    return label_cells(in, mask.nx, mask.ny, connectivity);
}

LabeledGrid label_complement(const RasterDroplet& mask) {
    // one-cell frame so every border-touching complement cell joins the
    // unbounded component
    int nx = mask.nx + 2, ny = mask.ny + 2;
    std::vector<char> in((size_t)nx * ny, 1);
    for (int j = 0; j < mask.ny; ++j)
        for (int i = 0; i < mask.nx; ++i)
            if (mask.at(i, j)) in[(size_t)(j + 1) * nx + (i + 1)] = 0;
    LabeledGrid ext = label_cells(in, nx, ny, 8);
    LabeledGrid g;
    g.nx = mask.nx;
    g.ny = mask.ny;
    g.count = ext.count;
    g.label.assign((size_t)mask.nx * mask.ny, 0);
    for (int j = 0; j < mask.ny; ++j)
        for (int i = 0; i < mask.nx; ++i) g.label[(size_t)j * mask.nx + i] = ext.at(i + 1, j + 1);
    return g;
}

RasterDroplet fill_holes(const RasterDroplet& mask) {
    LabeledGrid comp = label_complement(mask);
    RasterDroplet out = mask;
    for (int j = 0; j < mask.ny; ++j)
        for (int i = 0; i < mask.nx; ++i)
            if (comp.at(i, j) > 1) out.set(i, j, true); // label 1 = unbounded side
    return out;
}

namespace {

// Directed boundary edges on the vertex lattice (vertex (i,j) = corner between
// cells), set cell on the left.  dir: 0=+x 1=+y 2=-x 3=-y.
struct EdgeKey {
    int x, y, dir;
    bool operator<(const EdgeKey& o) const {
        return std::tie(x, y, dir) < std::tie(o.x, o.y, o.dir);
    }
};

struct Tracer {
    const RasterDroplet& m;
    std::map<EdgeKey, bool> edges; // -> used flag

    explicit Tracer(const RasterDroplet& mask) : m(mask) {
        auto filled = [&](int i, int j) {
            return i >= 0 && j >= 0 && i < m.nx && j < m.ny && m.at(i, j);
        };
        for (int j = 0; j < m.ny; ++j)
            for (int i = 0; i < m.nx; ++i) {
                if (!m.at(i, j)) continue;
                if (!filled(i, j - 1)) edges[{i, j, 0}] = false;         // bottom, +x
                if (!filled(i + 1, j)) edges[{i + 1, j, 1}] = false;     // right, +y
                if (!filled(i, j + 1)) edges[{i + 1, j + 1, 2}] = false; // top, -x
                if (!filled(i - 1, j)) edges[{i, j + 1, 3}] = false;     // left, -y
            }
    }

    static void advance(int& x, int& y, int dir) {
        switch (dir) {
        case 0: ++x; break;
        case 1: ++y; break;
        case 2: --x; break;
        default: --y;
        }
    }

    // Successor of an edge ending at (x, y) with direction dir: the pairing
    // prefers the left turn, then straight, then right, which hugs the own set
    // cell at saddle vertices.  The pairing is a fixed permutation of the
    // edges, so each loop closes exactly when it returns to its first edge.
    EdgeKey successor(int x, int y, int dir) const {
        for (int turn : {1, 0, 3}) {
            EdgeKey k{x, y, (dir + turn) & 3};
            if (edges.count(k)) return k;
        }
        throw Error("extract_ovals: open boundary chain");
    }

    std::vector<std::vector<std::pair<int, int>>> trace_all() {
        std::vector<std::vector<std::pair<int, int>>> loops;
        for (auto& [k0, used0] : edges) {
            if (used0) continue;
            std::vector<std::pair<int, int>> loop;
            EdgeKey e = k0;
            while (true) {
                edges[e] = true;
                loop.push_back({e.x, e.y});
                int x = e.x, y = e.y;
                advance(x, y, e.dir);
                e = successor(x, y, e.dir);
                if (e.x == k0.x && e.y == k0.y && e.dir == k0.dir) break;
            }
            loops.push_back(std::move(loop));
        }
        return loops;
    }
};

std::vector<cplx> to_physical(const std::vector<std::pair<int, int>>& loop,
                              const RasterDroplet& m) {
    std::vector<cplx> out;
    int n = (int)loop.size();
    for (int t = 0; t < n; ++t) {
        auto [x0, y0] = loop[(t + n - 1) % n];
        auto [x1, y1] = loop[t];
        auto [x2, y2] = loop[(t + 1) % n];
        if ((x1 - x0) * (y2 - y1) == (y1 - y0) * (x2 - x1)) continue; // collinear
        out.push_back(m.origin + m.h * cplx(x1, y1));
    }
    return out;
}

} // namespace

std::vector<std::vector<cplx>> extract_ovals(const RasterDroplet& mask) {
    Tracer tr(mask);
    std::vector<std::vector<cplx>> out;
    for (auto& loop : tr.trace_all()) out.push_back(to_physical(loop, mask));
    return out;
}

TopologyReport analyze(const RasterDroplet& mask) {
    TopologyReport rep;
    rep.k_components = label_components(mask, 4).count;
    LabeledGrid comp = label_complement(mask);
    rep.q = comp.count;

    // complement component seen by a directed boundary edge: the cell on its
    // right (off-grid cells belong to the unbounded component, label 1)
    auto right_label = [&](int x, int y, int dir) {
        int i = x, j = y;
        switch (dir) {
        case 0: i = x, j = y - 1; break;   // +x edge: cell below
        case 1: i = x, j = y; break;       // +y edge: cell to the right
        case 2: i = x - 1, j = y; break;   // -x edge: cell above
        default: i = x - 1, j = y - 1;     // -y edge: cell to the left
        }
        if (i < 0 || j < 0 || i >= mask.nx || j >= mask.ny) return 1;
        return comp.at(i, j);
    };

    Tracer tr(mask);
    std::vector<int> oval_comp;
    for (auto& loop : tr.trace_all()) {
        int lab = 0, n = (int)loop.size();
        for (int t = 0; t < n; ++t) {
            auto [x0, y0] = loop[t];
            auto [x1, y1] = loop[(t + 1) % n];
            int dir = x1 > x0 ? 0 : x1 < x0 ? 2 : y1 > y0 ? 1 : 3;
            int l = right_label(x0, y0, dir);
            if (lab == 0) lab = l;
            if (l != lab) {
                std::ostringstream os;
                os << "oval touches complement components " << lab << " and " << l;
                throw PinchDetected(os.str());
            }
        }
        oval_comp.push_back(lab);
        rep.ovals.push_back(to_physical(loop, mask));
    }

    rep.conn.assign(rep.q, 0);
    for (int lab : oval_comp) ++rep.conn[lab - 1];
    int maxc = 0;
    for (int c : rep.conn) maxc = std::max(maxc, c);
    rep.q_hist.assign(maxc + 1, 0);
    for (int c : rep.conn) ++rep.q_hist[c];
    for (int j = 1; j <= maxc; j += 2) rep.q_odd += rep.q_hist[j];
    return rep;
}

namespace {

BoundVerdict verdict(int lhs, int rhs, const std::string& name) {
    BoundVerdict v;
    v.lhs = lhs;
    v.rhs = rhs;
    v.slack = rhs - lhs;
    v.pass = lhs <= rhs;
    v.binding = name;
    return v;
}

} // namespace

BoundVerdict check_theorem_A(int d, int n, QDKind kind, int conn) {
    if (d < 0 || n < 1 || conn < 1) throw KindDomainMismatch("nonsensical d, n, or conn");
    if (n > d + 1) throw KindDomainMismatch("more nodes than the order admits");
    bool bounded = kind == QDKind::BQD || kind == QDKind::BQDNoTripleNodes;
    int threshold = bounded ? 3 : 2;
    if (d < threshold) {
        BoundVerdict v = verdict(conn, 1, "simply connected below order threshold");
        return v;
    }
    int a = 0, b = 0;
    std::string an, bn;
    switch (kind) {
    case QDKind::UQD: a = d + n - 1, b = 2 * d - 2, an = "d+n-1", bn = "2d-2"; break;
    case QDKind::UQDNodeAtInfinity: a = b = d + n - 2, an = bn = "d+n-2"; break;
    case QDKind::BQD: a = d + n - 2, b = 2 * d - 4, an = "d+n-2", bn = "2d-4"; break;
    default: a = d + n - 3, b = 2 * d - 4, an = "d+n-3", bn = "2d-4";
    }
    return verdict(conn, std::min(a, b), a <= b ? an : bn);
}

std::pair<BoundVerdict, BoundVerdict> check_ovals_bound(const TopologyReport& rep, int d) {
    int q1 = rep.q_hist.size() > 1 ? rep.q_hist[1] : 0;
    BoundVerdict first = verdict(rep.oval_count() + rep.q_odd + 4 * (rep.q - q1), 2 * d + 2,
                                 "ovals + q_odd + 4(q - q_1) <= 2d + 2");
    BoundVerdict second = verdict(rep.oval_count(), 2 * d - 2, "ovals <= 2d - 2");
    if (d < 3) {
        second.pass = true;
        second.binding = "ovals <= 2d - 2 (vacuous, d < 3)";
    }
    return {first, second};
}

BoundVerdict packing_check(PackingKind kind, int m, int c) {
    if (m < 1 || c < 0) throw KindDomainMismatch("nonsensical packing parameters");
    if (kind == PackingKind::DiscsInDisc) return verdict(c, 2 * m - 2, "c <= 2m - 2");
    return verdict(c, 3 * m, "c <= 3m");
}

} // namespace qd
