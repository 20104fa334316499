#include "tdimer/dimer_map.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <string>

#include "tdimer/error.hpp"

namespace tdimer {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

// ---------------------------------------------------------------- EdgeFlow

EdgeFlow::EdgeFlow(const Window& blacks) : blacks_(blacks), values_(blacks.size() * 3, kNaN) {}

int EdgeFlow::slot_index(HexEdge e) const {
    const int i = blacks_.index(e.black.m, e.black.n);
    return i < 0 ? -1 : i * 3 + e.slot;
}

bool EdgeFlow::defined(HexEdge e) const {
    const int i = slot_index(e);
    return i >= 0 && !std::isnan(values_[i]);
}

double EdgeFlow::operator()(HexEdge e) const {
    const int i = slot_index(e);
    return i < 0 ? kNaN : values_[i];
}

double EdgeFlow::oriented(HexVertex from, HexVertex to) const {
    if (from.color == Color::white) return (*this)(edge_between(from, to));
    return -(*this)(edge_between(to, from));
}

void EdgeFlow::set(HexEdge e, double value) {
    const int i = slot_index(e);
    if (i < 0) throw WindowError("EdgeFlow::set: edge outside window");
    values_[i] = value;
}

double EdgeFlow::divergence(HexVertex v) const {
    double s = 0.0;
    for (const HexVertex& u : hex_neighbors(v)) s += oriented(v, u);
    return s;
}

EdgeFlow slope_flow(const TriangleShape& shape, const Window& blacks) {
    EdgeFlow f(blacks);
    const auto p = shape.lozenge_densities();
    for (int m = blacks.m0; m <= blacks.m1; ++m) {
        for (int n = blacks.n0; n <= blacks.n1; ++n) {
            for (int s = 0; s < 3; ++s) {
                const HexEdge e{HexVertex::black(m, n), s};
                f.set(e, p[static_cast<int>(e.edge_class())]);
            }
        }
    }
    return f;
}

// ---------------------------------------------------------- T-graph geometry

HexVertex white_across(DualVertex x, DualVertex y) { return crossed_edge(x, y).white(); }

namespace {

cplx face_centroid(const TGraph& t, const TGraph::Face& f) {
    return (t.position(f.corner[0]) + t.position(f.corner[1]) + t.position(f.corner[2])) / 3.0;
}

cplx segment_direction(const TGraph& t, const TGraph::Segment& s) {
    const auto e = s.endpoints();
    return t.position(e[1]) - t.position(e[0]);
}

}  // namespace

std::optional<cplx> incoming_normal(const TGraph& t, int v) {
    const auto& vx = t.vertex(v);
    if (!vx.has_out()) return std::nullopt;
    const cplx p = vx.pos;
    cplx d = segment_direction(t, t.segment(vx.segment));
    d /= std::abs(d);
    const int m = vx.coord.m, n = vx.coord.n;
    // Faces with corner v all lie on the incoming side; so do the in-neighbours.
    double side = 0.0;
    bool conflict = false;
    auto vote = [&](cplx q) {
        const double c = cross(d, q - p);
        if (c == 0.0) return;
        const double s = c > 0 ? 1.0 : -1.0;
        if (side != 0.0 && s != side) conflict = true;
        side = s;
    };
    for (const HexVertex& w : {HexVertex::white(m, n), HexVertex::white(m + 1, n), HexVertex::white(m + 1, n - 1)}) {
        const int fi = t.face_index(w);
        if (fi >= 0) vote(face_centroid(t, t.face(fi)));
    }
    for (const HexVertex& b : {HexVertex::black(m, n), HexVertex::black(m + 1, n - 1), HexVertex::black(m, n - 1)}) {
        const int si = t.segment_index(b);
        if (si < 0 || si == vx.segment) continue;
        const int u = t.segment(si).interior_vertex();
        if (u >= 0) vote(t.position(u));
    }
    if (conflict) throw InternalError("incoming side of a vertex is ambiguous");
    if (side == 0.0) return std::nullopt;
    return side * cplx(0.0, 1.0) * d;
}

EdgeFlow reference_flow(const TGraph& t) {
    EdgeFlow f(t.face_window());
    for (const auto& s : t.segments()) {
        if (s.interior < 0) throw DegeneracyError("reference_flow: degenerate segment", {{s.black.m, s.black.n}});
        const int mid = s.interior_vertex();
        for (int slot = 0; slot < 3; ++slot) {
            const HexEdge e{s.black, slot};
            const int fi = t.face_index(e.white());
            if (fi < 0) continue;
            const cplx centroid = face_centroid(t, t.face(fi));
            const DualEdge de = dual_of_edge(e, Orientation::white_to_black);
            double total = 0.0;
            bool ok = true;
            for (const DualVertex& x : {de.from, de.to}) {
                const int vi = t.index(x);
                if (vi == mid) continue;
                const auto& vx = t.vertex(vi);
                if (!vx.has_out()) {
                    ok = false;
                    break;
                }
                const cplx p = vx.pos;
                const cplx u = t.position(mid) - p;
                const double w_side = cross(u, centroid - p);
                cplx d = segment_direction(t, t.segment(vx.segment));
                if (cross(u, d) * w_side > 0) d = -d;
                total += std::atan2(std::abs(cross(u, d)), dot(u, d));
            }
            if (ok) f.set(e, total / (2 * std::numbers::pi));
        }
    }
    return f;
}

// ------------------------------------------------------------ dual forest

OrientedDualForest dual_forest(const TGraph& t, const SpanningForest& f, std::span<const char> region) {
    const std::size_t nf = t.faces().size();
    if (region.size() != nf) throw InvalidArgument("dual_forest: region mask size mismatch");
    OrientedDualForest d;
    d.next.assign(nf, OrientedDualForest::unset);
    d.crossed.assign(nf, -1);
    d.region.assign(region.begin(), region.end());
    std::size_t region_size = 0;
    for (char r : region) region_size += r != 0;

    struct Link {
        int a, b, seg;
    };
    std::vector<std::vector<Link>> adj(nf);
    std::vector<Link> exits;
    std::size_t inner_links = 0;
    auto node = [&](HexVertex w) {
        const int fi = t.face_index(w);
        return (fi < 0 || !region[fi]) ? OrientedDualForest::outer : fi;
    };
    for (std::size_t si = 0; si < t.segments().size(); ++si) {
        const auto& s = t.segment(static_cast<int>(si));
        const int u = s.interior_vertex();
        if (u < 0 || f.parent[u] < 0) continue;
        // The non-tree half [u, other] separates the face on the half from
        // the face on the full segment.
        const auto ends = s.endpoints();
        const int other = ends[0] == f.parent[u] ? ends[1] : ends[0];
        const int a = node(white_across(t.vertex(u).coord, t.vertex(other).coord));
        const int b = node(white_across(t.vertex(ends[0]).coord, t.vertex(ends[1]).coord));
        if (a < 0 && b < 0) continue;
        const Link l{a, b, static_cast<int>(si)};
        if (a >= 0 && b >= 0) {
            adj[a].push_back(l);
            adj[b].push_back(l);
            ++inner_links;
        } else {
            exits.push_back(l);
        }
    }
    if (exits.size() != 1) {
        throw TopologyError("dual_forest: region has " + std::to_string(exits.size()) + " dual exits, expected 1");
    }
    if (inner_links + 1 != region_size) throw TopologyError("dual_forest: restricted dual is not a tree");

    const Link& e = exits.front();
    d.exit_face = e.a >= 0 ? e.a : e.b;
    d.exit_segment = e.seg;
    d.next[d.exit_face] = OrientedDualForest::outer;
    d.crossed[d.exit_face] = e.seg;
    std::deque<int> queue{d.exit_face};
    std::size_t reached = 1;
    while (!queue.empty()) {
        const int x = queue.front();
        queue.pop_front();
        for (const Link& l : adj[x]) {
            const int y = l.a == x ? l.b : l.a;
            if (d.next[y] != OrientedDualForest::unset) continue;
            d.next[y] = x;
            d.crossed[y] = l.seg;
            queue.push_back(y);
            ++reached;
        }
    }
    if (reached != region_size) throw TopologyError("dual_forest: restricted dual is disconnected");
    return d;
}

// --------------------------------------------------------------- matching

bool Matching::matched_white(HexVertex w) const {
    const int i = faces.index(w.m, w.n);
    return i >= 0 && white_to_black[i] >= 0;
}

bool Matching::matched_black(HexVertex b) const {
    const int i = faces.index(b.m, b.n);
    return i >= 0 && black_to_white[i] >= 0;
}

bool Matching::contains(HexEdge e) const {
    const int bi = faces.index(e.black.m, e.black.n);
    const HexVertex w = e.white();
    const int wi = faces.index(w.m, w.n);
    return bi >= 0 && wi >= 0 && black_to_white[bi] == wi;
}

std::vector<HexEdge> Matching::edges() const {
    std::vector<HexEdge> out;
    for (std::size_t bi = 0; bi < black_to_white.size(); ++bi) {
        const int wi = black_to_white[bi];
        if (wi < 0) continue;
        const DualVertex bc = faces.at(static_cast<int>(bi)), wc = faces.at(wi);
        out.push_back(edge_between(HexVertex::white(wc.m, wc.n), HexVertex::black(bc.m, bc.n)));
    }
    return out;
}

std::size_t Matching::size() const {
    std::size_t k = 0;
    for (int x : black_to_white) k += x >= 0;
    return k;
}

Matching tree_to_matching(const OrientedDualForest& dual, const TGraph& t) {
    Matching m;
    m.faces = t.face_window();
    m.white_to_black.assign(t.faces().size(), -1);
    m.black_to_white.assign(t.segments().size(), -1);
    for (std::size_t wi = 0; wi < dual.next.size(); ++wi) {
        if (dual.next[wi] == OrientedDualForest::unset) continue;
        const int bi = dual.crossed[wi];
        if (m.black_to_white[bi] >= 0) {
            throw InternalError("tree_to_matching: black vertex matched twice");
        }
        const HexVertex w = t.face(static_cast<int>(wi)).white;
        const HexVertex b = t.segment(bi).black;
        if (!adjacent(w, b)) throw InternalError("tree_to_matching: non-adjacent match");
        m.white_to_black[wi] = bi;
        m.black_to_white[bi] = static_cast<int>(wi);
    }
    return m;
}

EdgeFlow matching_flow(const Matching& m, const TGraph& t) {
    (void)t;
    // Blacks range one step wider than the face window so that every edge of
    // a matched white is representable.
    const Window& fw = m.faces;
    EdgeFlow f(Window{fw.m0 - 1, fw.m1, fw.n0 - 1, fw.n1});
    for (int bm = fw.m0 - 1; bm <= fw.m1; ++bm) {
        for (int bn = fw.n0 - 1; bn <= fw.n1; ++bn) {
            for (int s = 0; s < 3; ++s) {
                const HexEdge e{HexVertex::black(bm, bn), s};
                const HexVertex w = e.white();
                if (m.matched_white(w)) f.set(e, m.contains(e) ? 1.0 : 0.0);
            }
        }
    }
    return f;
}

// ---------------------------------------------------------------- heights

double HeightFunction::at(DualVertex v) const {
    const int i = window.index(v);
    if (i < 0) throw WindowError("height outside window");
    return value[i];
}

bool HeightFunction::defined(DualVertex v) const {
    const int i = window.index(v);
    return i >= 0 && !std::isnan(value[i]);
}

HeightFunction height_from_flow(const EdgeFlow& matching, const EdgeFlow& reference,
                                const Window& dual_window, DualVertex base, double tol) {
    HeightFunction h;
    h.window = dual_window;
    h.base = base;
    h.value.assign(dual_window.size(), kNaN);
    if (!dual_window.contains(base)) throw WindowError("height base outside window");

    // Increment h(y) - h(x) across the dual edge x -> y, or NaN. Heights
    // cross wb with the white vertex on the right of x -> y; dual_of_edge
    // returns the white-on-left orientation used for psi.
    auto increment = [&](DualVertex x, DualVertex y) {
        const HexEdge e = crossed_edge(x, y);
        const double d = matching(e) - reference(e);
        if (std::isnan(d)) return kNaN;
        const DualEdge de = dual_of_edge(e, Orientation::white_to_black);
        return de.from == x ? -d : d;
    };

    std::deque<DualVertex> queue{base};
    h.value[dual_window.index(base)] = 0.0;
    while (!queue.empty()) {
        const DualVertex x = queue.front();
        queue.pop_front();
        const double hx = h.value[dual_window.index(x)];
        for (const DualVertex& y : dual_neighbors(x)) {
            const int yi = dual_window.index(y);
            if (yi < 0 || !std::isnan(h.value[yi])) continue;
            const double inc = increment(x, y);
            if (std::isnan(inc)) continue;
            h.value[yi] = hx + inc;
            queue.push_back(y);
        }
    }
    // Every defined edge between reached vertices must be consistent.
    for (int i = 0; i < static_cast<int>(dual_window.size()); ++i) {
        if (std::isnan(h.value[i])) continue;
        const DualVertex x = dual_window.at(i);
        for (const DualVertex& y : dual_neighbors(x)) {
            const int yi = dual_window.index(y);
            if (yi < 0 || std::isnan(h.value[yi])) continue;
            const double inc = increment(x, y);
            if (std::isnan(inc)) continue;
            if (std::abs(h.value[yi] - h.value[i] - inc) > tol) {
                throw InternalError("height_from_flow: flow difference is not a gradient");
            }
        }
    }
    return h;
}

// ------------------------------------------------------------- tree paths

TreePath tree_path(const TGraph& t, const SpanningForest& f, int v, int w) {
    auto ancestors = [&](int x) {
        std::vector<int> a{x};
        while (f.parent[a.back()] >= 0) a.push_back(f.parent[a.back()]);
        return a;
    };
    const auto av = ancestors(v), aw = ancestors(w);
    if (av.back() != aw.back()) throw ConnectivityError("tree_path: vertices in different components");
    // Strip the common tail.
    std::size_t i = av.size(), j = aw.size();
    while (i > 0 && j > 0 && av[i - 1] == aw[j - 1]) {
        --i;
        --j;
    }
    TreePath p;
    p.apex = i;
    p.vertices.assign(av.begin(), av.begin() + static_cast<std::ptrdiff_t>(i + 1));
    for (std::size_t k = j; k-- > 0;) p.vertices.push_back(aw[k]);

    const auto n0 = incoming_normal(t, v);
    const auto n1 = incoming_normal(t, w);
    if (!n0 || !n1) throw WindowError("tree_path: stub direction unavailable at window boundary");
    // Stub length small against the shortest adjacent edge.
    auto stub_len = [&](int x) {
        const auto& vx = t.vertex(x);
        return 0.25 * std::min(1.0 / vx.rate[0], 1.0 / vx.rate[1]);
    };
    p.before = t.position(v) + *n0 * stub_len(v);
    p.after = t.position(w) - *n1 * stub_len(w);
    return p;
}

double polyline_winding(std::span<const cplx> pts) {
    double total = 0.0;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        const cplx a = pts[i] - pts[i - 1], b = pts[i + 1] - pts[i];
        if (a == cplx(0.0, 0.0) || b == cplx(0.0, 0.0)) throw InvalidArgument("winding: repeated point");
        total += std::atan2(cross(a, b), dot(a, b));
    }
    return total;
}

double winding(const TGraph& t, const TreePath& p) {
    std::vector<cplx> pts;
    pts.reserve(p.vertices.size() + 2);
    pts.push_back(p.before);
    for (int v : p.vertices) pts.push_back(t.position(v));
    pts.push_back(p.after);
    return polyline_winding(pts);
}

double tree_winding(const TGraph& t, const SpanningForest& f, int v, int w) {
    const TreePath p = tree_path(t, f, v, w);
    const int apex = p.vertices[p.apex];
    // Both branches climb toward the root, where every turn is unambiguous.
    return winding(t, tree_path(t, f, v, apex)) - winding(t, tree_path(t, f, w, apex));
}

HeightWindingReport verify_height_winding(const TGraph& t, const SpanningForest& f,
                                          const HeightFunction& h,
                                          std::span<const std::pair<int, int>> pairs) {
    HeightWindingReport r;
    for (auto [v, w] : pairs) {
        const double dh = h.at(t.vertex(w).coord) - h.at(t.vertex(v).coord);
        if (std::isnan(dh)) throw WindowError("verify_height_winding: height undefined at a pair vertex");
        const double wi = tree_winding(t, f, v, w) / (2 * std::numbers::pi);
        r.max_discrepancy = std::max(r.max_discrepancy, std::abs(dh - wi));
        const double literal = winding(t, tree_path(t, f, v, w)) / (2 * std::numbers::pi);
        r.max_literal_discrepancy = std::max(r.max_literal_discrepancy, std::abs(dh - literal));
        ++r.pairs;
    }
    return r;
}

}  // namespace tdimer
