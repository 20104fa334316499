#include "tdimer/domain_builder.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <set>
#include <tuple>
#include <unordered_map>

#include "tdimer/error.hpp"

namespace tdimer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double signed_area(std::span<const cplx> poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * a;
}

double dist_to_segment(cplx p, cplx a, cplx b) {
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    double s = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return std::abs(p - (a + s * ab));
}

double dist_to_closed_polyline(cplx p, std::span<const cplx> poly) {
    double d = kInf;
    for (std::size_t i = 0; i < poly.size(); ++i) d = std::min(d, dist_to_segment(p, poly[i], poly[(i + 1) % poly.size()]));
    return d;
}

bool segments_intersect(cplx a, cplx b, cplx c, cplx d) {
    const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

/// Even-odd point location; points on the polygon are not expected.
bool point_in_polygon(cplx p, std::span<const cplx> poly) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const cplx a = poly[i], b = poly[j];
        if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
            const double x = a.real() + (p.imag() - a.imag()) / (b.imag() - a.imag()) * (b.real() - a.real());
            if (p.real() < x) in = !in;
        }
    }
    return in;
}

/// Point of the polygon farthest from its boundary on a coarse grid.
cplx deep_point(std::span<const cplx> poly) {
    double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
    for (cplx p : poly) {
        x0 = std::min(x0, p.real());
        x1 = std::max(x1, p.real());
        y0 = std::min(y0, p.imag());
        y1 = std::max(y1, p.imag());
    }
    cplx best = poly[0];
    double best_d = -1.0;
    constexpr int N = 64;
    for (int i = 1; i < N; ++i) {
        for (int j = 1; j < N; ++j) {
            const cplx p(x0 + (x1 - x0) * i / N, y0 + (y1 - y0) * j / N);
            if (!point_in_polygon(p, poly)) continue;
            const double d = dist_to_closed_polyline(p, poly);
            if (d > best_d) {
                best_d = d;
                best = p;
            }
        }
    }
    return best;
}

std::vector<cplx> loop_positions(const TGraph& t, std::span<const int> loop, double scale = 1.0) {
    std::vector<cplx> pts;
    pts.reserve(loop.size());
    for (int v : loop) pts.push_back(scale * t.position(v));
    return pts;
}

bool is_edge(const TGraph& t, int u, int v) {
    const auto& vx = t.vertex(u);
    return vx.has_out() && (vx.out[0] == v || vx.out[1] == v);
}

/// Chronological loop erasure.
std::vector<int> loop_erase(std::span<const int> walk) {
    std::vector<int> out;
    std::unordered_map<int, std::size_t> pos;
    for (int v : walk) {
        auto it = pos.find(v);
        if (it != pos.end()) {
            for (std::size_t k = it->second + 1; k < out.size(); ++k) pos.erase(out[k]);
            out.resize(it->second + 1);
        } else {
            pos.emplace(v, out.size());
            out.push_back(v);
        }
    }
    return out;
}

}  // namespace

// ------------------------------------------------------------ continuous

ContinuousDomain make_domain(std::vector<cplx> boundary, cplx marked) {
    if (boundary.size() < 3) throw InvalidArgument("domain: polygon needs at least 3 vertices");
    if (signed_area(boundary) <= 0) throw InvalidArgument("domain: polygon must be positively oriented");
    const std::size_t n = boundary.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (segments_intersect(boundary[i], boundary[(i + 1) % n], boundary[j], boundary[(j + 1) % n])) {
                throw InvalidArgument("domain: polygon is not simple");
            }
        }
    }
    double diam = 0.0;
    for (cplx a : boundary) {
        for (cplx b : boundary) diam = std::max(diam, std::abs(a - b));
    }
    if (dist_to_closed_polyline(marked, boundary) > 1e-9 * diam) {
        throw InvalidArgument("domain: marked point is not on the boundary");
    }
    return {std::move(boundary), marked};
}

ContinuousDomain square_domain(double side) {
    if (!(side > 0)) throw InvalidArgument("square_domain: side must be positive");
    return make_domain({{0, 0}, {side, 0}, {side, side}, {0, side}}, {side / 2, 0});
}

ContinuousDomain l_shape_domain() {
    return make_domain({{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}}, {0.5, 0});
}

std::vector<cplx> image_boundary(const TriangleShape& shape, const ContinuousDomain& u) {
    std::vector<cplx> out;
    out.reserve(u.boundary.size());
    for (cplx p : u.boundary) out.push_back(linear_approx(shape, p.real(), p.imag()));
    return out;
}

Window domain_window(const ContinuousDomain& u, double delta, double factor) {
    if (!(delta > 0)) throw InvalidArgument("domain_window: delta must be positive");
    double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
    for (cplx p : u.boundary) {
        x0 = std::min(x0, p.real());
        x1 = std::max(x1, p.real());
        y0 = std::min(y0, p.imag());
        y1 = std::max(y1, p.imag());
    }
    const double diam = std::max(x1 - x0, y1 - y0) / delta;
    const double half = 0.5 * std::max(factor, 1.0) * diam + 2.0;
    const double cm = 0.5 * (x0 + x1) / delta, cn = 0.5 * (y0 + y1) / delta;
    return Window{static_cast<int>(std::floor(cm - half)), static_cast<int>(std::ceil(cm + half)),
                  static_cast<int>(std::floor(cn - half)), static_cast<int>(std::ceil(cn + half))};
}

// ------------------------------------------------------------------ loop

std::vector<int> build_loop(const TGraph& t, double delta, const ContinuousDomain& u, double eps) {
    if (!(delta > 0) || !(eps > 0)) throw InvalidArgument("build_loop: delta and eps must be positive");
    const std::vector<cplx> gamma = image_boundary(t.shape(), u);
    const std::size_t nv = t.num_vertices();

    std::vector<double> dist(nv, kInf);
    std::vector<int> corridor;
    for (std::size_t v = 0; v < nv; ++v) {
        if (!t.vertex(static_cast<int>(v)).has_out()) continue;
        const double d = dist_to_closed_polyline(delta * t.position(static_cast<int>(v)), gamma);
        if (d <= eps) {
            dist[v] = d;
            corridor.push_back(static_cast<int>(v));
        }
    }
    if (corridor.empty()) throw ResolutionError("build_loop: empty corridor; enlarge the window or eps");

    // Waypoints at spacing about eps / 2 along the boundary image.
    double perimeter = 0.0;
    for (std::size_t i = 0; i < gamma.size(); ++i) perimeter += std::abs(gamma[(i + 1) % gamma.size()] - gamma[i]);
    const std::size_t k = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(perimeter / (0.5 * eps))));
    std::vector<cplx> way;
    {
        std::size_t seg = 0;
        double seg_start = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double s = perimeter * static_cast<double>(j) / static_cast<double>(k);
            while (seg_start + std::abs(gamma[(seg + 1) % gamma.size()] - gamma[seg]) < s) {
                seg_start += std::abs(gamma[(seg + 1) % gamma.size()] - gamma[seg]);
                ++seg;
            }
            const cplx a = gamma[seg], b = gamma[(seg + 1) % gamma.size()];
            way.push_back(a + (b - a) * ((s - seg_start) / std::abs(b - a)));
        }
    }
    std::vector<int> target(k);
    for (std::size_t j = 0; j < k; ++j) {
        double best = kInf;
        for (int v : corridor) {
            const double d = std::abs(delta * t.position(v) - way[j]);
            if (d < best) {
                best = d;
                target[j] = v;
            }
        }
    }

    // Dijkstra between consecutive targets inside a disc around the pair.
    std::vector<double> cost(nv, kInf);
    std::vector<int> prev(nv, -1);
    std::vector<char> allowed(nv, 0);
    auto route = [&](int from, int to, cplx centre, double radius) -> std::vector<int> {
        std::vector<int> touched;
        for (int v : corridor) {
            if (std::abs(delta * t.position(v) - centre) <= radius) {
                allowed[v] = 1;
                touched.push_back(v);
            }
        }
        allowed[from] = allowed[to] = 1;
        touched.push_back(from);
        touched.push_back(to);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        cost[from] = 0.0;
        pq.push({0.0, from});
        while (!pq.empty()) {
            const auto [c, x] = pq.top();
            pq.pop();
            if (c > cost[x]) continue;
            if (x == to) break;
            const auto& vx = t.vertex(x);
            for (int e = 0; e < 2; ++e) {
                const int y = vx.out[e];
                if (y < 0 || !allowed[y]) continue;
                const double r = dist[y] / eps;
                const double nc = c + delta * std::abs(t.position(y) - vx.pos) * (1.0 + 4.0 * r * r);
                if (nc < cost[y]) {
                    cost[y] = nc;
                    prev[y] = x;
                    pq.push({nc, y});
                }
            }
        }
        std::vector<int> path;
        if (cost[to] < kInf) {
            for (int x = to; x != from; x = prev[x]) path.push_back(x);
            path.push_back(from);
            std::reverse(path.begin(), path.end());
        }
        for (int v : touched) {
            allowed[v] = 0;
            cost[v] = kInf;
            prev[v] = -1;
        }
        return path;
    };

    std::vector<int> walk{target[0]};
    std::vector<std::size_t> midpoints;
    for (std::size_t j = 0; j < k; ++j) {
        const int a = target[j], b = target[(j + 1) % k];
        if (a == b) continue;
        const cplx centre = 0.5 * (way[j] + way[(j + 1) % k]);
        const double half = 0.5 * std::abs(way[(j + 1) % k] - way[j]);
        std::vector<int> p;
        for (int attempt = 1; attempt <= 4 && p.empty(); ++attempt) p = route(a, b, centre, half + attempt * eps);
        if (p.empty()) {
            throw ResolutionError("build_loop: no directed path inside the corridor; use a smaller delta");
        }
        midpoints.push_back(walk.size() - 1 + p.size() / 2);
        walk.insert(walk.end(), p.begin() + 1, p.end());
    }
    walk.pop_back();  // closing return to target[0]

    // Unroll the closed walk at a vertex visited once, away from route
    // junctions, so that erasure only removes local loops. Several cut points
    // are tried and the longest cycle winding once is kept.
    std::unordered_map<int, int> visits;
    for (int v : walk) ++visits[v];
    const cplx inner = deep_point(gamma) / delta;
    std::vector<int> loop;
    const std::size_t tries = std::min<std::size_t>(midpoints.size(), 8);
    for (std::size_t r = 0; r < tries; ++r) {
        const std::size_t cut = midpoints[r * midpoints.size() / tries] % walk.size();
        if (visits[walk[cut]] != 1) continue;
        std::vector<int> rotated(walk.begin() + static_cast<std::ptrdiff_t>(cut), walk.end());
        rotated.insert(rotated.end(), walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>(cut));
        std::vector<int> cand = loop_erase(rotated);
        if (cand.size() < 3 || !is_edge(t, cand.back(), cand.front())) continue;
        if (loop_winding_number(t, cand, inner) != 1) continue;
        if (cand.size() > loop.size()) loop = std::move(cand);
    }
    if (loop.empty()) {
        throw ResolutionError("build_loop: no simple loop winding once around the domain; use a smaller delta");
    }
    return loop;
}

double loop_hausdorff(const TGraph& t, double delta, std::span<const int> loop, const ContinuousDomain& u) {
    const std::vector<cplx> gamma = image_boundary(t.shape(), u);
    const std::vector<cplx> pts = loop_positions(t, loop, delta);
    double h = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const cplx a = pts[i], b = pts[(i + 1) % pts.size()];
        h = std::max({h, dist_to_closed_polyline(a, gamma), dist_to_closed_polyline(0.5 * (a + b), gamma)});
    }
    double spacing = kInf;
    for (std::size_t i = 0; i < pts.size(); ++i) spacing = std::min(spacing, std::abs(pts[(i + 1) % pts.size()] - pts[i]));
    spacing = std::max(spacing, 1e-12);
    for (std::size_t i = 0; i < gamma.size(); ++i) {
        const cplx a = gamma[i], b = gamma[(i + 1) % gamma.size()];
        const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / spacing)));
        for (int s = 0; s < steps; ++s) {
            h = std::max(h, dist_to_closed_polyline(a + (b - a) * (static_cast<double>(s) / steps), pts));
        }
    }
    return h;
}

int loop_winding_number(const TGraph& t, std::span<const int> loop, cplx point) {
    double total = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const cplx a = t.position(loop[i]) - point, b = t.position(loop[(i + 1) % loop.size()]) - point;
        total += std::atan2(cross(a, b), dot(a, b));
    }
    return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

std::vector<Side> loop_sides(const TGraph& t, std::span<const int> loop) {
    const Window& w = t.window();
    std::vector<Side> side(t.num_vertices(), Side::inside);
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const int v = loop[i];
        if (side[v] == Side::loop) throw InternalError("loop_sides: loop is not simple");
        side[v] = Side::loop;
        const DualVertex a = t.vertex(v).coord, b = t.vertex(loop[(i + 1) % loop.size()]).coord;
        const auto nb = dual_neighbors(a);
        if (std::find(nb.begin(), nb.end(), b) == nb.end()) {
            throw InternalError("loop_sides: consecutive loop vertices are not dual neighbours");
        }
    }
    std::deque<int> queue;
    auto seed = [&](int m, int n) {
        const int v = w.index(m, n);
        if (side[v] == Side::inside) {
            side[v] = Side::outside;
            queue.push_back(v);
        }
    };
    for (int m = w.m0; m <= w.m1; ++m) {
        seed(m, w.n0);
        seed(m, w.n1);
    }
    for (int n = w.n0; n <= w.n1; ++n) {
        seed(w.m0, n);
        seed(w.m1, n);
    }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (const DualVertex& y : dual_neighbors(t.vertex(v).coord)) {
            const int yi = w.index(y);
            if (yi >= 0 && side[yi] == Side::inside) {
                side[yi] = Side::outside;
                queue.push_back(yi);
            }
        }
    }
    return side;
}

// ---------------------------------------------------------------- escape

std::vector<int> build_escape(const TGraph& t, double delta, std::span<const int> loop, cplx target) {
    const std::vector<Side> side = loop_sides(t, loop);
    const std::size_t nv = t.num_vertices();

    // Steps to the window boundary through outside vertices (reverse BFS).
    std::vector<std::vector<int>> rev(nv);
    std::vector<int> steps(nv, -1);
    std::deque<int> queue;
    for (std::size_t v = 0; v < nv; ++v) {
        if (side[v] != Side::outside) continue;
        const auto& vx = t.vertex(static_cast<int>(v));
        if (!vx.has_out()) {
            steps[v] = 0;
            queue.push_back(static_cast<int>(v));
            continue;
        }
        for (int y : vx.out) {
            if (y >= 0 && side[y] == Side::outside) rev[y].push_back(static_cast<int>(v));
        }
    }
    while (!queue.empty()) {
        const int y = queue.front();
        queue.pop_front();
        for (int x : rev[y]) {
            if (steps[x] < 0) {
                steps[x] = steps[y] + 1;
                queue.push_back(x);
            }
        }
    }

    struct Candidate {
        double distance;
        std::size_t position;
        int exit;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const int c = loop[i], next = loop[(i + 1) % loop.size()];
        const auto& vx = t.vertex(c);
        const int other = vx.out[0] == next ? vx.out[1] : vx.out[0];
        if (other < 0 || side[other] != Side::outside || steps[other] < 0) continue;
        candidates.push_back({std::abs(delta * vx.pos - target), i, other});
    }
    if (candidates.empty()) throw WindowError("build_escape: no escape to the window boundary");
    const auto best = std::min_element(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        return std::tie(a.distance, a.position) < std::tie(b.distance, b.position);
    });
    std::vector<int> path{loop[best->position], best->exit};
    while (steps[path.back()] > 0) {
        const auto& vx = t.vertex(path.back());
        const int y = (vx.out[0] >= 0 && steps[vx.out[0]] == steps[path.back()] - 1) ? vx.out[0] : vx.out[1];
        path.push_back(y);
    }
    return path;
}

// -------------------------------------------------------------- assemble

std::size_t DiscreteDomain::num_whites() const {
    return static_cast<std::size_t>(std::count(white_inside.begin(), white_inside.end(), 1)) - 1;
}

std::size_t DiscreteDomain::num_blacks() const {
    return static_cast<std::size_t>(std::count(black_inside.begin(), black_inside.end(), 1));
}

namespace {

/// Inside test for a hex face given its three dual corners.
bool face_inside(const TGraph& t, const std::vector<Side>& side, std::span<const int> corners,
                 std::span<const cplx> regular_loop) {
    for (int c : corners) {
        if (side[c] == Side::inside) return true;
        if (side[c] == Side::outside) return false;
    }
    // All three corners on the loop.
    cplx centroid = 0.0;
    for (int c : corners) centroid += regular_position(t.vertex(c).coord);
    return point_in_polygon(centroid / 3.0, regular_loop);
}

}  // namespace

DiscreteDomain assemble(const TGraph& t, double delta, std::vector<int> loop, std::vector<int> escape) {
    if (loop.size() < 3) throw InvalidArgument("assemble: loop too short");
    if (escape.size() < 2) throw InvalidArgument("assemble: escape too short");
    DiscreteDomain d;
    d.delta = delta;
    const int x = escape.front();
    auto it = std::find(loop.begin(), loop.end(), x);
    if (it == loop.end()) throw InvalidArgument("assemble: escape does not start on the loop");
    std::rotate(loop.begin(), it, loop.end());
    for (std::size_t i = 0; i < loop.size(); ++i) {
        if (!is_edge(t, loop[i], loop[(i + 1) % loop.size()])) throw InvalidArgument("assemble: loop step is not an edge");
    }
    d.side = loop_sides(t, loop);
    for (std::size_t i = 1; i < escape.size(); ++i) {
        if (!is_edge(t, escape[i - 1], escape[i])) throw InvalidArgument("assemble: escape step is not an edge");
        if (d.side[escape[i]] != Side::outside) throw InvalidArgument("assemble: escape meets the loop or its inside");
    }
    if (t.vertex(escape.back()).has_out()) throw InvalidArgument("assemble: escape must end on the window boundary");
    {
        std::set<int> seen(escape.begin(), escape.end());
        if (seen.size() != escape.size()) throw InvalidArgument("assemble: escape is not simple");
    }

    d.marked = x;
    d.erased_edge = {x, loop[1]};
    d.path.assign(loop.begin() + 1, loop.end());
    d.path.push_back(x);
    d.path.insert(d.path.end(), escape.begin() + 1, escape.end());
    d.loop = std::move(loop);
    d.escape = std::move(escape);

    std::vector<cplx> regular_loop;
    for (int v : d.loop) regular_loop.push_back(regular_position(t.vertex(v).coord));

    d.white_inside.assign(t.faces().size(), 0);
    for (std::size_t fi = 0; fi < t.faces().size(); ++fi) {
        d.white_inside[fi] = face_inside(t, d.side, t.face(static_cast<int>(fi)).corner, regular_loop);
    }
    d.black_inside.assign(t.segments().size(), 0);
    for (std::size_t si = 0; si < t.segments().size(); ++si) {
        d.black_inside[si] = face_inside(t, d.side, t.segment(static_cast<int>(si)).corner, regular_loop);
    }

    d.removed_white = t.face_index(white_across(t.vertex(x).coord, t.vertex(d.loop[1]).coord));
    d.marked_segment = t.vertex(x).segment;
    if (d.removed_white < 0 || !d.white_inside[d.removed_white]) {
        throw InternalError("assemble: face across the erased edge is not inside the loop");
    }
    if (d.marked_segment < 0 || d.black_inside[d.marked_segment]) {
        throw InternalError("assemble: segment of the marked face is inside the loop");
    }
    if (d.num_whites() != d.num_blacks()) throw InternalError("assemble: hex domain is unbalanced");

    std::vector<int> inside;
    for (std::size_t v = 0; v < t.num_vertices(); ++v) {
        if (d.side[v] != Side::inside) continue;
        if (!t.vertex(static_cast<int>(v)).has_out()) throw WindowError("assemble: inside vertex on the window boundary");
        inside.push_back(static_cast<int>(v));
    }
    d.wired = make_wired_domain(t, inside);
    for (const auto& tg : d.wired.graph_target) {
        for (int y : tg) {
            if (d.side[y] == Side::outside) throw InternalError("assemble: inside vertex jumps outside the loop");
        }
    }

    const DualVertex xc = t.vertex(x).coord;
    for (const HexVertex& w : {HexVertex::white(xc.m, xc.n), HexVertex::white(xc.m + 1, xc.n),
                               HexVertex::white(xc.m + 1, xc.n - 1)}) {
        const int fi = t.face_index(w);
        if (fi >= 0 && fi != d.removed_white && d.white_inside[fi]) d.marked_adjacent = true;
    }
    for (const HexVertex& b : {HexVertex::black(xc.m, xc.n), HexVertex::black(xc.m + 1, xc.n - 1),
                               HexVertex::black(xc.m, xc.n - 1)}) {
        const int si = t.segment_index(b);
        if (si >= 0 && d.black_inside[si]) d.marked_adjacent = true;
    }
    return d;
}

DiscreteDomain build_domain(const TGraph& t, double delta, const ContinuousDomain& u, double eps) {
    if (eps <= 0) eps = 5.0 * delta;
    std::vector<int> loop = build_loop(t, delta, u, eps);
    const cplx x = linear_approx(t.shape(), u.marked.real(), u.marked.imag());
    std::vector<int> escape = build_escape(t, delta, loop, x);
    return assemble(t, delta, std::move(loop), std::move(escape));
}

// ---------------------------------------------------- forests and heights

SpanningForest domain_forest(const TGraph& t, const DiscreteDomain& d, const Arborescence& a) {
    SpanningForest f;
    f.parent.assign(t.num_vertices(), -1);
    apply_path(t, d.path, f);
    apply_arborescence(d.wired, a, f);
    return f;
}

SpanningForest sample_domain_forest(const TGraph& t, const DiscreteDomain& d, std::uint64_t seed) {
    return domain_forest(t, d, wilson_wired(d.wired, seed));
}

Matching domain_matching(const TGraph& t, const DiscreteDomain& d, const SpanningForest& f) {
    const OrientedDualForest dual = dual_forest(t, f, d.white_inside);
    if (dual.exit_face != d.removed_white || dual.exit_segment != d.marked_segment) {
        throw InternalError("domain_matching: dual exit is not the erased edge");
    }
    return tree_to_matching(dual, t);
}

std::vector<HexEdge> interior_edges(const TGraph& t, const DiscreteDomain& d, const Matching& m) {
    std::vector<HexEdge> out;
    const HexVertex removed = t.face(d.removed_white).white;
    for (const HexEdge& e : m.edges()) {
        if (e.white() != removed) out.push_back(e);
    }
    return out;
}

HeightFunction domain_heights(const TGraph& t, const DiscreteDomain& d, const Matching& m) {
    return height_from_flow(matching_flow(m, t), reference_flow(t), t.window(), t.vertex(d.marked).coord);
}

std::vector<double> boundary_height_profile(const TGraph& t, const DiscreteDomain& d) {
    SpanningForest f;
    f.parent.assign(t.num_vertices(), -1);
    apply_path(t, d.path, f);
    std::vector<double> out;
    out.reserve(d.loop.size());
    for (int v : d.loop) out.push_back(tree_winding(t, f, d.marked, v) / (2 * std::numbers::pi));
    return out;
}

// ------------------------------------------------- geometric cross-check

ClassificationReport check_classification(const TGraph& t, const DiscreteDomain& d) {
    ClassificationReport r;
    const std::vector<cplx> poly = loop_positions(t, d.loop);
    std::vector<int> succ(t.num_vertices(), -1);
    for (std::size_t i = 0; i < d.loop.size(); ++i) succ[d.loop[i]] = d.loop[(i + 1) % d.loop.size()];

    double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
    for (cplx p : poly) {
        x0 = std::min(x0, p.real());
        x1 = std::max(x1, p.real());
        y0 = std::min(y0, p.imag());
        y1 = std::max(y1, p.imag());
    }
    auto near_loop = [&](cplx p) {
        const double pad = 2.0 * t.mean_segment_length();
        return p.real() > x0 - pad && p.real() < x1 + pad && p.imag() > y0 - pad && p.imag() < y1 + pad;
    };
    auto closed_in = [&](int v) { return d.side[v] == Side::loop || point_in_polygon(t.position(v), poly); };

    for (std::size_t fi = 0; fi < t.faces().size(); ++fi) {
        const auto& f = t.face(static_cast<int>(fi));
        const cplx c = (t.position(f.corner[0]) + t.position(f.corner[1]) + t.position(f.corner[2])) / 3.0;
        if (!near_loop(c)) continue;
        // psi(w) lies in the closed domain.
        bool in = closed_in(f.corner[0]) && closed_in(f.corner[1]) && closed_in(f.corner[2]);
        if (in) in = point_in_polygon(c, poly);
        ++r.whites_checked;
        if (in != static_cast<bool>(d.white_inside[fi])) ++r.mismatches;
    }
    for (std::size_t si = 0; si < t.segments().size(); ++si) {
        const auto& s = t.segment(static_cast<int>(si));
        const int u = s.interior_vertex();
        if (!near_loop(t.position(u))) continue;
        const auto ends = s.endpoints();
        bool in;
        if (succ[u] >= 0) {
            // Shares an edge with the loop: decided by the side with a single triangle.
            const int fi = t.face_index(white_across(t.vertex(ends[0]).coord, t.vertex(ends[1]).coord));
            const auto& f = t.face(fi);
            in = point_in_polygon((t.position(f.corner[0]) + t.position(f.corner[1]) + t.position(f.corner[2])) / 3.0, poly);
        } else {
            in = point_in_polygon(0.5 * (t.position(u) + t.position(ends[0])), poly) &&
                 point_in_polygon(0.5 * (t.position(u) + t.position(ends[1])), poly);
        }
        ++r.blacks_checked;
        if (in != static_cast<bool>(d.black_inside[si])) ++r.mismatches;
    }
    return r;
}

// ---------------------------------------------------------- tiny domains

std::vector<TinyDomain> find_tiny_domains(const TriangleShape& shape, std::size_t count, std::size_t max_inside) {
    std::vector<TinyDomain> out;
    std::set<std::pair<std::size_t, std::size_t>> sizes;
    const ContinuousDomain u = square_domain();
    // Coarse scales of the regular pipeline; distinct (inside, whites) sizes only.
    for (double delta : {0.5, 0.4, 0.34, 0.3, 0.25, 0.2}) {
        for (double turns : {0.377, 0.1234, 0.0, 0.61}) {
            for (double eps_factor : {1.0, 1.5, 2.0}) {
                if (out.size() >= count) return out;
                try {
                    TGraph t(shape, Twist::from_turns(turns), domain_window(u, delta));
                    DiscreteDomain d = build_domain(t, delta, u, eps_factor * delta);
                    const std::size_t inside = d.wired.size();
                    if (inside == 0 || inside > max_inside) continue;
                    if (!sizes.insert({inside, d.num_whites()}).second) continue;
                    out.push_back({std::move(t), std::move(d), turns});
                } catch (const Error&) {
                }
            }
        }
    }
    return out;
}

std::vector<std::vector<HexEdge>> enumerate_domain_matchings(const TGraph& t, const DiscreteDomain& d,
                                                             std::size_t limit) {
    std::vector<HexVertex> whites;
    for (std::size_t fi = 0; fi < t.faces().size(); ++fi) {
        if (d.white_inside[fi] && static_cast<int>(fi) != d.removed_white) whites.push_back(t.face(static_cast<int>(fi)).white);
    }
    std::set<HexVertex> blacks;
    for (std::size_t si = 0; si < t.segments().size(); ++si) {
        if (d.black_inside[si]) blacks.insert(t.segment(static_cast<int>(si)).black);
    }
    std::vector<std::vector<HexEdge>> out;
    std::vector<HexEdge> current;
    std::set<HexVertex> used;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (out.size() >= limit) return;
        if (i == whites.size()) {
            if (used.size() == blacks.size()) out.push_back(current);
            return;
        }
        for (const HexVertex& b : hex_neighbors(whites[i])) {
            if (!blacks.count(b) || used.count(b)) continue;
            used.insert(b);
            current.push_back(edge_between(whites[i], b));
            rec(i + 1);
            current.pop_back();
            used.erase(b);
        }
    };
    rec(0);
    for (auto& m : out) std::sort(m.begin(), m.end());
    return out;
}

}  // namespace tdimer
