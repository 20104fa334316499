#include "tdimer/tgraph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tdimer/error.hpp"

namespace tdimer {

namespace {

constexpr double kPi = std::numbers::pi;

// r_slot: phi(w, b) = s_w * alpha * r_slot where slot is the edge's slot at b.
std::array<cplx, 3> slot_factors(const TriangleShape& s) {
    return {cplx(1.0, 0.0), s.gamma / s.beta, s.alpha / s.beta};
}

cplx face_scale(const TriangleShape& shape, const Twist& twist, int m, int n) {
    const double a = white_phase(shape, twist, m, n);
    return std::cos(a) * std::polar(1.0, a);
}

}  // namespace

TriangleShape build_triangle(double pa, double pb, double pc) {
    for (double p : {pa, pb, pc}) {
        if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("slope probabilities must lie in (0,1)");
    }
    if (std::abs(pa + pb + pc - 1.0) > 1e-12) {
        throw InvalidArgument("slope probabilities must sum to 1");
    }
    TriangleShape t;
    t.pa = pa;
    t.pb = pb;
    t.pc = pc;
    t.A = 0.0;
    t.B = std::sin(kPi * pc);
    t.C = std::polar(std::sin(kPi * pb), kPi * pa);
    t.alpha = t.C - t.B;
    t.beta = t.A - t.C;
    t.gamma = t.B - t.A;
    return t;
}

Twist Twist::from_angle(double radians) {
    Twist t;
    double a = std::fmod(radians, 2 * kPi);
    if (a < 0) a += 2 * kPi;
    if (a >= 2 * kPi) a = 0.0;
    t.angle_ = a;
    return t;
}

Twist Twist::from_turns(double turns) {
    double f = turns - std::floor(turns);
    return from_angle(2 * kPi * f);
}

Twist Twist::from_complex(cplx z) {
    if (z == cplx(0.0, 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw InvalidArgument("twist must be a finite non-zero complex number");
    }
    return from_angle(std::arg(z));
}

double Twist::turns() const { return angle_ / (2 * kPi); }

cplx Twist::lambda() const { return std::polar(1.0, angle_); }

double white_phase(const TriangleShape& shape, const Twist& twist, int m, int n) {
    const double az = std::arg(shape.beta / shape.gamma);
    const double ae = std::arg(shape.beta / shape.alpha);
    return twist.angle() + m * az + n * ae;
}

cplx flow(HexVertex a, HexVertex b, const TriangleShape& shape, const Twist& twist) {
    if (a.color == Color::black && b.color == Color::white) return -flow(b, a, shape, twist);
    if (a.color != Color::white || b.color != Color::black) {
        throw InvalidArgument("flow: need one white and one black vertex");
    }
    const HexEdge e = edge_between(a, b);
    return face_scale(shape, twist, a.m, a.n) * shape.alpha * slot_factors(shape)[e.slot];
}

Twist translate_twist(const Twist& twist, int m, int n, const TriangleShape& shape) {
    // Only the argument of lambda enters the flow, so the modulus of
    // (beta/gamma)^m (beta/alpha)^n can be dropped.
    return Twist::from_angle(white_phase(shape, twist, m, n));
}

cplx linear_approx(const TriangleShape& shape, double m, double n) {
    return shape.alpha / shape.beta * (shape.alpha * m - shape.gamma * n) * 0.5;
}

Window window_covering(const TriangleShape& shape, cplx lo, cplx hi, int margin) {
    const cplx a = linear_approx(shape, 1, 0);
    const cplx b = linear_approx(shape, 0, 1);
    const double det = cross(a, b);
    double m0 = HUGE_VAL, m1 = -HUGE_VAL, n0 = HUGE_VAL, n1 = -HUGE_VAL;
    for (const cplx p : {lo, hi, cplx(lo.real(), hi.imag()), cplx(hi.real(), lo.imag())}) {
        const double m = cross(p, b) / det;
        const double n = cross(a, p) / det;
        m0 = std::min(m0, m);
        m1 = std::max(m1, m);
        n0 = std::min(n0, n);
        n1 = std::max(n1, n);
    }
    return {static_cast<int>(std::floor(m0)) - margin, static_cast<int>(std::ceil(m1)) + margin,
            static_cast<int>(std::floor(n0)) - margin, static_cast<int>(std::ceil(n1)) + margin};
}

TGraph::TGraph(const TriangleShape& shape, const Twist& twist, const Window& window,
               const BuildOptions& options)
    : shape_(shape), twist_(twist), window_(window) {
    if (window.empty()) throw InvalidArgument("T-graph window is empty");
    face_window_ = {window.m0 + 1, window.m1, window.n0, window.n1 - 1};

    const auto r = slot_factors(shape);
    auto phi = [&](int wm, int wn, int slot) {
        return face_scale(shape, twist, wm, wn) * shape.alpha * r[slot];
    };

    // Collapsed white faces touching any black face of the window.
    const double side_min =
        std::min({std::abs(shape.alpha), std::abs(shape.beta), std::abs(shape.gamma)});
    const double k_unit = std::abs(shape.alpha / shape.beta) * side_min;
    const double typical = std::abs(shape.alpha);
    std::vector<std::pair<int, int>> collapsed;
    auto collapsed_white = [&](int m, int n) {
        const double c = std::abs(std::cos(white_phase(shape, twist, m, n)));
        return c * k_unit < options.degeneracy_eps * typical;
    };
    for (int m = window.m0 + 1; m <= window.m1 + 1; ++m) {
        for (int n = window.n0; n <= window.n1; ++n) {
            if (collapsed_white(m, n)) collapsed.emplace_back(m, n);
        }
    }
    if (!collapsed.empty() && options.strict) {
        throw DegeneracyError("T-graph has collapsed white faces for this twist", collapsed);
    }

    // psi sweep: first along the row n = 0 (or the row closest to it), then columns.
    const std::size_t nv = window.size();
    vertices_.resize(nv);
    const int mlo = std::min(window.m0, 0), mhi = std::max(window.m1, 0);
    const int nref = std::clamp(0, window.n0, window.n1);
    std::vector<cplx> row(static_cast<std::size_t>(mhi - mlo + 1));
    // psi(F(0, nref)) from psi(F(0,0)) = 0
    cplx base = 0.0;
    if (nref > 0) {
        for (int n = 0; n < nref; ++n) base -= phi(1, n, 1);
    } else if (nref < 0) {
        for (int n = 0; n > nref; --n) base += phi(1, n - 1, 1);
    }
    row[-mlo] = base;
    for (int m = 0; m < mhi; ++m) row[m + 1 - mlo] = row[m - mlo] + phi(m + 1, nref, 2);
    for (int m = 0; m > mlo; --m) row[m - 1 - mlo] = row[m - mlo] - phi(m, nref, 2);

    for (int m = window.m0; m <= window.m1; ++m) {
        std::vector<cplx> col(static_cast<std::size_t>(window.height()));
        col[nref - window.n0] = row[m - mlo];
        for (int n = nref; n < window.n1; ++n) {
            col[n + 1 - window.n0] = col[n - window.n0] - phi(m + 1, n, 1);
        }
        for (int n = nref; n > window.n0; --n) {
            col[n - 1 - window.n0] = col[n - window.n0] + phi(m + 1, n - 1, 1);
        }
        for (int n = window.n0; n <= window.n1; ++n) {
            Vertex& v = vertices_[window.index(m, n)];
            v.coord = {m, n};
            v.pos = col[n - window.n0];
        }
    }

    std::vector<char> bad_white;
    const Window& fw = face_window_;
    const Window white_adj{window.m0 + 1, window.m1 + 1, window.n0, window.n1};
    bad_white.assign(white_adj.size(), 0);
    for (auto [m, n] : collapsed) {
        if (const int i = white_adj.index(m, n); i >= 0) bad_white[static_cast<std::size_t>(i)] = 1;
    }

    double total_len = 0.0;
    segments_.reserve(fw.size());
    faces_.reserve(fw.size());
    for (int m = fw.m0; m <= fw.m1; ++m) {
        for (int n = fw.n0; n <= fw.n1; ++n) {
            Segment s;
            s.black = HexVertex::black(m, n);
            s.corner = {window.index(m, n), window.index(m - 1, n + 1), window.index(m, n + 1)};
            const bool degenerate = bad_white[white_adj.index(m, n)] ||
                                    bad_white[white_adj.index(m + 1, n)] ||
                                    bad_white[white_adj.index(m, n + 1)];
            // Corner offsets relative to F(m,n), from the local flows.
            std::array<cplx, 3> local{};
            local[2] = -phi(m + 1, n, 1);
            local[1] = local[2] - phi(m, n + 1, 2);
            std::array<double, 3> opp{};
            for (int i = 0; i < 3; ++i) opp[i] = std::abs(local[(i + 1) % 3] - local[(i + 2) % 3]);
            const int longest = static_cast<int>(std::max_element(opp.begin(), opp.end()) - opp.begin());
            total_len += opp[longest];
            if (!degenerate) {
                s.interior = longest;
                const int seg_idx = static_cast<int>(segments_.size());
                Vertex& v = vertices_[s.corner[longest]];
                v.segment = seg_idx;
                const auto ends = s.endpoints();
                for (int k = 0; k < 2; ++k) {
                    v.out[k] = ends[k];
                    v.step[k] = local[(longest + 1 + k) % 3] - local[longest];
                    v.rate[k] = 1.0 / std::abs(v.step[k]);
                }
            } else {
                degenerate_faces_.push_back(s.corner[0]);
            }
            segments_.push_back(s);

            Face f;
            f.white = HexVertex::white(m, n);
            f.corner = {window.index(m - 1, n), window.index(m, n), window.index(m - 1, n + 1)};
            faces_.push_back(f);
        }
    }
    mean_segment_length_ = segments_.empty() ? 0.0 : total_len / segments_.size();
}

cplx TGraph::position(DualVertex v) const {
    const int idx = window_.index(v);
    if (idx < 0) throw WindowError("dual vertex outside the T-graph window");
    return vertices_[idx].pos;
}

int TGraph::segment_index(HexVertex black) const {
    if (black.color != Color::black) return -1;
    return face_window_.index(black.m, black.n);
}

int TGraph::face_index(HexVertex white) const {
    if (white.color != Color::white) return -1;
    return face_window_.index(white.m, white.n);
}

std::size_t TGraph::num_edges() const {
    std::size_t e = 0;
    for (const auto& v : vertices_) e += v.has_out() ? 2 : 0;
    return e;
}

TGraph build_tgraph(const TriangleShape& shape, const Twist& twist, const Window& window,
                    const BuildOptions& options) {
    return TGraph(shape, twist, window, options);
}

NondegeneracyReport check_nondegenerate(const TGraph& t, double eps) {
    NondegeneracyReport rep;
    const double mean = t.mean_segment_length();
    rep.min_face_scale = INFINITY;
    for (const auto& f : t.faces()) {
        double shortest = INFINITY;
        for (int i = 0; i < 3; ++i) {
            shortest = std::min(shortest, std::abs(t.position(f.corner[i]) - t.position(f.corner[(i + 1) % 3])));
        }
        const double scale = shortest / mean;
        rep.min_face_scale = std::min(rep.min_face_scale, scale);
        if (!(scale >= eps)) rep.collapsed_faces.push_back(f.white);
    }

    rep.min_segment = INFINITY;
    rep.max_segment = 0.0;
    const Window& w = t.window();
    std::vector<int> interior_count(t.num_vertices(), 0);
    for (const auto& s : t.segments()) {
        const cplx p0 = t.position(s.corner[0]), p1 = t.position(s.corner[1]), p2 = t.position(s.corner[2]);
        std::array<double, 3> opp{std::abs(p1 - p2), std::abs(p2 - p0), std::abs(p0 - p1)};
        const int longest = static_cast<int>(std::max_element(opp.begin(), opp.end()) - opp.begin());
        const double len = opp[longest];
        rep.min_segment = std::min(rep.min_segment, len);
        rep.max_segment = std::max(rep.max_segment, len);
        if (len > 0) rep.max_collinearity = std::max(rep.max_collinearity, std::abs(cross(p1 - p0, p2 - p0)) / (len * len));
        // Geometric interior test: strictly between the other two corners.
        const cplx v = t.position(s.corner[longest]);
        const cplx a = t.position(s.corner[(longest + 1) % 3]);
        const cplx b = t.position(s.corner[(longest + 2) % 3]);
        if (dot(a - v, b - v) < 0 && std::abs(a - v) > eps * mean && std::abs(b - v) > eps * mean) {
            ++interior_count[s.corner[longest]];
        }
    }
    for (int m = w.m0; m <= w.m1; ++m) {
        for (int n = w.n0; n <= w.n1; ++n) {
            // Black faces with F(m,n) as a corner: b(m,n), b(m+1,n-1), b(m,n-1).
            const Window& fw = t.face_window();
            if (!fw.contains(m, n) || !fw.contains(m + 1, n - 1) || !fw.contains(m, n - 1)) continue;
            if (interior_count[w.index(m, n)] != 1) rep.bad_vertices.push_back({m, n});
        }
    }
    rep.ok = rep.collapsed_faces.empty() && rep.bad_vertices.empty() && t.degenerate_faces().empty();
    return rep;
}

cplx dual_flow(DualVertex x, DualVertex y, const TriangleShape& shape, const Twist& twist) {
    const HexEdge e = crossed_edge(x, y);
    const cplx f = flow(e.white(), e.black, shape, twist);
    return dual_of_edge(e, Orientation::white_to_black).from == x ? f : -f;
}

GeometryReport check_geometry(const TGraph& t) {
    GeometryReport r;
    const TriangleShape& shape = t.shape();
    const Window& w = t.window();
    const Window& fw = t.face_window();

    for (int m = fw.m0; m <= fw.m1; ++m) {
        for (int n = fw.n0; n <= fw.n1; ++n) {
            for (const HexVertex v : {HexVertex::black(m, n), HexVertex::white(m, n)}) {
                cplx sum = 0.0;
                for (const DualEdge& e : face_boundary(v)) sum += dual_flow(e.from, e.to, shape, t.twist());
                r.max_circulation = std::max(r.max_circulation, std::abs(sum));
            }
        }
    }
    for (int i = 0; i < static_cast<int>(w.size()); ++i) {
        const DualVertex x = w.at(i);
        for (const DualVertex& y : dual_neighbors(x)) {
            if (!w.contains(y)) continue;
            const cplx d = t.position(y) - t.position(x) - dual_flow(x, y, shape, t.twist());
            r.max_primitive_error = std::max(r.max_primitive_error, std::abs(d));
        }
        r.linear_gap = std::max(r.linear_gap, std::abs(t.position(i) - linear_approx(shape, x.m, x.n)));
    }

    // White faces: corners are the images of B, C, A.
    const std::array<double, 3> target{kPi * shape.pb, kPi * shape.pc, kPi * shape.pa};
    for (const auto& f : t.faces()) {
        std::array<cplx, 3> p{t.position(f.corner[0]), t.position(f.corner[1]), t.position(f.corner[2])};
        if (cross(p[1] - p[0], p[2] - p[0]) <= 0) ++r.negatively_oriented;
        for (int k = 0; k < 3; ++k) {
            const cplx u = p[(k + 1) % 3] - p[k], v = p[(k + 2) % 3] - p[k];
            const double angle = std::atan2(std::abs(cross(u, v)), dot(u, v));
            r.max_angle_error = std::max(r.max_angle_error, std::abs(angle - target[k]));
        }
    }

    std::vector<int> interior(t.num_vertices(), 0), endpoint(t.num_vertices(), 0);
    for (const auto& s : t.segments()) {
        const cplx p0 = t.position(s.corner[0]), p1 = t.position(s.corner[1]), p2 = t.position(s.corner[2]);
        const double len = std::max({std::abs(p1 - p2), std::abs(p2 - p0), std::abs(p0 - p1)});
        if (len > 0) r.max_collinearity = std::max(r.max_collinearity, std::abs(cross(p1 - p0, p2 - p0)) / (len * len));
        for (int k = 0; k < 3; ++k) {
            const cplx v = t.position(s.corner[k]);
            const cplx a = t.position(s.corner[(k + 1) % 3]) - v, b = t.position(s.corner[(k + 2) % 3]) - v;
            ++(dot(a, b) < 0 ? interior : endpoint)[s.corner[k]];
        }
    }
    for (int m = w.m0; m <= w.m1; ++m) {
        for (int n = w.n0; n <= w.n1; ++n) {
            if (!fw.contains(m, n) || !fw.contains(m + 1, n - 1) || !fw.contains(m, n - 1)) continue;
            ++r.vertices_checked;
            const int i = w.index(m, n);
            if (interior[i] != 1 || endpoint[i] != 2) ++r.bad_incidence;
        }
    }
    return r;
}

HexEmbedding embed_hex(const TGraph& t) {
    HexEmbedding e;
    e.white.reserve(t.faces().size());
    e.black.reserve(t.segments().size());
    for (const auto& f : t.faces()) {
        const cplx c = (t.position(f.corner[0]) + t.position(f.corner[1]) + t.position(f.corner[2])) / 3.0;
        e.white.emplace_back(f.white, c);
    }
    for (const auto& s : t.segments()) {
        if (s.interior < 0) {
            throw DegeneracyError("embed_hex: degenerate segment", {{s.black.m, s.black.n}});
        }
        e.black.emplace_back(s.black, t.position(s.interior_vertex()));
    }
    return e;
}

}  // namespace tdimer
