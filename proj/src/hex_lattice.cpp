#include "tdimer/hex_lattice.hpp"

#include <cmath>

#include "tdimer/error.hpp"

namespace tdimer {

namespace {

constexpr std::array<std::array<int, 2>, 3> kBlackToWhite = {{{0, 0}, {1, 0}, {0, 1}}};

}  // namespace

std::string to_string(EdgeClass c) {
    switch (c) {
        case EdgeClass::vertical: return "vertical";
        case EdgeClass::ne_sw: return "ne_sw";
        case EdgeClass::nw_se: return "nw_se";
    }
    return "?";
}

HexVertex HexEdge::white() const {
    return HexVertex::white(black.m + kBlackToWhite[slot][0], black.n + kBlackToWhite[slot][1]);
}

EdgeClass HexEdge::edge_class() const {
    // slot 1 joins b(m,n) to w(m+1,n): in the regular embedding this edge runs
    // from the black vertex down-left, i.e. it is a NE-SW edge.
    return static_cast<EdgeClass>(slot);
}

HexEdge edge_between(HexVertex w, HexVertex b) {
    if (w.color != Color::white) std::swap(w, b);
    if (w.color != Color::white || b.color != Color::black) {
        throw InvalidArgument("edge_between: need one white and one black vertex");
    }
    for (int s = 0; s < 3; ++s) {
        if (w.m == b.m + kBlackToWhite[s][0] && w.n == b.n + kBlackToWhite[s][1]) return {b, s};
    }
    throw InvalidArgument("edge_between: vertices are not adjacent");
}

bool adjacent(HexVertex a, HexVertex b) {
    if (a.color == b.color) return false;
    const HexVertex& blk = a.color == Color::black ? a : b;
    const HexVertex& wht = a.color == Color::white ? a : b;
    for (auto [dm, dn] : kBlackToWhite) {
        if (wht.m == blk.m + dm && wht.n == blk.n + dn) return true;
    }
    return false;
}

std::array<HexVertex, 3> hex_neighbors(HexVertex v) {
    std::array<HexVertex, 3> out;
    const int sign = v.color == Color::black ? 1 : -1;
    const Color other = v.color == Color::black ? Color::white : Color::black;
    for (int s = 0; s < 3; ++s) {
        out[s] = {v.m + sign * kBlackToWhite[s][0], v.n + sign * kBlackToWhite[s][1], other};
    }
    return out;
}

std::array<DualVertex, 3> face_corners(HexVertex v) {
    const int m = v.m, n = v.n;
    if (v.color == Color::white) return {{{m - 1, n}, {m, n}, {m - 1, n + 1}}};
    return {{{m, n}, {m - 1, n + 1}, {m, n + 1}}};
}

DualEdge dual_of_edge(HexEdge e, Orientation o) {
    const int m = e.black.m, n = e.black.n;
    DualVertex from, to;
    switch (e.slot) {
        case 0: from = {m, n}; to = {m - 1, n + 1}; break;
        case 1: from = {m, n + 1}; to = {m, n}; break;
        case 2: from = {m - 1, n + 1}; to = {m, n + 1}; break;
        default: throw InvalidArgument("dual_of_edge: bad slot");
    }
    if (o == Orientation::black_to_white) std::swap(from, to);
    return {from, to, e, o};
}

std::array<DualEdge, 3> face_boundary(HexVertex v) {
    const auto c = face_corners(v);
    std::array<DualEdge, 3> out;
    for (int i = 0; i < 3; ++i) {
        const HexEdge e = crossed_edge(c[i], c[(i + 1) % 3]);
        const Orientation o =
            v.color == Color::white ? Orientation::white_to_black : Orientation::black_to_white;
        out[i] = {c[i], c[(i + 1) % 3], e, o};
    }
    return out;
}

HexEdge crossed_edge(DualVertex a, DualVertex b) {
    if (a > b) std::swap(a, b);
    const int dm = b.m - a.m, dn = b.n - a.n;
    // Ordered pairs (a < b lexicographically) and the edge they straddle.
    if (dm == 0 && dn == 1) return {HexVertex::black(a.m, a.n), 1};
    if (dm == 1 && dn == -1) return {HexVertex::black(b.m, b.n), 0};
    if (dm == 1 && dn == 0) return {HexVertex::black(b.m, b.n - 1), 2};
    throw InvalidArgument("crossed_edge: dual vertices are not adjacent");
}

std::array<DualVertex, 6> dual_neighbors(DualVertex v) {
    return {{{v.m + 1, v.n}, {v.m - 1, v.n}, {v.m, v.n + 1}, {v.m, v.n - 1}, {v.m + 1, v.n - 1}, {v.m - 1, v.n + 1}}};
}

namespace {

const double kS3 = std::sqrt(3.0);

cplx lattice_point(int m, int n) {
    return cplx(-kS3 / 2, -1.5) * static_cast<double>(m) + cplx(kS3 / 2, -1.5) * static_cast<double>(n);
}

}  // namespace

cplx regular_position(HexVertex v) {
    return lattice_point(v.m, v.n) + cplx(0, v.color == Color::white ? 0.5 : -0.5);
}

cplx regular_position(DualVertex v) { return lattice_point(v.m, v.n) - cplx(kS3 / 2, 0); }

}  // namespace tdimer
