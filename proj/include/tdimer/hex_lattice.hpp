#pragma once

// Coordinates on the hexagonal lattice H and its dual triangular lattice.
//
// Every coordinate pair (m, n) carries one white vertex w(m,n) (top) and one
// black vertex b(m,n) (bottom) joined by a vertical edge. Adjacency:
//
//     b(m,n) ~ w(m,n)    slot 0 (vertical)
//     b(m,n) ~ w(m+1,n)  slot 1
//     b(m,n) ~ w(m,n+1)  slot 2
//
// The dual vertex F(m,n) is the hexagon whose right-hand vertical edge is
// w(m,n)b(m,n).

#include <array>
#include <complex>
#include <compare>
#include <cstdint>
#include <string>

namespace tdimer {

using cplx = std::complex<double>;

enum class Color : std::uint8_t { black, white };

struct HexVertex {
    int m = 0;
    int n = 0;
    Color color = Color::black;

    static constexpr HexVertex black(int m, int n) { return {m, n, Color::black}; }
    static constexpr HexVertex white(int m, int n) { return {m, n, Color::white}; }

    friend constexpr auto operator<=>(const HexVertex&, const HexVertex&) = default;
};

/// Lozenge orientation class of a hex edge.
enum class EdgeClass : std::uint8_t { vertical = 0, ne_sw = 1, nw_se = 2 };

std::string to_string(EdgeClass c);

enum class Orientation : std::uint8_t { white_to_black, black_to_white };

/// Unoriented hex edge, stored as (black endpoint, slot).
struct HexEdge {
    HexVertex black;
    int slot = 0;

    HexVertex white() const;
    EdgeClass edge_class() const;

    friend constexpr auto operator<=>(const HexEdge&, const HexEdge&) = default;
};

/// The edge joining w and b; throws InvalidArgument if they are not adjacent.
HexEdge edge_between(HexVertex w, HexVertex b);

bool adjacent(HexVertex a, HexVertex b);

struct DualVertex {
    int m = 0;
    int n = 0;
    friend constexpr auto operator<=>(const DualVertex&, const DualVertex&) = default;
};

/// Oriented dual edge together with the primal edge it crosses. Crossing
/// `crossed` from `from` to `to` leaves the white endpoint on the left exactly
/// when `orientation == white_to_black`.
struct DualEdge {
    DualVertex from;
    DualVertex to;
    HexEdge crossed;
    Orientation orientation = Orientation::white_to_black;
};

/// The three neighbours of v, in slot order.
std::array<HexVertex, 3> hex_neighbors(HexVertex v);

/// Corners of the triangular face of H† containing hex vertex v, anticlockwise.
/// For white faces the order is (B, C, A) in the labelling of the triangle
/// shape; for black faces it is (F(m,n), F(m-1,n+1), F(m,n+1)).
std::array<DualVertex, 3> face_corners(HexVertex v);

/// Boundary of the face containing v, traversed anticlockwise (v on the left).
std::array<DualEdge, 3> face_boundary(HexVertex v);

/// Oriented dual edge crossing e. `white_to_black` gives the crossing with the
/// white vertex on the left.
DualEdge dual_of_edge(HexEdge e, Orientation o);

/// The hex edge crossed by the H† edge {a, b}; throws if they are not adjacent.
HexEdge crossed_edge(DualVertex a, DualVertex b);

/// Six neighbours of a dual vertex in the triangular lattice.
std::array<DualVertex, 6> dual_neighbors(DualVertex v);

/// Positions in the regular (undistorted) embedding, unit edge length.
cplx regular_position(HexVertex v);
cplx regular_position(DualVertex v);

/// Axis-aligned inclusive coordinate rectangle [m0,m1] x [n0,n1].
struct Window {
    int m0 = 0;
    int m1 = -1;
    int n0 = 0;
    int n1 = -1;

    static Window centered(int half_m, int half_n) { return {-half_m, half_m, -half_n, half_n}; }

    bool empty() const { return m1 < m0 || n1 < n0; }
    int width() const { return m1 - m0 + 1; }
    int height() const { return n1 - n0 + 1; }
    std::size_t size() const {
        return empty() ? 0 : static_cast<std::size_t>(width()) * static_cast<std::size_t>(height());
    }
    bool contains(int m, int n) const { return m >= m0 && m <= m1 && n >= n0 && n <= n1; }
    bool contains(DualVertex v) const { return contains(v.m, v.n); }
    /// Row-major index (m outer, n inner); -1 outside.
    int index(int m, int n) const {
        return contains(m, n) ? (m - m0) * height() + (n - n0) : -1;
    }
    int index(DualVertex v) const { return index(v.m, v.n); }
    DualVertex at(int idx) const { return {m0 + idx / height(), n0 + idx % height()}; }

    friend constexpr bool operator==(const Window&, const Window&) = default;
};

}  // namespace tdimer
