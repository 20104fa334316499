#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "tdimer/error.hpp"
#include "tdimer/hex_lattice.hpp"

using namespace tdimer;

namespace {

double signed_area(cplx a, cplx b, cplx c) {
    const cplx u = b - a, v = c - a;
    return 0.5 * (u.real() * v.imag() - u.imag() * v.real());
}

}  // namespace

TEST(HexLattice, NeighboursFollowSlotTable) {
    const auto nb = hex_neighbors(HexVertex::black(3, -2));
    EXPECT_EQ(nb[0], HexVertex::white(3, -2));
    EXPECT_EQ(nb[1], HexVertex::white(4, -2));
    EXPECT_EQ(nb[2], HexVertex::white(3, -1));
    for (int s = 0; s < 3; ++s) {
        const HexEdge e{HexVertex::black(3, -2), s};
        EXPECT_EQ(e.white(), nb[s]);
        EXPECT_EQ(static_cast<int>(e.edge_class()), s);
    }
}

TEST(HexLattice, AdjacencyIsSymmetricAndMatchesEdgeBetween) {
    for (int m = -3; m <= 3; ++m) {
        for (int n = -3; n <= 3; ++n) {
            const HexVertex w = HexVertex::white(m, n);
            for (const HexVertex b : hex_neighbors(w)) {
                EXPECT_TRUE(adjacent(w, b));
                EXPECT_TRUE(adjacent(b, w));
                const auto back = hex_neighbors(b);
                EXPECT_NE(std::find(back.begin(), back.end(), w), back.end());
                const HexEdge e = edge_between(w, b);
                EXPECT_EQ(e.black, b);
                EXPECT_EQ(e.white(), w);
            }
            EXPECT_FALSE(adjacent(w, HexVertex::black(m + 1, n + 1)));
            EXPECT_THROW(edge_between(w, HexVertex::black(m + 2, n)), InvalidArgument);
        }
    }
}

TEST(HexLattice, RegularEmbeddingHasUnitEdges) {
    for (int m = -4; m <= 4; ++m) {
        for (int n = -4; n <= 4; ++n) {
            const HexVertex b = HexVertex::black(m, n);
            for (const HexVertex w : hex_neighbors(b)) {
                EXPECT_NEAR(std::abs(regular_position(w) - regular_position(b)), 1.0, 1e-12);
            }
        }
    }
}

TEST(HexLattice, FaceCornersSurroundTheVertex) {
    // In the regular embedding a hex vertex is the centroid of the three hexagon
    // centres around it.
    for (const Color c : {Color::white, Color::black}) {
        for (int m = -3; m <= 3; ++m) {
            for (int n = -3; n <= 3; ++n) {
                const HexVertex v{m, n, c};
                const auto f = face_corners(v);
                const cplx centroid =
                    (regular_position(f[0]) + regular_position(f[1]) + regular_position(f[2])) / 3.0;
                EXPECT_NEAR(std::abs(centroid - regular_position(v)), 0.0, 1e-12);
                EXPECT_NE(signed_area(regular_position(f[0]), regular_position(f[1]), regular_position(f[2])), 0.0);
            }
        }
    }
}

TEST(HexLattice, EveryDualVertexTouchesSixFaces) {
    std::map<DualVertex, int> white_count, black_count;
    for (int m = -6; m <= 6; ++m) {
        for (int n = -6; n <= 6; ++n) {
            for (const DualVertex f : face_corners(HexVertex::white(m, n))) ++white_count[f];
            for (const DualVertex f : face_corners(HexVertex::black(m, n))) ++black_count[f];
        }
    }
    for (int m = -3; m <= 3; ++m) {
        for (int n = -3; n <= 3; ++n) {
            EXPECT_EQ(white_count[(DualVertex{m, n})], 3);
            EXPECT_EQ(black_count[(DualVertex{m, n})], 3);
        }
    }
}

TEST(HexLattice, DualEdgesCrossTheirPrimalEdge) {
    for (int m = -3; m <= 3; ++m) {
        for (int n = -3; n <= 3; ++n) {
            for (int s = 0; s < 3; ++s) {
                const HexEdge e{HexVertex::black(m, n), s};
                const DualEdge d = dual_of_edge(e, Orientation::white_to_black);
                const cplx mid_dual = (regular_position(d.from) + regular_position(d.to)) / 2.0;
                const cplx mid_edge = (regular_position(e.black) + regular_position(e.white())) / 2.0;
                EXPECT_NEAR(std::abs(mid_dual - mid_edge), 0.0, 1e-12);
                EXPECT_EQ(crossed_edge(d.from, d.to), e);
                EXPECT_EQ(crossed_edge(d.to, d.from), e);
                const DualEdge r = dual_of_edge(e, Orientation::black_to_white);
                EXPECT_EQ(r.from, d.to);
                EXPECT_EQ(r.to, d.from);
            }
        }
    }
    EXPECT_THROW(crossed_edge({0, 0}, {1, 1}), InvalidArgument);
    EXPECT_THROW(dual_of_edge({HexVertex::black(0, 0), 3}, Orientation::white_to_black), InvalidArgument);
}

TEST(HexLattice, WhiteOnLeftIsConsistentAcrossEdges) {
    // The white endpoint lies on the same side of every white_to_black crossing.
    std::set<bool> sides;
    for (int m = -2; m <= 2; ++m) {
        for (int n = -2; n <= 2; ++n) {
            for (int s = 0; s < 3; ++s) {
                const HexEdge e{HexVertex::black(m, n), s};
                const DualEdge d = dual_of_edge(e, Orientation::white_to_black);
                sides.insert(signed_area(regular_position(d.from), regular_position(d.to),
                                         regular_position(e.white())) > 0);
            }
        }
    }
    EXPECT_EQ(sides.size(), 1u);
}

TEST(HexLattice, FaceBoundaryCrossesTheFaceEdges) {
    for (const Color c : {Color::white, Color::black}) {
        const HexVertex v{1, -1, c};
        const auto nb = hex_neighbors(v);
        std::set<HexVertex> seen;
        for (const DualEdge& d : face_boundary(v)) {
            const HexVertex other = c == Color::white ? d.crossed.black : d.crossed.white();
            const HexVertex self = c == Color::white ? d.crossed.white() : d.crossed.black;
            EXPECT_EQ(self, v);
            seen.insert(other);
        }
        EXPECT_EQ(seen, std::set<HexVertex>(nb.begin(), nb.end()));
    }
}

TEST(HexLattice, DualNeighboursAreAdjacentAndSymmetric) {
    const DualVertex v{2, -5};
    const auto nb = dual_neighbors(v);
    EXPECT_EQ(std::set<DualVertex>(nb.begin(), nb.end()).size(), 6u);
    for (const DualVertex u : nb) {
        EXPECT_NO_THROW(crossed_edge(v, u));
        EXPECT_NEAR(std::abs(regular_position(u) - regular_position(v)), std::sqrt(3.0), 1e-12);
        const auto back = dual_neighbors(u);
        EXPECT_NE(std::find(back.begin(), back.end(), v), back.end());
    }
}

TEST(HexLattice, WindowIndexRoundTrip) {
    const Window w{-2, 3, 5, 9};
    EXPECT_EQ(w.size(), 30u);
    for (int i = 0; i < static_cast<int>(w.size()); ++i) EXPECT_EQ(w.index(w.at(i)), i);
    EXPECT_EQ(w.index(4, 5), -1);
    EXPECT_TRUE(Window{}.empty());
    EXPECT_EQ(Window::centered(2, 1), (Window{-2, 2, -1, 1}));
}
