#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "tdimer/dimer_map.hpp"
#include "tdimer/domain_builder.hpp"
#include "tdimer/error.hpp"
#include "tdimer/rng.hpp"

using namespace tdimer;

namespace {

const TriangleShape kShape = build_triangle(0.5, 0.3, 0.2);
const Twist kTwist = Twist::from_turns(0.61);

struct Fixture {
    TGraph t;
    DiscreteDomain d;
    SpanningForest f;
    Matching m;
};

Fixture square_sample(double delta, std::uint64_t seed) {
    TGraph t(kShape, kTwist, domain_window(square_domain(1.0), delta));
    DiscreteDomain d = build_domain(t, delta, square_domain(1.0));
    SpanningForest f = sample_domain_forest(t, d, seed);
    Matching m = domain_matching(t, d, f);
    return {std::move(t), std::move(d), std::move(f), std::move(m)};
}

}  // namespace

TEST(Flows, SlopeFlowDivergence) {
    const Window w = Window::centered(4, 4);
    const EdgeFlow f = slope_flow(kShape, w);
    const auto rho = kShape.lozenge_densities();
    for (int s = 0; s < 3; ++s) EXPECT_DOUBLE_EQ(f(HexEdge{HexVertex::black(0, 0), s}), rho[s]);
    for (int m = -3; m <= 3; ++m) {
        for (int n = -3; n <= 3; ++n) {
            EXPECT_NEAR(f.divergence(HexVertex::white(m, n)), 1.0, 1e-15);
            EXPECT_NEAR(f.divergence(HexVertex::black(m, n)), -1.0, 1e-15);
        }
    }
    EXPECT_TRUE(std::isnan(f.divergence(HexVertex::white(-4, 0))));
    EXPECT_DOUBLE_EQ(f.oriented(HexVertex::black(0, 0), HexVertex::white(0, 0)), -rho[0]);
}

TEST(Flows, ReferenceFlowDivergence) {
    for (double turns : {0.13, 0.61, 0.87}) {
        const TGraph t(kShape, Twist::from_turns(turns), Window::centered(10, 10));
        const EdgeFlow r = reference_flow(t);
        std::size_t checked = 0;
        for (int m = -10; m <= 10; ++m) {
            for (int n = -10; n <= 10; ++n) {
                const double dw = r.divergence(HexVertex::white(m, n));
                const double db = r.divergence(HexVertex::black(m, n));
                if (!std::isnan(dw)) {
                    EXPECT_NEAR(dw, 1.0, 1e-10);
                    ++checked;
                }
                if (!std::isnan(db)) {
                    EXPECT_NEAR(db, -1.0, 1e-10);
                    ++checked;
                }
            }
        }
        EXPECT_GT(checked, 500u);
    }
}

TEST(Flows, ReferenceFlowIsAPositiveDensity) {
    const TGraph t(kShape, kTwist, Window::centered(6, 6));
    const EdgeFlow r = reference_flow(t);
    for (const auto& s : t.segments()) {
        for (int k = 0; k < 3; ++k) {
            const HexEdge e{s.black, k};
            if (!r.defined(e)) continue;
            EXPECT_GT(r(e), 0.0);
            EXPECT_LT(r(e), 1.0);
        }
    }
}

TEST(Matching, DomainMatchingIsPerfect) {
    const Fixture x = square_sample(0.1, 3);
    const auto edges = interior_edges(x.t, x.d, x.m);
    EXPECT_EQ(edges.size(), x.d.num_blacks());
    EXPECT_EQ(x.d.num_whites(), x.d.num_blacks());
    std::set<HexVertex> whites, blacks;
    for (const HexEdge& e : edges) {
        EXPECT_TRUE(whites.insert(e.white()).second);
        EXPECT_TRUE(blacks.insert(e.black).second);
        EXPECT_TRUE(x.m.contains(e));
        EXPECT_TRUE(x.d.white_inside[x.t.face_index(e.white())]);
        EXPECT_TRUE(x.d.black_inside[x.t.segment_index(e.black)]);
    }
}

TEST(Matching, FlowHasUnitDivergenceAtMatchedWhites) {
    const Fixture x = square_sample(0.1, 5);
    const EdgeFlow f = matching_flow(x.m, x.t);
    for (const HexEdge& e : x.m.edges()) {
        EXPECT_DOUBLE_EQ(f(e), 1.0);
        EXPECT_NEAR(f.divergence(e.white()), 1.0, 0.0);
    }
}

TEST(Heights, IncrementsAreSignedFlowDifferences) {
    const Fixture x = square_sample(0.1, 7);
    const EdgeFlow mf = matching_flow(x.m, x.t);
    const EdgeFlow rf = reference_flow(x.t);
    const HeightFunction h = domain_heights(x.t, x.d, x.m);
    EXPECT_NEAR(h.at(x.t.vertex(x.d.marked).coord), 0.0, 0.0);
    // Every defined dual edge changes the height by +-(M - R) of the crossed
    // edge, with one global sign fixed by which side the white vertex is on.
    std::set<int> signs;
    std::size_t edges = 0;
    for (std::size_t v = 0; v < x.t.num_vertices(); ++v) {
        const DualVertex a = x.t.vertex(static_cast<int>(v)).coord;
        if (!h.defined(a)) continue;
        for (const DualVertex b : dual_neighbors(a)) {
            if (!x.t.window().contains(b) || !h.defined(b)) continue;
            const HexEdge e = crossed_edge(a, b);
            if (!mf.defined(e) || !rf.defined(e)) continue;
            const DualEdge wl = dual_of_edge(e, Orientation::white_to_black);
            const double diff = mf(e) - rf(e);
            const double dh = h.at(b) - h.at(a);
            const double s = wl.from == a ? 1.0 : -1.0;
            if (std::abs(diff) < 1e-6) continue;
            const double ratio = dh / (s * diff);
            EXPECT_NEAR(std::abs(ratio), 1.0, 1e-9);
            signs.insert(ratio > 0 ? 1 : -1);
            ++edges;
        }
    }
    EXPECT_GT(edges, 100u);
    EXPECT_EQ(signs.size(), 1u);
}

TEST(Heights, MatchWindingOfTreePaths) {
    const Fixture x = square_sample(0.08, 11);
    const HeightFunction h = domain_heights(x.t, x.d, x.m);
    Rng rng(4);
    std::vector<std::pair<int, int>> pairs;
    const auto& verts = x.d.wired.vertices;
    for (int k = 0; k < 200; ++k) {
        pairs.emplace_back(verts[rng.below(verts.size())], verts[rng.below(verts.size())]);
    }
    const HeightWindingReport r = verify_height_winding(x.t, x.f, h, pairs);
    EXPECT_EQ(r.pairs, pairs.size());
    EXPECT_LT(r.max_discrepancy, 1e-9);
    // The literal polyline sum differs by whole turns only.
    EXPECT_LT(std::abs(r.max_literal_discrepancy - std::round(r.max_literal_discrepancy)), 1e-9);
}

TEST(Winding, PolylineTurning) {
    const std::vector<cplx> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    EXPECT_NEAR(polyline_winding(square), std::numbers::pi, 1e-15);
    const std::vector<cplx> zigzag{{0, 0}, {1, 0}, {1, 1}, {2, 1}};
    EXPECT_NEAR(polyline_winding(zigzag), 0.0, 1e-15);
    const std::vector<cplx> cw{{0, 0}, {1, 0}, {1, -1}};
    EXPECT_NEAR(polyline_winding(cw), -std::numbers::pi / 2, 1e-15);
}

TEST(Winding, TreeWindingIsAntisymmetricAndAdditive) {
    const Fixture x = square_sample(0.1, 13);
    const auto& v = x.d.wired.vertices;
    const int a = v[0], b = v[v.size() / 2], c = v.back();
    const double ab = tree_winding(x.t, x.f, a, b), bc = tree_winding(x.t, x.f, b, c);
    EXPECT_NEAR(ab, -tree_winding(x.t, x.f, b, a), 1e-12);
    EXPECT_NEAR(ab + bc, tree_winding(x.t, x.f, a, c), 1e-9);
    EXPECT_NEAR(tree_winding(x.t, x.f, a, a), 0.0, 1e-15);
}

TEST(Dual, WhiteAcrossIsTheCrossedWhite) {
    for (const DualVertex y : dual_neighbors({0, 0})) {
        EXPECT_EQ(white_across({0, 0}, y), crossed_edge({0, 0}, y).white());
    }
}

TEST(Dual, ForestNeedsASingleExit) {
    const Fixture x = square_sample(0.1, 3);
    std::vector<char> region(x.t.faces().size(), 0);
    for (std::size_t i = 0; i < region.size(); ++i) region[i] = x.d.white_inside[i];
    region[x.d.removed_white] = 1;
    const OrientedDualForest ok = dual_forest(x.t, x.f, region);
    EXPECT_GE(ok.exit_face, 0);
    // Every face reaches the exit.
    for (std::size_t i = 0; i < region.size(); ++i) {
        if (!region[i]) continue;
        int at = static_cast<int>(i);
        std::size_t guard = 0;
        while (ok.next[at] != OrientedDualForest::outer && guard++ < region.size()) at = ok.next[at];
        EXPECT_EQ(at, ok.exit_face);
    }
    // A region that is the whole window sees the dual of a wired forest with many exits.
    const SpanningForest wf = wired_window_forest(x.t, 1);
    std::vector<char> all(x.t.faces().size(), 1);
    EXPECT_THROW(dual_forest(x.t, wf, all), TopologyError);
}
