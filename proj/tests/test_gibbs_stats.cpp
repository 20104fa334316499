#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <set>

#include "tdimer/dimer_map.hpp"
#include "tdimer/error.hpp"
#include "tdimer/gibbs_stats.hpp"
#include "tdimer/parallel.hpp"

using namespace tdimer;

namespace {

const TriangleShape kShape = triangle_for_slope(0.5, 0.3, 0.2);

// The two perfect matchings of the hexagon around f, by brute force over
// triples of its six edges.
std::vector<std::vector<HexEdge>> hexagon_matchings(DualVertex f) {
    std::vector<HexEdge> edges;
    for (const DualVertex y : dual_neighbors(f)) edges.push_back(crossed_edge(f, y));
    std::vector<std::vector<HexEdge>> out;
    for (int mask = 0; mask < 64; ++mask) {
        if (__builtin_popcount(mask) != 3) continue;
        std::set<HexVertex> used;
        std::vector<HexEdge> pick;
        for (int i = 0; i < 6; ++i) {
            if (!(mask >> i & 1)) continue;
            used.insert(edges[i].black);
            used.insert(edges[i].white());
            pick.push_back(edges[i]);
        }
        if (used.size() == 6) out.push_back(pick);
    }
    return out;
}

}  // namespace

TEST(RandomTwist, DeterministicAndUniform) {
    EXPECT_EQ(random_twist(kShape, 7).angle(), random_twist(kShape, 7).angle());
    const int bins = 10, n = 2000;
    std::vector<int> counts(bins, 0);
    for (int i = 0; i < n; ++i) {
        const double u = random_twist(kShape, derive_seed(123, i), Window::centered(2, 2)).turns();
        ++counts[std::min(bins - 1, static_cast<int>(u * bins))];
    }
    double chi2 = 0;
    const double expected = static_cast<double>(n) / bins;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    EXPECT_GT(boost::math::gamma_q((bins - 1) / 2.0, chi2 / 2), 1e-3) << chi2;
}

TEST(Tiling, MatchedEdgesRoundTrip) {
    const auto ms = hexagon_matchings({0, 0});
    ASSERT_EQ(ms.size(), 2u);
    const Tiling t = make_tiling(ms[0]);
    auto got = t.edges();
    auto want = ms[0];
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    EXPECT_EQ(got, want);
    for (const HexEdge& e : ms[0]) {
        EXPECT_EQ(t.matched_edge(e.black), e);
        EXPECT_EQ(t.matched_edge(e.white()), e);
    }
    EXPECT_FALSE(t.covered(HexVertex::black(40, 40)));
    std::vector<HexEdge> clash{ms[0][0], ms[1][0]};
    for (const HexEdge& a : ms[0]) {
        for (const HexEdge& b : ms[1]) {
            if (a.black == b.black) {
                EXPECT_THROW(make_tiling(std::vector<HexEdge>{a, b}), InvalidArgument);
            }
        }
    }
}

TEST(Patches, HexagonVertices) {
    const auto v = hexagon_vertices({2, -1});
    ASSERT_EQ(v.size(), 6u);
    std::set<HexVertex> expect;
    for (const DualVertex y : dual_neighbors({2, -1})) {
        const HexEdge e = crossed_edge({2, -1}, y);
        expect.insert(e.black);
        expect.insert(e.white());
    }
    EXPECT_EQ(std::set<HexVertex>(v.begin(), v.end()), expect);
    EXPECT_EQ(patch_hexagons({0, 0}, 1).size(), 1u);
    const auto two = patch_hexagons({0, 0}, 2);
    ASSERT_EQ(two.size(), 2u);
    const auto nb = dual_neighbors(two[0]);
    EXPECT_NE(std::find(nb.begin(), nb.end(), two[1]), nb.end());
    EXPECT_THROW(patch_hexagons({0, 0}, 3), InvalidArgument);
}

TEST(Gibbs, BalancedHexagonFlipsPass) {
    const auto ms = hexagon_matchings({0, 0});
    std::vector<Tiling> tilings;
    for (int k = 0; k < 100; ++k) tilings.push_back(make_tiling(ms[k % 2]));
    const std::vector<DualVertex> anchors{{0, 0}};
    const GibbsReport r = gibbs_conditional(tilings, anchors, 1);
    EXPECT_EQ(r.observations, 100u);
    ASSERT_TRUE(r.conclusive());
    const auto it = std::find_if(r.bins.begin(), r.bins.end(), [](const GibbsBin& b) { return b.tested; });
    ASSERT_NE(it, r.bins.end());
    EXPECT_EQ(it->boundary, 0u);
    EXPECT_EQ(it->states, 2u);
    EXPECT_EQ(it->counts, (std::vector<std::size_t>{50, 50}));
    EXPECT_NEAR(it->chi2, 0.0, 1e-12);
    EXPECT_NEAR(r.bonferroni_p, 1.0, 1e-12);
}

TEST(Gibbs, SkewedHexagonFlipsFail) {
    const auto ms = hexagon_matchings({0, 0});
    std::vector<Tiling> tilings;
    for (int k = 0; k < 100; ++k) tilings.push_back(make_tiling(ms[k < 80 ? 0 : 1]));
    const std::vector<DualVertex> anchors{{0, 0}};
    const GibbsReport r = gibbs_conditional(tilings, anchors, 1);
    ASSERT_TRUE(r.conclusive());
    // chi2 = 36 on one degree of freedom.
    EXPECT_NEAR(r.bins[0].chi2, 36.0, 1e-9);
    EXPECT_NEAR(r.min_p, boost::math::gamma_q(0.5, 18.0), 1e-15);
    EXPECT_LT(r.bonferroni_p, 1e-8);
}

TEST(Pipeline, CentralWindowIsCovered) {
    const PipelineSample s = sample_pipeline(kShape, 12, 4);
    EXPECT_EQ(s.central.width(), 12);
    EXPECT_EQ(s.central.height(), 12);
    EXPECT_GT(s.wired_vertices, 0u);
    for (int m = s.central.m0; m <= s.central.m1; ++m) {
        for (int n = s.central.n0; n <= s.central.n1; ++n) {
            EXPECT_TRUE(s.tiling.covered(HexVertex::black(m, n)));
            EXPECT_TRUE(s.tiling.covered(HexVertex::white(m, n)));
        }
    }
}

TEST(Pipeline, DensitiesAreIndependentOfThreadCount) {
    set_default_threads(1);
    const TileDensities a = tile_densities(kShape, 10, 3, 9, 3.0, true);
    set_default_threads(3);
    const TileDensities b = tile_densities(kShape, 10, 3, 9, 3.0, true);
    set_default_threads(0);
    EXPECT_EQ(a.per_sample, b.per_sample);
    EXPECT_EQ(a.turns, b.turns);
    EXPECT_EQ(a.counts[0] + a.counts[1] + a.counts[2], 3u * 100u);
    EXPECT_NEAR(a.rho[0] + a.rho[1] + a.rho[2], 1.0, 1e-12);
    EXPECT_THROW(tile_densities(kShape, 10, 3, 9), InvalidArgument);
}

TEST(ReferenceGap, VanishesAtTheSymmetricSlope) {
    const TriangleShape eq = triangle_for_slope(1.0 / 3, 1.0 / 3, 1.0 / 3);
    const ReferenceGap g = height_reference_gap(eq, 20, 3, 5);
    EXPECT_LT(g.max_gap, 1e-9);
    EXPECT_EQ(g.per_sample.size(), 3u);
}

TEST(ReferenceGap, EqualsDifferenceOfTwoHeightsOfAnyMatching) {
    // All-vertical tiling: h_ref - h_slope of this matching must equal the gap field.
    const TGraph t(kShape, Twist::from_turns(0.3137), Window::centered(8, 8));
    const Window fw = t.face_window();
    EdgeFlow vertical(fw);
    for (int m = fw.m0; m <= fw.m1; ++m) {
        for (int n = fw.n0; n <= fw.n1; ++n) {
            for (int s = 0; s < 3; ++s) vertical.set({HexVertex::black(m, n), s}, s == 0 ? 1.0 : 0.0);
        }
    }
    const DualVertex base{0, 0};
    const HeightFunction href = height_from_flow(vertical, reference_flow(t), t.window(), base);
    const HeightFunction hslope = height_from_flow(vertical, slope_flow(kShape, fw), t.window(), base);
    const HeightFunction gap = reference_gap_field(t, base);
    std::size_t checked = 0;
    for (int m = -6; m <= 6; ++m) {
        for (int n = -6; n <= 6; ++n) {
            const DualVertex x{m, n};
            if (!href.defined(x) || !hslope.defined(x)) continue;
            ASSERT_TRUE(gap.defined(x));
            EXPECT_NEAR(gap.at(x), href.at(x) - hslope.at(x), 1e-9);
            ++checked;
        }
    }
    EXPECT_GT(checked, 100u);
}
