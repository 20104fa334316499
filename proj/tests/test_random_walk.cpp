#include <gtest/gtest.h>

#include <Eigen/SparseLU>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

#include "tdimer/error.hpp"
#include "tdimer/random_walk.hpp"
#include "tdimer/rng.hpp"

using namespace tdimer;

namespace {

const TriangleShape kShape = build_triangle(0.5, 0.3, 0.2);
const Twist kTwist = Twist::from_turns(0.61);

// Exact absorption probabilities of the jump chain: h = 1 on `hit`, 0 on
// `kill`, harmonic elsewhere. Vertices without out-edges must be absorbing.
std::vector<double> absorb(const TGraph& t, const std::function<int(int)>& state) {
    const std::size_t n = t.num_vertices();
    std::vector<int> col(n, -1);
    int k = 0;
    for (std::size_t v = 0; v < n; ++v) {
        if (state(static_cast<int>(v)) == 0) col[v] = k++;
    }
    Eigen::SparseMatrix<double> a(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t v = 0; v < n; ++v) {
        if (col[v] < 0) continue;
        const auto& vx = t.vertex(static_cast<int>(v));
        EXPECT_TRUE(vx.has_out());
        trip.emplace_back(col[v], col[v], vx.total_rate());
        for (int s = 0; s < 2; ++s) {
            const int y = vx.out[s];
            const int st = state(y);
            if (st == 0) trip.emplace_back(col[v], col[y], -vx.rate[s]);
            else if (st == 1) rhs[col[v]] += vx.rate[s];
        }
    }
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
    const Eigen::VectorXd x = lu.solve(rhs);
    std::vector<double> h(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        const int st = state(static_cast<int>(v));
        h[v] = st == 1 ? 1.0 : st == 2 ? 0.0 : x[col[v]];
    }
    return h;
}

// |estimate - p| within z binomial standard errors (plus one count).
void expect_consistent(const Proportion& est, double p, double z = 4.5) {
    const double n = static_cast<double>(est.trials);
    EXPECT_LE(std::abs(est.estimate() - p), z * std::sqrt(p * (1 - p) / n) + 1.0 / n)
        << est.successes << "/" << est.trials << " vs " << p;
}

}  // namespace

TEST(Walk, JumpRatesMatchGraph) {
    const TGraph t(kShape, kTwist, Window::centered(6, 6));
    const RatePair r = jump_rates(t, {0, 0});
    const auto& v = t.vertex(t.index(DualVertex{0, 0}));
    EXPECT_EQ(std::set<int>({r.up, r.down}), std::set<int>({v.out[0], v.out[1]}));
    EXPECT_NEAR(r.total(), v.total_rate(), 1e-12);
    EXPECT_NEAR(std::abs(drift(t, r)), 0.0, 1e-12);
    EXPECT_THROW(jump_rates(t, {6, 6}), WindowError);
}

TEST(Walk, SimulateIsDeterministicAndStops) {
    const TGraph t(kShape, kTwist, Window::centered(20, 20));
    const int start = t.index(DualVertex{0, 0});
    auto stop = [](const WalkStep& s) { return s.time >= 3.0; };
    const WalkPath a = simulate(t, start, stop, 42), b = simulate(t, start, stop, 42);
    ASSERT_EQ(a.steps.size(), b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        EXPECT_EQ(a.steps[i].vertex, b.steps[i].vertex);
        EXPECT_EQ(a.steps[i].time, b.steps[i].time);
    }
    EXPECT_GE(a.steps.back().time, 3.0);
    for (std::size_t i = 1; i < a.steps.size(); ++i) {
        const auto& prev = t.vertex(a.steps[i - 1].vertex);
        EXPECT_TRUE(a.steps[i].vertex == prev.out[0] || a.steps[i].vertex == prev.out[1]);
        EXPECT_GT(a.steps[i].time, a.steps[i - 1].time);
    }
    const WalkPath now = simulate(t, start, [](const WalkStep&) { return true; }, 1);
    EXPECT_EQ(now.steps.size(), 1u);
}

TEST(Walk, TruncationCarriesThePath) {
    const TGraph t(kShape, kTwist, Window::centered(3, 3));
    try {
        simulate(t, t.index(DualVertex{0, 0}), [](const WalkStep&) { return false; }, 9);
        FAIL() << "expected truncation";
    } catch (const WalkTruncated& e) {
        EXPECT_FALSE(e.path.steps.empty());
        EXPECT_FALSE(t.vertex(e.path.steps.back().vertex).has_out());
    }
}

TEST(Walk, WilsonScoreInterval) {
    const Proportion p{5, 10};
    EXPECT_DOUBLE_EQ(p.estimate(), 0.5);
    EXPECT_NEAR(p.lower(), 0.23659309, 1e-7);
    EXPECT_NEAR(p.upper(), 0.76340691, 1e-7);
    const Proportion zero{0, 100};
    // Exactly 0: a check "lower > 0" must not pass on zero successes.
    EXPECT_EQ(zero.lower(), 0.0);
    EXPECT_NEAR(zero.upper(), 0.03699, 1e-5);
    for (std::size_t n : {10, 2000, 8000, 100000}) {
        EXPECT_EQ((Proportion{0, n}.lower()), 0.0);
        EXPECT_EQ((Proportion{n, n}.upper()), 1.0);
        EXPECT_GT((Proportion{1, n}.lower()), 0.0);
    }
}

TEST(Walk, MeanDisplacementVanishes) {
    const TGraph t(kShape, kTwist, Window::centered(30, 30));
    const int start = t.index(DualVertex{0, 0});
    const cplx x0 = t.position(start);
    const std::size_t n = 4000;
    cplx sum = 0;
    double sq = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const cplx d = t.position(position_at(t, start, 1.0, derive_seed(3, j))) - x0;
        sum += d;
        sq += std::norm(d);
    }
    const double se = std::sqrt(sq / n / n);
    EXPECT_LT(std::abs(sum / static_cast<double>(n)), 5 * se);
}

TEST(Walk, VarianceProfileIsPositive) {
    const TGraph t(kShape, kTwist, Window::centered(30, 30));
    const auto dirs = direction_grid(4);
    ASSERT_EQ(dirs.size(), 4u);
    EXPECT_NEAR(std::abs(dirs[1] - cplx(0, 1)), 0.0, 1e-15);
    const VarianceProfile v = variance_profile(t, dirs, 3, 300, 5);
    EXPECT_EQ(v.starts.size(), 3u);
    EXPECT_EQ(v.truncated, 0u);
    EXPECT_GT(v.min, 0.0);
    EXPECT_GE(v.max, v.min);
}

TEST(Walk, ArcProbabilities) {
    const std::vector<double> angles{0.1, 1.0, 2.0, 3.0, 6.2};
    EXPECT_DOUBLE_EQ(arc_probability(angles, 0.5, 2.0), 0.4);
    // Wraps through zero: [6.0, 6.0 + 1.2] covers 6.2 and 0.1 and 1.0 (= 7.283 - 2 pi).
    EXPECT_DOUBLE_EQ(arc_probability(angles, 6.0, 1.2), 0.4);
    EXPECT_DOUBLE_EQ(arc_probability(angles, 6.0, 1.3), 0.6);
    EXPECT_DOUBLE_EQ(min_arc_probability(angles, 2 * std::numbers::pi, 8), 1.0);
}

TEST(Walk, ExitAnglesCoverTheCircle) {
    const TGraph t(kShape, kTwist, Window::centered(30, 30));
    const ExitAngleReport r = exit_angle_histogram(t, t.index(DualVertex{0, 0}), 6.0, 2000, 8);
    EXPECT_EQ(r.truncated, 0u);
    EXPECT_EQ(r.angles.size(), 2000u);
    std::size_t total = 0;
    for (std::size_t c : r.histogram) total += c;
    EXPECT_EQ(total, 2000u);
    EXPECT_GT(r.min_arc_probability, 0.2);
}

TEST(Walk, CrossingMatchesExactAbsorption) {
    const CrossingGeometry g{{0.1, -0.3}, 0.25, true, false};
    const TGraph t(kShape, kTwist, crossing_window(kShape, g));
    const cplx lo = g.lower(), hi = g.upper(), dst = g.target_centre() / g.delta;
    const double ball = 0.25 / g.delta;
    auto state = [&](int v) {
        const cplx x = t.position(v);
        if (std::abs(x - dst) <= ball) return 1;
        if (x.real() < lo.real() || x.real() > hi.real() || x.imag() < lo.imag() || x.imag() > hi.imag()) return 2;
        return 0;
    };
    const auto h = absorb(t, state);
    const CrossingEstimate e = crossing_probability(t, g, 4000, 21, 4);
    EXPECT_EQ(e.truncated, 0u);
    ASSERT_EQ(e.starts.size(), 4u);
    // Starts are the vertices within the source ball, found by a plain scan.
    const cplx src = g.source_centre() / g.delta;
    for (int s : e.starts) EXPECT_LE(std::abs(t.position(s) - src), ball);
    for (std::size_t i = 0; i < e.starts.size(); ++i) expect_consistent(e.per_start[i], h[e.starts[i]]);
    for (const Proportion& p : e.per_start) EXPECT_GE(p.estimate(), e.worst_case().estimate());
}

TEST(Walk, CrossingRejectsEmptySourceBall) {
    const CrossingGeometry g{{0, 0}, 0.25, true, false};
    const TGraph t(kShape, kTwist, Window::centered(2, 2));
    EXPECT_THROW(crossing_probability(t, g, 10, 1), InvalidArgument);
}

TEST(Walk, EscapeMatchesExactAbsorption) {
    const double radius = 12.0;
    const TGraph t(kShape, kTwist, window_covering(kShape, {-radius - 4, -radius - 4}, {radius + 4, radius + 4}));
    const int from = t.index(DualVertex{0, 0});
    const int to = t.vertex(from).out[0];
    const cplx p0 = t.position(to);
    auto state = [&](int v) {
        if (v == to) return 2;
        return std::abs(t.position(v) - p0) >= radius ? 1 : 0;
    };
    const auto h = absorb(t, state);
    const auto& tv = t.vertex(to);
    const double exact = (tv.rate[0] * h[tv.out[0]] + tv.rate[1] * h[tv.out[1]]) / tv.total_rate();
    const ReturnEstimate e = return_probability(t, from, to, {4.0, radius}, 6000, 17);
    EXPECT_EQ(e.truncated, 0u);
    expect_consistent(e.escape[1], exact);
    EXPECT_GE(e.escape[0].successes, e.escape[1].successes);
    EXPECT_THROW(return_probability(t, from, from, {4.0}, 10, 1), InvalidArgument);
}

TEST(Green, SolutionMatchesBoundaryAndCoefficient) {
    const double radius = 40.0;
    const TGraph t(kShape, kTwist, window_covering(kShape, {-radius - 6, -radius - 6}, {radius + 6, radius + 6}));
    const int face = t.face_index(HexVertex::white(0, 0));
    const CutGreenSpec spec = make_cut_spec(t, face, 0.3, radius);
    EXPECT_NEAR(spec.direction, 0.3, 0.05);
    const CutGreenSolution s = solve_cut_green(t, spec);
    EXPECT_LT(s.max_residual, 1e-8);
    for (std::size_t i = s.interior; i < s.vertices.size(); ++i) {
        EXPECT_NEAR(s.value[i], cut_argument(spec, t.position(s.vertices[i])) / (2 * std::numbers::pi), 1e-12);
    }
    EXPECT_NEAR(cut_argument(spec, spec.origin + std::polar(3.0, spec.direction + 0.25)), 0.25, 1e-12);
    EXPECT_NEAR(cut_argument(spec, spec.origin + std::polar(3.0, spec.direction - 0.25)),
                2 * std::numbers::pi - 0.25, 1e-12);
    const double fit = fit_log_coefficient(t, s, radius / 3, radius);
    const double want = predicted_log_coefficient(t, face);
    EXPECT_NEAR(want, -closed_form_log_coefficient(t, face), 1e-15);
    EXPECT_LE(std::abs(fit - want), 0.2 * std::abs(want) + 1e-3);
}
