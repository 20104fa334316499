#pragma once

// Continuous-time martingale walk on a T-graph and the Monte Carlo suites
// built on it: one-step variance, exit angles, rectangle crossings, escape
// before return, and the conjugate Green function with a cut.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tdimer/error.hpp"
#include "tdimer/tgraph.hpp"

namespace tdimer {

/// Jump structure at a vertex: targets are the endpoints of the segment
/// containing it, with rates 1 / distance.
struct RatePair {
    DualVertex v;
    int up = -1;
    int down = -1;
    double up_rate = 0.0;
    double down_rate = 0.0;

    double total() const { return up_rate + down_rate; }
};

/// Throws WindowError when the containing segment is not in the window.
RatePair jump_rates(const TGraph& t, DualVertex v);

/// up_rate (up - v) + down_rate (down - v).
cplx drift(const TGraph& t, const RatePair& r);

struct WalkStep {
    double time = 0.0;
    int vertex = -1;
};

struct WalkPath {
    std::vector<WalkStep> steps;
    std::uint64_t seed = 0;
};

/// Raised by simulate when the walk reaches a vertex without out-edges; carries the partial path.
class WalkTruncated : public TruncationError {
public:
    explicit WalkTruncated(WalkPath p)
        : TruncationError("walk reached the window boundary", p.steps.size()), path(std::move(p)) {}
    WalkPath path;
};

/// Stop rule evaluated on every visited state, including the start.
using StopRule = std::function<bool(const WalkStep&)>;

/// Exponential holding times, jumps proportional to rates. Throws WalkTruncated
/// at the window boundary and InvalidArgument after max_steps jumps.
WalkPath simulate(const TGraph& t, int start, const StopRule& stop, std::uint64_t seed,
                  std::size_t max_steps = 100'000'000);

/// Position at time `horizon` of a walk started at `start`; the embedded
/// chain is run without storing the path.
int position_at(const TGraph& t, int start, double horizon, std::uint64_t seed);

/// Binomial estimate with a 95% Wilson score interval.
struct Proportion {
    std::size_t successes = 0;
    std::size_t trials = 0;
    double estimate() const;
    double lower() const;
    double upper() const;
};

struct VarianceProfile {
    std::vector<cplx> directions;
    std::vector<int> starts;
    /// variance[i][k]: estimate of var((X_1 - start_i) . direction_k).
    std::vector<std::vector<double>> variance;
    std::size_t truncated = 0;
    double min = 0.0;
    double max = 0.0;
};

/// `starts` vertices are drawn uniformly among those within `radius` of the
/// window centre; each gets `samples` walks run for unit time.
VarianceProfile variance_profile(const TGraph& t, std::span<const cplx> directions, std::size_t starts,
                                 std::size_t samples, std::uint64_t seed, double radius = 5.0);

/// `count` unit vectors at angles 2 pi k / count.
std::vector<cplx> direction_grid(std::size_t count);

struct ExitAngleReport {
    std::vector<double> angles;       // Arg(X_tau - v) in [0, 2 pi), trial order
    std::vector<std::size_t> histogram;
    std::size_t truncated = 0;
    /// min over the grid of P[angle in [theta, theta + pi - eta]].
    double min_arc_probability = 0.0;
};

/// Fraction of angles in the arc [theta, theta + width] (mod 2 pi).
double arc_probability(std::span<const double> angles, double theta, double width);
/// Minimum of arc_probability over theta = 2 pi k / grid.
double min_arc_probability(std::span<const double> angles, double width, std::size_t grid);

/// Exit position angle from the ball of `radius` (T-graph units) around v.
ExitAngleReport exit_angle_histogram(const TGraph& t, int v, double radius, std::size_t trials,
                                     std::uint64_t seed, double eta = 0.1, std::size_t bins = 72);

/// Rectangle [0,3]x[0,1] (or [0,1]x[0,3]) translated by z in the plane of the
/// T-graph scaled by delta, with balls of radius 1/4 at both ends.
struct CrossingGeometry {
    cplx z;
    double delta = 0.1;
    bool horizontal = true;
    bool reverse = false;

    cplx source_centre() const;
    cplx target_centre() const;
    /// Rectangle corners, unscaled (T-graph units).
    cplx lower() const;
    cplx upper() const;
};

/// Lattice window comfortably containing the rectangle.
Window crossing_window(const TriangleShape& shape, const CrossingGeometry& g);

struct CrossingEstimate {
    std::vector<int> starts;
    std::vector<Proportion> per_start;
    std::size_t worst = 0;  // index into starts
    std::size_t truncated = 0;

    const Proportion& worst_case() const { return per_start.at(worst); }
};

/// Per start vertex in the source ball: fraction of walks hitting the target
/// ball before leaving the rectangle. `max_starts` > 0 keeps an evenly spread
/// subset of start vertices. Throws InvalidArgument if the source ball has no vertex.
CrossingEstimate crossing_probability(const TGraph& t, const CrossingGeometry& g, std::size_t trials,
                                      std::uint64_t seed, std::size_t max_starts = 0);

struct ReturnEstimate {
    int start = -1;  // the end of the edge
    std::vector<double> radii;
    std::vector<Proportion> escape;  // reach distance R before revisiting start
    std::size_t truncated = 0;
    /// p(R) log R per radius.
    std::vector<double> scaled() const;
};

/// Walks start at `to`, the end of the edge from -> to.
ReturnEstimate return_probability(const TGraph& t, int from, int to, std::vector<double> radii, std::size_t trials,
                                  std::uint64_t seed);

/// Half-line from a point inside a white face, and the circular truncation radius.
struct CutGreenSpec {
    int face = -1;
    cplx origin;
    double direction = 0.0;  // radians
    double radius = 60.0;
};

/// Picks origin = face centroid and a direction near `direction` whose ray keeps
/// at least 1e-6 away from every vertex within the radius.
CutGreenSpec make_cut_spec(const TGraph& t, int face, double direction, double radius);

struct CutGreenSolution {
    CutGreenSpec spec;
    std::vector<int> vertices;          // T-graph indices, interior ones first
    std::size_t interior = 0;           // vertices[0, interior) were solved for
    std::vector<double> value;          // per entry of `vertices`
    std::vector<char> cut_adjacent;     // per interior vertex: an out-edge crosses the ray
    double max_residual = 0.0;          // harmonicity residual over all interior vertices
};

/// Solves sum_y q_xy (f(y) - f(x)) = sum_{y crossing} q_xy sign at vertices inside the
/// radius, with f = arg_d / 2 pi on the rest. Sign +1 for clockwise crossings.
/// Throws NumericError if the solve fails or the residual exceeds 1e-8.
CutGreenSolution solve_cut_green(const TGraph& t, const CutGreenSpec& spec);

/// arg of (p - origin) measured from the ray direction, in [0, 2 pi).
double cut_argument(const CutGreenSpec& spec, cplx p);

/// Slope c of f - arg_d / 2 pi = c log r / 2 pi + C over vertices with r in [r0, r1].
double fit_log_coefficient(const TGraph& t, const CutGreenSolution& s, double r0, double r1);

/// Im(lambda')/Re(lambda') for the local twist of the face.
double closed_form_log_coefficient(const TGraph& t, int face);
/// Expected value of fit_log_coefficient in this library's orientation: the negated closed form.
double predicted_log_coefficient(const TGraph& t, int face);

}  // namespace tdimer
