#pragma once

// Verification suites: each runs one experiment end to end and returns its
// measurements together with a pass flag against fixed tolerances. Used by
// `tdimer verify` and by the acceptance runner.

#include <cstdint>
#include <string>
#include <vector>

#include "io.hpp"

namespace tdimer::suites {

using io::json;

struct Result {
    std::string name;
    bool pass = false;
    json details = json::object();
};

/// Circulation, collinearity, white-face angles, segment incidence on a
/// size x size window; sup |psi - l| must grow < 5% when the window doubles.
Result geometry(const TriangleShape& shape, const Twist& twist, int size = 100);

/// Rate-weighted drift below 1e-12 at every vertex with out-edges.
Result martingale(const TriangleShape& shape, const Twist& twist, int size = 100);

/// Divergence of the reference flow +1 at whites and -1 at blacks within 1e-10.
Result reference_flow(const TriangleShape& shape, const Twist& twist, int size = 100);

/// h(w) - h(v) against tree winding / 2 pi on a loop domain spanning `size`
/// lattice steps, for `forests` sampled trees and `pairs` random pairs each.
Result height_winding(const TriangleShape& shape, const Twist& twist, int size = 50, std::size_t forests = 50,
                      std::size_t pairs = 100, std::uint64_t seed = 7);

/// Exact pushforward of the wired tree measure on tiny domains, compared with
/// the uniform measure on matchings, plus Wilson sampling. `law_pass` in the
/// details records whether Wilson matches the enumerated pushforward.
Result pushforward(const TriangleShape& shape, std::size_t domains = 4, std::size_t max_inside = 12,
                   std::size_t samples = 100000, std::uint64_t seed = 11);

struct CrossingParams {
    std::vector<double> deltas{0.1, 0.05};
    std::size_t translates = 10;
    std::size_t trials = 2000;
    std::size_t max_starts = 4;
    double threshold = 0.01;
    std::uint64_t seed = 5;
};

/// Worst per-start crossing estimate over translates, orientations and
/// directions. Details carry `threshold_pass` and `ci_pass` separately.
Result crossing(const TriangleShape& shape, const Twist& twist, const CrossingParams& p = {});

/// p(R) log R pairwise within a factor 2 and p(R) non-increasing within its CI.
Result recurrence(const TriangleShape& shape, const Twist& twist, std::vector<double> radii = {16, 64, 256},
                  std::size_t trials = 10000, std::uint64_t seed = 3);

/// Residual below 1e-8 and the fitted log coefficient within 10% of the prediction.
Result green(const TriangleShape& shape, const Twist& twist, double radius = 60.0, double direction = 0.3);

/// Square and L-shaped domains at delta and delta / 2 (eps = 5 delta).
Result domains(const TriangleShape& shape, const Twist& twist, double delta = 0.02, std::size_t samples = 10,
               std::uint64_t seed = 13);

/// Central-window lozenge frequencies within `tolerance` of the slope.
Result densities(const io::Slope& slope, int size = 100, std::size_t samples = 20, std::uint64_t seed = 17,
                 double tolerance = 0.02);

/// Patch-conditional uniformity; passes when the Bonferroni p-value exceeds 0.01.
Result gibbs(const io::Slope& slope, int size = 100, int patch = 1, std::size_t samples = 20,
             std::uint64_t seed = 19);

/// max |h_ref - h_slope| on size and 2 size windows (same twists); growth < 10%,
/// with an absolute floor of 1e-9 for gaps that are pure rounding.
Result reference_gap(const io::Slope& slope, int size = 50, std::size_t samples = 5, std::uint64_t seed = 23);

/// Names accepted by run().
std::vector<std::string> names();

/// Runs a suite by name with parameters taken from the config (window,
/// trials, samples, delta, params) where they apply.
Result run(const std::string& name, const io::ExperimentConfig& c);

json to_json(const Result& r);

}  // namespace tdimer::suites
