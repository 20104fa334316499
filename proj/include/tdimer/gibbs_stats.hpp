#pragma once

// Statistics of the full pipeline (random twist -> T-graph -> wired loop
// domain -> tree -> tiling): lozenge densities, uniformity of small patches
// given their surroundings, and the gap between reference and slope heights.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tdimer/domain_builder.hpp"
#include "tdimer/tgraph.hpp"

namespace tdimer {

/// Uniform twist on the unit circle, redrawn (at most 100 times) while the
/// T-graph on `probe` is degenerate. Throws DegeneracyError if every draw fails.
Twist random_twist(const TriangleShape& shape, std::uint64_t seed, const Window& probe = Window::centered(10, 10));

/// Perfect matching stored as the matched slot of every black vertex.
struct Tiling {
    Window blacks;
    std::vector<std::int8_t> slot;  // -1 where the black is not covered

    bool covered(HexVertex v) const { return matched_edge(v).has_value(); }
    /// The matching edge at v (either colour), if any.
    std::optional<HexEdge> matched_edge(HexVertex v) const;
    std::vector<HexEdge> edges() const;
};

Tiling make_tiling(std::span<const HexEdge> edges);

/// One pipeline sample. The wired domain is the unit square drawn at scale
/// 1 / (margin * size), so it spans margin * size lattice steps; `central`
/// is the size x size block of black vertices in its middle.
struct PipelineSample {
    Twist twist;
    std::uint64_t seed = 0;
    Tiling tiling;
    Window central;
    std::size_t wired_vertices = 0;
};

PipelineSample sample_pipeline(const TriangleShape& shape, int size, std::uint64_t seed, double margin = 3.0);

struct TileDensities {
    std::array<double, 3> rho{};        // vertical, NE-SW, NW-SE
    std::array<double, 3> std_error{};  // across samples
    std::array<std::size_t, 3> counts{};
    std::vector<std::array<double, 3>> per_sample;
    std::vector<double> turns;  // twist of each sample
    Window central;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

/// Lozenge class frequencies among the blacks of the central window. Samples
/// run in parallel and are seeded independently. Requires size >= 50 unless
/// `allow_small` (used by tests).
TileDensities tile_densities(const TriangleShape& shape, int size, std::size_t samples, std::uint64_t seed,
                             double margin = 3.0, bool allow_small = false);

/// Statistics of one boundary state of the patch.
struct GibbsBin {
    std::uint32_t boundary = 0;  // bit i: patch vertex i is matched outside the patch
    std::size_t states = 0;      // compatible interior configurations
    std::vector<std::size_t> counts;
    std::size_t total = 0;
    bool tested = false;  // expected count >= 5 in every cell and states >= 2
    double chi2 = 0.0;
    double p_value = 1.0;
    double max_deviation = 0.0;  // max |count / total - 1 / states|
};

struct GibbsReport {
    std::size_t patch_hexagons = 0;
    std::size_t observations = 0;
    std::vector<GibbsBin> bins;
    std::size_t tested_bins = 0;
    double min_p = 1.0;
    /// min_p times the number of tested bins, capped at 1.
    double bonferroni_p = 1.0;
    bool conclusive() const { return tested_bins > 0; }
};

/// Hexagons of a patch of 1 or 2 adjacent faces anchored at F(m, n).
std::vector<DualVertex> patch_hexagons(DualVertex anchor, int patch_size);
/// The six hex vertices around a dual vertex, sorted.
std::vector<HexVertex> hexagon_vertices(DualVertex f);

/// Bins the given tilings by the patch's boundary state at every anchor and
/// tests uniformity of the interior configuration within each bin.
GibbsReport gibbs_conditional(std::span<const Tiling> tilings, std::span<const DualVertex> anchors, int patch_size);

/// Pipeline samples with anchors spaced by `spacing` over the central window.
GibbsReport gibbs_conditional_check(const TriangleShape& shape, int size, int patch_size, std::size_t samples,
                                    std::uint64_t seed, int spacing = 5, bool allow_small = false);

/// Gap between heights measured against the reference flow and against the
/// constant slope flow, both pinned at the centre. The two heights of a
/// matching differ by the primitive of slope - reference, so the gap field
/// does not depend on the matching.
struct ReferenceGap {
    double max_gap = 0.0;
    std::vector<double> per_sample;
    std::vector<double> turns;
    int size = 0;
    std::uint64_t seed = 0;
};

/// Gap field h_ref - h_slope on a T-graph window.
HeightFunction reference_gap_field(const TGraph& t, DualVertex base);

/// max |h_ref - h_slope| over a centred size x size window, over `samples` random twists.
ReferenceGap height_reference_gap(const TriangleShape& shape, int size, std::size_t samples, std::uint64_t seed);

}  // namespace tdimer
