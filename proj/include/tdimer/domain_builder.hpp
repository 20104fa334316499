#pragma once

// Discrete Temperleyan domains built from a continuous polygon: a directed
// simple loop of the scaled T-graph following the image of the boundary, an
// escape path to the window boundary, the erased edge, the hex domain and
// the wired T-graph domain inside the loop.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tdimer/dimer_map.hpp"
#include "tdimer/tgraph.hpp"
#include "tdimer/ust.hpp"

namespace tdimer {

/// Simple polygon in continuum lattice coordinates: the point (x, y) sits at
/// lattice coordinates (m, n) = (x, y) / delta. Positively oriented.
struct ContinuousDomain {
    std::vector<cplx> boundary;
    cplx marked;
};

/// Validates orientation, simplicity and that the marked point lies on the boundary.
ContinuousDomain make_domain(std::vector<cplx> boundary, cplx marked);
/// [0, side]^2, marked at the middle of the bottom side.
ContinuousDomain square_domain(double side = 1.0);
/// [0, 1]^2 minus [1/2, 1]^2, marked at the middle of the bottom side.
ContinuousDomain l_shape_domain();

/// Image of the polygon under the affine approximation (scaled units).
std::vector<cplx> image_boundary(const TriangleShape& shape, const ContinuousDomain& u);

/// Lattice window centred on the domain, `factor` times its diameter wide.
Window domain_window(const ContinuousDomain& u, double delta, double factor = 3.0);

/// Directed simple cycle of the T-graph (vertex indices, closing edge
/// back->front implied) inside the eps-corridor of the scaled boundary image,
/// positively oriented. Throws ResolutionError if the corridor pinches.
std::vector<int> build_loop(const TGraph& t, double delta, const ContinuousDomain& u, double eps);

/// Hausdorff distance between the scaled loop polyline and the boundary image.
double loop_hausdorff(const TGraph& t, double delta, std::span<const int> loop, const ContinuousDomain& u);

/// Winding number of the (closed) loop around a point given in T-graph units.
int loop_winding_number(const TGraph& t, std::span<const int> loop, cplx point);

enum class Side : std::uint8_t { outside, loop, inside };

/// Position of every window vertex relative to the cycle, by flooding the dual
/// lattice from the window border. Throws InternalError if the loop is not a
/// simple cycle of the dual lattice.
std::vector<Side> loop_sides(const TGraph& t, std::span<const int> loop);

/// Escape: escape[0] is a loop vertex (the marked face) and the rest is a
/// simple directed path through outside vertices ending on the window boundary.
/// `target` is in scaled units. Throws WindowError when no escape exists.
std::vector<int> build_escape(const TGraph& t, double delta, std::span<const int> loop, cplx target);

struct DiscreteDomain {
    double delta = 1.0;
    /// Loop rotated so that loop[0] is the marked face; loop[0] -> loop[1] is erased.
    std::vector<int> loop;
    std::vector<int> escape;
    /// Fixed tree path: loop[1], ..., loop.back(), loop[0], escape[1], ...
    std::vector<int> path;
    std::array<int, 2> erased_edge{-1, -1};
    int marked = -1;
    std::vector<Side> side;
    /// Per face index: the white vertex lies inside the dual cycle.
    std::vector<char> white_inside;
    /// Per segment index: the black vertex lies inside the dual cycle.
    std::vector<char> black_inside;
    /// Face index of the white vertex removed from the hex domain.
    int removed_white = -1;
    /// Segment containing the marked face; the removed white is matched to it.
    int marked_segment = -1;
    /// Whether the marked face is still a corner of some face of the hex domain.
    bool marked_adjacent = false;
    WiredDomain wired;

    std::size_t num_whites() const;
    std::size_t num_blacks() const;
};

/// Erases the loop edge leaving escape[0], classifies hex vertices and builds
/// the wired domain. Throws InternalError if the classification is inconsistent.
DiscreteDomain assemble(const TGraph& t, double delta, std::vector<int> loop, std::vector<int> escape);

/// Loop, escape and assembly in one step; eps defaults to 5 delta.
DiscreteDomain build_domain(const TGraph& t, double delta, const ContinuousDomain& u, double eps = 0.0);

/// Forest on the window: the fixed path plus the given arborescence of the
/// wired domain. Vertices outside the loop other than the path stay roots.
SpanningForest domain_forest(const TGraph& t, const DiscreteDomain& d, const Arborescence& a);
/// Same with a Wilson sample.
SpanningForest sample_domain_forest(const TGraph& t, const DiscreteDomain& d, std::uint64_t seed);

/// Matching of the domain's whites induced by a domain forest. The removed
/// white is included, matched across the erased edge to `marked_segment`.
Matching domain_matching(const TGraph& t, const DiscreteDomain& d, const SpanningForest& f);

/// Perfect matching restricted to the hex domain (removed white excluded), as edges.
std::vector<HexEdge> interior_edges(const TGraph& t, const DiscreteDomain& d, const Matching& m);

/// Heights of the matching against the reference flow, pinned at the marked face.
HeightFunction domain_heights(const TGraph& t, const DiscreteDomain& d, const Matching& m);

/// Intrinsic winding / 2 pi of the fixed path from the marked face to each
/// loop vertex, in loop order.
std::vector<double> boundary_height_profile(const TGraph& t, const DiscreteDomain& d);

/// Independent geometric classification of hex vertices by point location
/// against the loop polygon; used to cross-check `assemble`.
struct ClassificationReport {
    std::size_t whites_checked = 0;
    std::size_t blacks_checked = 0;
    std::size_t mismatches = 0;
};
ClassificationReport check_classification(const TGraph& t, const DiscreteDomain& d);

struct TinyDomain {
    TGraph graph;
    DiscreteDomain domain;
    double turns = 0.0;
};

/// Unit squares built at coarse scales and a few twists, each with between
/// 1 and max_inside wired vertices and a distinct size.
std::vector<TinyDomain> find_tiny_domains(const TriangleShape& shape, std::size_t count, std::size_t max_inside);

/// All perfect matchings of the domain's hex graph, by exhaustive search.
std::vector<std::vector<HexEdge>> enumerate_domain_matchings(const TGraph& t, const DiscreteDomain& d,
                                                             std::size_t limit = 100000);

}  // namespace tdimer
