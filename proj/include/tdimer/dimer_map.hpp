#pragma once

// Trees to dimers: the dual forest of a spanning forest, the matching it
// induces, reference flows, heights, and intrinsic winding of tree paths.

#include <optional>
#include <vector>

#include "tdimer/tgraph.hpp"
#include "tdimer/ust.hpp"

namespace tdimer {

/// Real-valued function on hex edges oriented white -> black. Entries may be
/// undefined (NaN) outside the region where the flow is known.
class EdgeFlow {
public:
    EdgeFlow() = default;
    /// All entries undefined; black vertices range over `blacks`.
    explicit EdgeFlow(const Window& blacks);

    const Window& window() const { return blacks_; }
    bool defined(HexEdge e) const;
    /// Value on w -> b, NaN when undefined or outside the window.
    double operator()(HexEdge e) const;
    /// Value on the oriented edge from -> to (antisymmetric).
    double oriented(HexVertex from, HexVertex to) const;
    void set(HexEdge e, double value);

    /// Divergence sum_{b ~ w} value(wb) (white) or sum_{w ~ b} value(bw) (black); NaN if any edge undefined.
    double divergence(HexVertex v) const;

private:
    int slot_index(HexEdge e) const;
    Window blacks_;
    std::vector<double> values_;
};

/// Flow equal to the shape's lozenge density of each edge class.
EdgeFlow slope_flow(const TriangleShape& shape, const Window& blacks);

/// Angle-based reference flow of the T-graph, defined on edges whose white
/// and black faces both lie in the window.
EdgeFlow reference_flow(const TGraph& t);

/// Unit normal to the segment containing v in its interior, pointing to the
/// side that holds the in-edges of v. nullopt when that side cannot be
/// determined inside the window.
std::optional<cplx> incoming_normal(const TGraph& t, int v);

/// The white face sharing the dual edge {x, y} with the black face crossed by it.
HexVertex white_across(DualVertex x, DualVertex y);

/// Non-tree dual edges inside a region of white faces, oriented toward the
/// single dual edge that leaves the region.
struct OrientedDualForest {
    static constexpr int outer = -1;
    static constexpr int unset = -2;

    /// Indexed by T-graph face index: next face along the oriented dual path,
    /// `outer` for the exit face, `unset` for faces outside the region.
    std::vector<int> next;
    /// Segment index crossed by the outgoing edge (or -1).
    std::vector<int> crossed;
    std::vector<char> region;
    int exit_face = -1;
    int exit_segment = -1;
};

/// Dual of the forest's non-tree edges restricted to the faces flagged in
/// `region` (indexed by face index); everything else is one outer node. The
/// restricted dual must be a tree joined to the outer node by exactly one
/// edge, otherwise TopologyError.
OrientedDualForest dual_forest(const TGraph& t, const SpanningForest& f, std::span<const char> region);

/// Indices refer to the T-graph's face window (white face index = black face index).
struct Matching {
    Window faces;
    std::vector<int> white_to_black;
    std::vector<int> black_to_white;

    bool matched_white(HexVertex w) const;
    bool matched_black(HexVertex b) const;
    /// True when the edge belongs to the matching.
    bool contains(HexEdge e) const;
    std::vector<HexEdge> edges() const;
    std::size_t size() const;
};

/// Match each reached face with the segment crossed by its outgoing dual edge.
/// Throws InternalError if a segment receives two faces.
Matching tree_to_matching(const OrientedDualForest& dual, const TGraph& t);

/// Indicator flow of the matching, defined on the edges of matched white vertices.
EdgeFlow matching_flow(const Matching& m, const TGraph& t);

struct HeightFunction {
    Window window;
    DualVertex base;
    std::vector<double> value;  // NaN where unreached

    double at(DualVertex v) const;
    bool defined(DualVertex v) const;
};

/// Primitive of (matching - reference) on the dual lattice, pinned at `base`.
/// Integrates only across edges where both flows are defined. Throws
/// InternalError if a closed triangle of defined edges has non-zero circulation.
HeightFunction height_from_flow(const EdgeFlow& matching, const EdgeFlow& reference,
                                const Window& dual_window, DualVertex base, double tol = 1e-9);

/// Tree path with auxiliary stub points.
struct TreePath {
    std::vector<int> vertices;  // T-graph indices gamma_0 .. gamma_n
    std::size_t apex = 0;       // position of the common ancestor in `vertices`
    cplx before;                // gamma_{-1}
    cplx after;                 // gamma_{n+1}
};

/// Unoriented tree path from v to w in the forest. Throws ConnectivityError
/// when they are in different components, WindowError if a stub cannot be built.
TreePath tree_path(const TGraph& t, const SpanningForest& f, int v, int w);

/// Sum of signed turning angles of the stub-extended polyline, each in (-pi, pi).
double winding(const TGraph& t, const TreePath& p);

/// Intrinsic winding of the tree path v -> w, taken as W(v -> apex) - W(w -> apex)
/// over the two root-ward branches. Unlike the literal polyline sum this is
/// additive and antisymmetric; the two agree modulo 2 pi.
double tree_winding(const TGraph& t, const SpanningForest& f, int v, int w);
/// Same for an explicit polyline.
double polyline_winding(std::span<const cplx> pts);

struct HeightWindingReport {
    double max_discrepancy = 0.0;
    /// Same with the literal polyline winding (differs by integers at apex turns).
    double max_literal_discrepancy = 0.0;
    std::size_t pairs = 0;
};

/// max |h(w) - h(v) - tree_winding(v, w)/2 pi| over the given pairs.
HeightWindingReport verify_height_winding(const TGraph& t, const SpanningForest& f,
                                          const HeightFunction& h,
                                          std::span<const std::pair<int, int>> pairs);

}  // namespace tdimer
