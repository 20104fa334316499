#pragma once

// Spanning forests of the T-graph random walk: wired domains, Wilson's
// algorithm, brute-force enumeration, and whole-window forests.

#include <cstdint>
#include <span>
#include <vector>

#include "tdimer/rng.hpp"
#include "tdimer/tgraph.hpp"

namespace tdimer {

/// Finite set of free T-graph vertices; every other vertex is glued into a
/// single root.
struct WiredDomain {
    static constexpr int root = -1;

    /// T-graph index of each local vertex.
    std::vector<int> vertices;
    /// Local index of each out-neighbour, or `root`.
    std::vector<std::array<int, 2>> target;
    /// T-graph index of each out-neighbour.
    std::vector<std::array<int, 2>> graph_target;
    std::vector<std::array<double, 2>> rate;

    std::size_t size() const { return vertices.size(); }
};

/// Builds the wired domain on the given free vertices (each must have out-edges).
WiredDomain make_wired_domain(const TGraph& t, std::span<const int> free_vertices);

/// Per local vertex, which of its two out-edges is used (0 or 1).
struct Arborescence {
    std::vector<std::uint8_t> choice;

    friend bool operator==(const Arborescence&, const Arborescence&) = default;
};

/// Sample from the measure proportional to the product of chosen rates.
/// Throws ConnectivityError if some vertex cannot reach the root.
Arborescence wilson_wired(const WiredDomain& d, std::uint64_t seed);
Arborescence wilson_wired(const WiredDomain& d, Rng& rng);

struct WeightedArborescence {
    Arborescence tree;
    double probability = 0.0;
};

/// Every arborescence toward the root with its normalised weight. Domain size
/// is capped at 20 vertices.
std::vector<WeightedArborescence> enumerate_arborescences(const WiredDomain& d);

/// True when following chosen edges from every vertex reaches the root.
bool is_arborescence(const WiredDomain& d, const Arborescence& a);

/// Forest on a whole T-graph window: parent of every vertex, or -1 for roots.
struct SpanningForest {
    std::vector<int> parent;

    bool is_root(int v) const { return parent[v] < 0; }
};

/// Writes the arborescence's edges into `forest` (sized to the T-graph).
void apply_arborescence(const WiredDomain& d, const Arborescence& a, SpanningForest& forest);

/// Fixed forest edges on a simple directed path: p[i] -> p[i+1]. The last
/// vertex keeps whatever parent it already has.
void apply_path(const TGraph& t, std::span<const int> path, SpanningForest& forest);

/// Wired spanning forest of the window containing the directed path `path`.
/// Vertices off the path are sampled by Wilson's algorithm with the path and
/// the window boundary (vertices without out-edges) acting as roots. The last
/// path vertex must be a boundary vertex.
SpanningForest extend_path_to_tree(const TGraph& t, std::span<const int> path, std::uint64_t seed);

/// Wired spanning forest of the entire window (no fixed path).
SpanningForest wired_window_forest(const TGraph& t, std::uint64_t seed);

/// True when parent pointers contain no directed cycle and every non-root
/// vertex points along one of its T-graph out-edges.
bool is_valid_forest(const TGraph& t, const SpanningForest& f);

}  // namespace tdimer
