#include "tdimer/ust.hpp"

#include <deque>
#include <unordered_map>

#include "tdimer/error.hpp"

namespace tdimer {

WiredDomain make_wired_domain(const TGraph& t, std::span<const int> free_vertices) {
    WiredDomain d;
    d.vertices.assign(free_vertices.begin(), free_vertices.end());
    std::unordered_map<int, int> local;
    local.reserve(d.vertices.size() * 2);
    for (std::size_t i = 0; i < d.vertices.size(); ++i) {
        if (!local.emplace(d.vertices[i], static_cast<int>(i)).second) {
            throw InvalidArgument("wired domain: duplicate vertex");
        }
        if (!t.vertex(d.vertices[i]).has_out()) {
            throw InvalidArgument("wired domain: free vertex without out-edges");
        }
    }
    d.target.resize(d.vertices.size());
    d.graph_target.resize(d.vertices.size());
    d.rate.resize(d.vertices.size());
    for (std::size_t i = 0; i < d.vertices.size(); ++i) {
        const auto& v = t.vertex(d.vertices[i]);
        for (int k = 0; k < 2; ++k) {
            auto it = local.find(v.out[k]);
            d.target[i][k] = it == local.end() ? WiredDomain::root : it->second;
            d.graph_target[i][k] = v.out[k];
            d.rate[i][k] = v.rate[k];
        }
    }
    return d;
}

namespace {

void check_reachable(const WiredDomain& d) {
    const std::size_t n = d.size();
    std::vector<std::vector<int>> rev(n);
    std::vector<char> seen(n, 0);
    std::deque<int> queue;
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < 2; ++k) {
            const int t = d.target[i][k];
            if (t == WiredDomain::root) {
                if (!seen[i]) {
                    seen[i] = 1;
                    queue.push_back(static_cast<int>(i));
                }
            } else {
                rev[t].push_back(static_cast<int>(i));
            }
        }
    }
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int p : rev[u]) {
            if (!seen[p]) {
                seen[p] = 1;
                queue.push_back(p);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen[i]) throw ConnectivityError("wired domain: root unreachable from some vertex");
    }
}

}  // namespace

Arborescence wilson_wired(const WiredDomain& d, Rng& rng) {
    check_reachable(d);
    const std::size_t n = d.size();
    Arborescence a;
    a.choice.assign(n, 0);
    std::vector<char> in_tree(n, 0);
    for (std::size_t start = 0; start < n; ++start) {
        // Random walk recording the last exit from each vertex; overwriting
        // erases loops.
        int u = static_cast<int>(start);
        while (u != WiredDomain::root && !in_tree[u]) {
            const auto& r = d.rate[u];
            const int k = rng.uniform() * (r[0] + r[1]) < r[0] ? 0 : 1;
            a.choice[u] = static_cast<std::uint8_t>(k);
            u = d.target[u][k];
        }
        u = static_cast<int>(start);
        while (u != WiredDomain::root && !in_tree[u]) {
            in_tree[u] = 1;
            u = d.target[u][a.choice[u]];
        }
    }
    return a;
}

Arborescence wilson_wired(const WiredDomain& d, std::uint64_t seed) {
    Rng rng(seed);
    return wilson_wired(d, rng);
}

bool is_arborescence(const WiredDomain& d, const Arborescence& a) {
    const std::size_t n = d.size();
    if (a.choice.size() != n) return false;
    // 0 = unknown, 1 = on current walk, 2 = reaches root
    std::vector<std::uint8_t> state(n, 0);
    std::vector<int> stack;
    for (std::size_t s = 0; s < n; ++s) {
        int u = static_cast<int>(s);
        stack.clear();
        while (u != WiredDomain::root && state[u] == 0) {
            state[u] = 1;
            stack.push_back(u);
            if (a.choice[u] > 1) return false;
            u = d.target[u][a.choice[u]];
        }
        if (u != WiredDomain::root && state[u] == 1) return false;
        for (int x : stack) state[x] = 2;
    }
    return true;
}

std::vector<WeightedArborescence> enumerate_arborescences(const WiredDomain& d) {
    const std::size_t n = d.size();
    if (n > 20) throw InvalidArgument("enumerate_arborescences: at most 20 vertices");
    std::vector<WeightedArborescence> out;
    Arborescence a;
    a.choice.assign(n, 0);
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        for (std::size_t i = 0; i < n; ++i) a.choice[i] = (mask >> i) & 1u;
        if (!is_arborescence(d, a)) continue;
        double w = 1.0;
        for (std::size_t i = 0; i < n; ++i) w *= d.rate[i][a.choice[i]];
        out.push_back({a, w});
        total += w;
    }
    for (auto& x : out) x.probability /= total;
    return out;
}

void apply_arborescence(const WiredDomain& d, const Arborescence& a, SpanningForest& forest) {
    for (std::size_t i = 0; i < d.size(); ++i) {
        forest.parent[d.vertices[i]] = d.graph_target[i][a.choice[i]];
    }
}

void apply_path(const TGraph& t, std::span<const int> path, SpanningForest& forest) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const auto& v = t.vertex(path[i]);
        if (v.out[0] != path[i + 1] && v.out[1] != path[i + 1]) {
            throw InvalidArgument("path step is not a T-graph edge");
        }
        forest.parent[path[i]] = path[i + 1];
    }
}

SpanningForest extend_path_to_tree(const TGraph& t, std::span<const int> path, std::uint64_t seed) {
    const std::size_t n = t.num_vertices();
    std::vector<char> on_path(n, 0);
    for (int v : path) {
        if (v < 0 || static_cast<std::size_t>(v) >= n) throw InvalidArgument("path vertex outside window");
        if (on_path[v]) throw InvalidArgument("path is not simple");
        on_path[v] = 1;
    }
    if (!path.empty() && t.vertex(path.back()).has_out()) {
        throw InvalidArgument("path must end on the window boundary");
    }
    std::vector<int> free_vertices;
    for (std::size_t v = 0; v < n; ++v) {
        if (!on_path[v] && t.vertex(static_cast<int>(v)).has_out()) free_vertices.push_back(static_cast<int>(v));
    }
    SpanningForest f;
    f.parent.assign(n, -1);
    apply_path(t, path, f);
    const WiredDomain d = make_wired_domain(t, free_vertices);
    apply_arborescence(d, wilson_wired(d, seed), f);
    return f;
}

SpanningForest wired_window_forest(const TGraph& t, std::uint64_t seed) {
    return extend_path_to_tree(t, {}, seed);
}

bool is_valid_forest(const TGraph& t, const SpanningForest& f) {
    const std::size_t n = t.num_vertices();
    if (f.parent.size() != n) return false;
    for (std::size_t v = 0; v < n; ++v) {
        const int p = f.parent[v];
        if (p < 0) continue;
        const auto& vx = t.vertex(static_cast<int>(v));
        if (vx.out[0] != p && vx.out[1] != p) return false;
    }
    std::vector<std::uint8_t> state(n, 0);
    std::vector<int> stack;
    for (std::size_t s = 0; s < n; ++s) {
        int u = static_cast<int>(s);
        stack.clear();
        while (u >= 0 && state[u] == 0) {
            state[u] = 1;
            stack.push_back(u);
            u = f.parent[u];
        }
        if (u >= 0 && state[u] == 1) return false;
        for (int x : stack) state[x] = 2;
    }
    return true;
}

}  // namespace tdimer
