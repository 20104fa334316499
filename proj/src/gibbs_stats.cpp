#include "tdimer/gibbs_stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "tdimer/error.hpp"
#include "tdimer/parallel.hpp"
#include "tdimer/rng.hpp"

namespace tdimer {

Twist random_twist(const TriangleShape& shape, std::uint64_t seed, const Window& probe) {
    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
        Rng rng(derive_seed(seed, attempt));
        const Twist tw = Twist::from_turns(rng.uniform());
        try {
            const TGraph t(shape, tw, probe, BuildOptions{.strict = false});
            if (check_nondegenerate(t).ok) return tw;
        } catch (const DegeneracyError&) {
        }
    }
    throw DegeneracyError("random_twist: no non-degenerate twist in 100 draws", {});
}

// ------------------------------------------------------------------ tilings

std::optional<HexEdge> Tiling::matched_edge(HexVertex v) const {
    auto slot_at = [&](int m, int n) -> int {
        const int i = blacks.index(m, n);
        return i < 0 ? -1 : slot[i];
    };
    if (v.color == Color::black) {
        const int s = slot_at(v.m, v.n);
        if (s < 0) return std::nullopt;
        return HexEdge{v, s};
    }
    // w(m,n) is slot 0 of b(m,n), slot 1 of b(m-1,n), slot 2 of b(m,n-1).
    const std::array<HexVertex, 3> cand{HexVertex::black(v.m, v.n), HexVertex::black(v.m - 1, v.n),
                                        HexVertex::black(v.m, v.n - 1)};
    for (int s = 0; s < 3; ++s) {
        if (slot_at(cand[s].m, cand[s].n) == s) return HexEdge{cand[s], s};
    }
    return std::nullopt;
}

std::vector<HexEdge> Tiling::edges() const {
    std::vector<HexEdge> out;
    for (std::size_t i = 0; i < slot.size(); ++i) {
        if (slot[i] < 0) continue;
        const DualVertex c = blacks.at(static_cast<int>(i));
        out.push_back({HexVertex::black(c.m, c.n), slot[i]});
    }
    return out;
}

Tiling make_tiling(std::span<const HexEdge> edges) {
    Tiling t;
    if (edges.empty()) return t;
    t.blacks = {edges[0].black.m, edges[0].black.m, edges[0].black.n, edges[0].black.n};
    for (const HexEdge& e : edges) {
        t.blacks.m0 = std::min(t.blacks.m0, e.black.m);
        t.blacks.m1 = std::max(t.blacks.m1, e.black.m);
        t.blacks.n0 = std::min(t.blacks.n0, e.black.n);
        t.blacks.n1 = std::max(t.blacks.n1, e.black.n);
    }
    t.slot.assign(t.blacks.size(), -1);
    for (const HexEdge& e : edges) {
        auto& s = t.slot[t.blacks.index(e.black.m, e.black.n)];
        if (s >= 0) throw InvalidArgument("make_tiling: black vertex matched twice");
        s = static_cast<std::int8_t>(e.slot);
    }
    return t;
}

// ----------------------------------------------------------------- pipeline

PipelineSample sample_pipeline(const TriangleShape& shape, int size, std::uint64_t seed, double margin) {
    if (size < 1 || !(margin >= 1.0)) throw InvalidArgument("sample_pipeline: need size >= 1 and margin >= 1");
    const int span = static_cast<int>(std::ceil(margin * size));
    const double delta = 1.0 / span;
    const ContinuousDomain u = square_domain(1.0);
    const int off = (span - size) / 2;

    PipelineSample out;
    out.seed = seed;
    out.central = {off, off + size - 1, off, off + size - 1};
    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
        const std::uint64_t s = derive_seed(seed, attempt);
        out.twist = random_twist(shape, s);
        try {
            const TGraph t(shape, out.twist, domain_window(u, delta, 1.2));
            const DiscreteDomain d = build_domain(t, delta, u);
            const SpanningForest f = sample_domain_forest(t, d, derive_seed(s, 1));
            const Matching m = domain_matching(t, d, f);
            out.tiling = make_tiling(interior_edges(t, d, m));
            out.wired_vertices = d.wired.size();
            return out;
        } catch (const DegeneracyError&) {
        }
    }
    throw DegeneracyError("sample_pipeline: every twist gave a degenerate T-graph", {});
}

TileDensities tile_densities(const TriangleShape& shape, int size, std::size_t samples, std::uint64_t seed,
                             double margin, bool allow_small) {
    if (size < 50 && !allow_small) throw InvalidArgument("tile_densities: window must be at least 50");
    if (samples == 0) throw InvalidArgument("tile_densities: need at least one sample");

    std::vector<std::array<std::size_t, 3>> counts(samples);
    std::vector<double> turns(samples);
    Window central;
    parallel_for(samples, [&](std::size_t i) {
        const PipelineSample ps = sample_pipeline(shape, size, derive_seed(seed, i), margin);
        turns[i] = ps.twist.turns();
        std::array<std::size_t, 3> c{};
        for (int m = ps.central.m0; m <= ps.central.m1; ++m) {
            for (int n = ps.central.n0; n <= ps.central.n1; ++n) {
                const auto e = ps.tiling.matched_edge(HexVertex::black(m, n));
                if (!e) throw InternalError("tile_densities: central black vertex not matched");
                ++c[static_cast<int>(e->edge_class())];
            }
        }
        counts[i] = c;
        if (i == 0) central = ps.central;
    });

    TileDensities out;
    out.central = central;
    out.samples = samples;
    out.seed = seed;
    out.turns = std::move(turns);
    for (const auto& c : counts) {
        const double total = static_cast<double>(c[0] + c[1] + c[2]);
        out.per_sample.push_back({c[0] / total, c[1] / total, c[2] / total});
        for (int k = 0; k < 3; ++k) out.counts[k] += c[k];
    }
    const double total = static_cast<double>(out.counts[0] + out.counts[1] + out.counts[2]);
    for (int k = 0; k < 3; ++k) {
        out.rho[k] = out.counts[k] / total;
        if (samples > 1) {
            double mean = 0, var = 0;
            for (const auto& r : out.per_sample) mean += r[k];
            mean /= samples;
            for (const auto& r : out.per_sample) var += (r[k] - mean) * (r[k] - mean);
            out.std_error[k] = std::sqrt(var / (samples - 1) / samples);
        }
    }
    return out;
}

// ------------------------------------------------------------ Gibbs check

std::vector<HexVertex> hexagon_vertices(DualVertex f) {
    std::vector<HexVertex> out;
    for (int dm = -2; dm <= 2; ++dm) {
        for (int dn = -2; dn <= 2; ++dn) {
            for (const HexVertex v : {HexVertex::black(f.m + dm, f.n + dn), HexVertex::white(f.m + dm, f.n + dn)}) {
                const auto c = face_corners(v);
                if (std::find(c.begin(), c.end(), f) != c.end()) out.push_back(v);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<DualVertex> patch_hexagons(DualVertex anchor, int patch_size) {
    if (patch_size == 1) return {anchor};
    if (patch_size == 2) return {anchor, {anchor.m + 1, anchor.n}};
    throw InvalidArgument("patch_hexagons: patch size must be 1 or 2");
}

namespace {

struct PatchTemplate {
    std::vector<HexVertex> vertices;               // relative to the anchor at (0, 0)
    std::vector<std::pair<int, int>> edges;        // vertex index pairs
    std::map<std::uint32_t, std::vector<std::uint32_t>> states;  // boundary mask -> edge masks
};

void enumerate(const PatchTemplate& p, std::uint32_t free_mask, std::uint32_t edges_used,
               std::vector<std::uint32_t>& out) {
    if (free_mask == 0) {
        out.push_back(edges_used);
        return;
    }
    const int v = std::countr_zero(free_mask);
    for (std::size_t e = 0; e < p.edges.size(); ++e) {
        const auto [a, b] = p.edges[e];
        const int other = a == v ? b : (b == v ? a : -1);
        if (other < 0 || !(free_mask >> other & 1u)) continue;
        enumerate(p, free_mask & ~(1u << v) & ~(1u << other), edges_used | (1u << e), out);
    }
}

const std::vector<std::uint32_t>& states_for(PatchTemplate& p, std::uint32_t boundary) {
    auto it = p.states.find(boundary);
    if (it != p.states.end()) return it->second;
    const std::uint32_t all = (1u << p.vertices.size()) - 1;
    std::vector<std::uint32_t> s;
    enumerate(p, all & ~boundary, 0, s);
    std::sort(s.begin(), s.end());
    return p.states.emplace(boundary, std::move(s)).first->second;
}

}  // namespace

GibbsReport gibbs_conditional(std::span<const Tiling> tilings, std::span<const DualVertex> anchors, int patch_size) {
    PatchTemplate tpl;
    for (const DualVertex& h : patch_hexagons({0, 0}, patch_size)) {
        for (const HexVertex& v : hexagon_vertices(h)) tpl.vertices.push_back(v);
    }
    std::sort(tpl.vertices.begin(), tpl.vertices.end());
    tpl.vertices.erase(std::unique(tpl.vertices.begin(), tpl.vertices.end()), tpl.vertices.end());
    for (std::size_t i = 0; i < tpl.vertices.size(); ++i) {
        for (std::size_t j = i + 1; j < tpl.vertices.size(); ++j) {
            if (adjacent(tpl.vertices[i], tpl.vertices[j])) tpl.edges.emplace_back(int(i), int(j));
        }
    }

    GibbsReport r;
    r.patch_hexagons = static_cast<std::size_t>(patch_size);
    std::map<std::uint32_t, std::map<std::uint32_t, std::size_t>> seen;
    for (const Tiling& t : tilings) {
        for (const DualVertex& a : anchors) {
            std::uint32_t boundary = 0, inner = 0;
            bool ok = true;
            for (std::size_t i = 0; i < tpl.vertices.size() && ok; ++i) {
                HexVertex v = tpl.vertices[i];
                v.m += a.m;
                v.n += a.n;
                const auto e = t.matched_edge(v);
                if (!e) {
                    ok = false;
                    break;
                }
                HexVertex partner = v.color == Color::black ? e->white() : e->black;
                partner.m -= a.m;
                partner.n -= a.n;
                const auto it = std::lower_bound(tpl.vertices.begin(), tpl.vertices.end(), partner);
                if (it == tpl.vertices.end() || *it != partner) {
                    boundary |= 1u << i;
                    continue;
                }
                const int j = static_cast<int>(it - tpl.vertices.begin());
                for (std::size_t k = 0; k < tpl.edges.size(); ++k) {
                    const auto [x, y] = tpl.edges[k];
                    if ((x == int(i) && y == j) || (y == int(i) && x == j)) inner |= 1u << k;
                }
            }
            if (!ok) continue;
            ++r.observations;
            ++seen[boundary][inner];
        }
    }

    for (const auto& [boundary, configs] : seen) {
        const auto& states = states_for(tpl, boundary);
        GibbsBin b;
        b.boundary = boundary;
        b.states = states.size();
        b.counts.assign(states.size(), 0);
        for (const auto& [cfg, n] : configs) {
            const auto it = std::lower_bound(states.begin(), states.end(), cfg);
            if (it == states.end() || *it != cfg) throw InternalError("gibbs_conditional: observed state not enumerated");
            b.counts[it - states.begin()] += n;
            b.total += n;
        }
        const double expected = static_cast<double>(b.total) / b.states;
        for (std::size_t k = 0; k < b.states; ++k) {
            b.max_deviation = std::max(b.max_deviation, std::abs(b.counts[k] / double(b.total) - 1.0 / b.states));
            b.chi2 += (b.counts[k] - expected) * (b.counts[k] - expected) / expected;
        }
        b.tested = b.states >= 2 && expected >= 5.0;
        if (b.tested) {
            b.p_value = boost::math::gamma_q(0.5 * (b.states - 1), 0.5 * b.chi2);
            ++r.tested_bins;
            r.min_p = std::min(r.min_p, b.p_value);
        }
        r.bins.push_back(std::move(b));
    }
    r.bonferroni_p = std::min(1.0, r.min_p * std::max<std::size_t>(r.tested_bins, 1));
    return r;
}

GibbsReport gibbs_conditional_check(const TriangleShape& shape, int size, int patch_size, std::size_t samples,
                                    std::uint64_t seed, int spacing, bool allow_small) {
    if (size < 50 && !allow_small) throw InvalidArgument("gibbs_conditional_check: window must be at least 50");
    if (spacing < 3) throw InvalidArgument("gibbs_conditional_check: spacing must be at least 3");
    std::vector<Tiling> tilings(samples);
    Window central;
    parallel_for(samples, [&](std::size_t i) {
        PipelineSample ps = sample_pipeline(shape, size, derive_seed(seed, i));
        tilings[i] = std::move(ps.tiling);
        if (i == 0) central = ps.central;
    });
    std::vector<DualVertex> anchors;
    for (int m = central.m0 + 2; m <= central.m1 - 3; m += spacing) {
        for (int n = central.n0 + 2; n <= central.n1 - 3; n += spacing) anchors.push_back({m, n});
    }
    return gibbs_conditional(tilings, anchors, patch_size);
}

// ------------------------------------------------------------ height gap

HeightFunction reference_gap_field(const TGraph& t, DualVertex base) {
    return height_from_flow(slope_flow(t.shape(), t.face_window()), reference_flow(t), t.window(), base);
}

ReferenceGap height_reference_gap(const TriangleShape& shape, int size, std::size_t samples, std::uint64_t seed) {
    if (size < 4 || samples == 0) throw InvalidArgument("height_reference_gap: need size >= 4 and samples >= 1");
    ReferenceGap out;
    out.size = size;
    out.seed = seed;
    out.per_sample.assign(samples, 0.0);
    out.turns.assign(samples, 0.0);
    const Window w{-size / 2, size - size / 2 - 1, -size / 2, size - size / 2 - 1};
    parallel_for(samples, [&](std::size_t i) {
        for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
            const Twist tw = random_twist(shape, derive_seed(derive_seed(seed, i), attempt));
            try {
                const TGraph t(shape, tw, w);
                const HeightFunction h = reference_gap_field(t, {0, 0});
                double g = 0.0;
                for (double v : h.value) {
                    if (!std::isnan(v)) g = std::max(g, std::abs(v));
                }
                out.per_sample[i] = g;
                out.turns[i] = tw.turns();
                return;
            } catch (const DegeneracyError&) {
            }
        }
        throw DegeneracyError("height_reference_gap: every twist gave a degenerate T-graph", {});
    });
    out.max_gap = *std::max_element(out.per_sample.begin(), out.per_sample.end());
    return out;
}

}  // namespace tdimer
