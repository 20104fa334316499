#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "tdimer/error.hpp"
#include "tdimer/parallel.hpp"
#include "tdimer/rng.hpp"

namespace tdimer::suites {

namespace {

Window centred(int size) { return {-size / 2, size - size / 2 - 1, -size / 2, size - size / 2 - 1}; }

json proportion_json(const Proportion& p) {
    return {{"estimate", p.estimate()}, {"lower", p.lower()}, {"upper", p.upper()}, {"successes", p.successes},
            {"trials", p.trials}};
}

}  // namespace

Result geometry(const TriangleShape& shape, const Twist& twist, int size) {
    const GeometryReport r = check_geometry(TGraph(shape, twist, centred(size)));
    const GeometryReport r2 = check_geometry(TGraph(shape, twist, centred(2 * size)));
    const double growth = r.linear_gap > 0 ? r2.linear_gap / r.linear_gap - 1.0 : 0.0;
    Result out{"geometry"};
    out.pass = r.max_circulation < 1e-10 && r.max_primitive_error < 1e-10 && r.max_collinearity < 1e-9 &&
               r.max_angle_error < 1e-6 && r.negatively_oriented == 0 && r.bad_incidence == 0 && growth < 0.05;
    out.details = {{"size", size},
                   {"max_circulation", r.max_circulation},
                   {"max_primitive_error", r.max_primitive_error},
                   {"max_collinearity", r.max_collinearity},
                   {"max_angle_error", r.max_angle_error},
                   {"negatively_oriented", r.negatively_oriented},
                   {"vertices_checked", r.vertices_checked},
                   {"bad_incidence", r.bad_incidence},
                   {"linear_gap", r.linear_gap},
                   {"linear_gap_doubled", r2.linear_gap},
                   {"linear_gap_growth", growth}};
    return out;
}

Result martingale(const TriangleShape& shape, const Twist& twist, int size) {
    const TGraph t(shape, twist, centred(size));
    double worst = 0.0;
    std::size_t checked = 0;
    for (const auto& v : t.vertices()) {
        if (!v.has_out()) continue;
        worst = std::max(worst, std::abs(drift(t, jump_rates(t, v.coord))));
        ++checked;
    }
    return {"martingale", worst < 1e-12, {{"size", size}, {"vertices", checked}, {"max_drift", worst}}};
}

Result reference_flow(const TriangleShape& shape, const Twist& twist, int size) {
    const TGraph t(shape, twist, centred(size));
    const EdgeFlow ref = tdimer::reference_flow(t);
    double worst = 0.0;
    std::size_t whites = 0, blacks = 0;
    const Window& fw = t.face_window();
    for (int m = fw.m0; m <= fw.m1; ++m) {
        for (int n = fw.n0; n <= fw.n1; ++n) {
            const double dw = ref.divergence(HexVertex::white(m, n));
            if (!std::isnan(dw)) worst = std::max(worst, std::abs(dw - 1.0)), ++whites;
            const double db = ref.divergence(HexVertex::black(m, n));
            if (!std::isnan(db)) worst = std::max(worst, std::abs(db + 1.0)), ++blacks;
        }
    }
    return {"reference-flow", worst < 1e-10 && whites > 0 && blacks > 0,
            {{"size", size}, {"whites", whites}, {"blacks", blacks}, {"max_divergence_error", worst}}};
}

Result height_winding(const TriangleShape& shape, const Twist& twist, int size, std::size_t forests,
                      std::size_t pairs, std::uint64_t seed) {
    const ContinuousDomain u = square_domain(1.0);
    const double delta = 1.0 / size;
    const TGraph t(shape, twist, domain_window(u, delta));
    const DiscreteDomain d = build_domain(t, delta, u);
    std::vector<HeightWindingReport> reps(forests);
    parallel_for(forests, [&](std::size_t i) {
        const SpanningForest f = sample_domain_forest(t, d, derive_seed(seed, i));
        const HeightFunction h = domain_heights(t, d, domain_matching(t, d, f));
        Rng rng(derive_seed(seed, forests + i));
        std::vector<std::pair<int, int>> ps;
        const auto& vs = d.wired.vertices;
        for (std::size_t k = 0; k < pairs; ++k) ps.emplace_back(vs[rng.below(vs.size())], vs[rng.below(vs.size())]);
        reps[i] = verify_height_winding(t, f, h, ps);
    });
    double worst = 0.0, literal = 0.0;
    std::size_t checked = 0;
    for (const auto& r : reps) {
        worst = std::max(worst, r.max_discrepancy);
        literal = std::max(literal, r.max_literal_discrepancy);
        checked += r.pairs;
    }
    return {"height-winding", worst < 1e-9,
            {{"size", size}, {"forests", forests}, {"pairs", checked}, {"wired_vertices", d.wired.size()},
             {"max_discrepancy", worst}, {"max_literal_discrepancy", literal}, {"seed", seed}}};
}

Result pushforward(const TriangleShape& shape, std::size_t domains, std::size_t max_inside, std::size_t samples,
                   std::uint64_t seed) {
    std::vector<TinyDomain> tiny = find_tiny_domains(shape, domains, max_inside);
    json per = json::array();
    bool uniform_ok = tiny.size() >= 3, law_ok = tiny.size() >= 3;
    double worst_dev = 0.0, worst_tv_uniform = 0.0, worst_tv_law = 0.0;
    for (std::size_t k = 0; k < tiny.size(); ++k) {
        const TGraph& t = tiny[k].graph;
        const DiscreteDomain& d = tiny[k].domain;
        auto all = enumerate_domain_matchings(t, d);
        for (auto& m : all) std::sort(m.begin(), m.end());
        std::sort(all.begin(), all.end());
        auto index_of = [&](std::vector<HexEdge> e) {
            std::sort(e.begin(), e.end());
            const auto it = std::lower_bound(all.begin(), all.end(), e);
            if (it == all.end() || *it != e) throw InternalError("pushforward: image is not a matching of the domain");
            return static_cast<std::size_t>(it - all.begin());
        };
        std::vector<double> law(all.size(), 0.0);
        const auto arbs = enumerate_arborescences(d.wired);
        for (const auto& wa : arbs) {
            law[index_of(interior_edges(t, d, domain_matching(t, d, domain_forest(t, d, wa.tree))))] += wa.probability;
        }
        const double u = 1.0 / all.size();
        double dev = 0.0;
        for (double p : law) dev = std::max(dev, std::abs(p - u));

        std::vector<std::size_t> counts(all.size(), 0);
        Rng rng(derive_seed(seed, k));
        for (std::size_t s = 0; s < samples; ++s) {
            const Arborescence a = wilson_wired(d.wired, rng);
            ++counts[index_of(interior_edges(t, d, domain_matching(t, d, domain_forest(t, d, a))))];
        }
        double tv_u = 0.0, tv_law = 0.0;
        for (std::size_t i = 0; i < all.size(); ++i) {
            const double f = static_cast<double>(counts[i]) / samples;
            tv_u += 0.5 * std::abs(f - u);
            tv_law += 0.5 * std::abs(f - law[i]);
        }
        uniform_ok = uniform_ok && dev < 1e-9 && tv_u < 0.02;
        law_ok = law_ok && tv_law < 0.02;
        worst_dev = std::max(worst_dev, dev);
        worst_tv_uniform = std::max(worst_tv_uniform, tv_u);
        worst_tv_law = std::max(worst_tv_law, tv_law);
        per.push_back({{"wired_vertices", d.wired.size()}, {"whites", d.num_whites()}, {"matchings", all.size()},
                       {"arborescences", arbs.size()}, {"lambda_turns", tiny[k].turns}, {"max_uniform_deviation", dev},
                       {"law", law}, {"wilson_counts", counts}, {"tv_wilson_uniform", tv_u},
                       {"tv_wilson_pushforward", tv_law}});
    }
    return {"pushforward", uniform_ok,
            {{"domains", per}, {"samples", samples}, {"max_uniform_deviation", worst_dev},
             {"max_tv_wilson_uniform", worst_tv_uniform}, {"max_tv_wilson_pushforward", worst_tv_law},
             {"law_pass", law_ok}, {"seed", seed}}};
}

Result crossing(const TriangleShape& shape, const Twist& twist, const CrossingParams& p) {
    struct Run {
        double delta;
        cplx z;
        bool horizontal, reverse;
        CrossingEstimate est;
    };
    std::vector<Run> runs;
    for (std::size_t di = 0; di < p.deltas.size(); ++di) {
        for (std::size_t k = 0; k < p.translates; ++k) {
            Rng rng(derive_seed(p.seed, di * 1000 + k));
            const cplx z(rng.uniform(), rng.uniform());
            for (bool horizontal : {true, false}) {
                for (bool reverse : {false, true}) runs.push_back({p.deltas[di], z, horizontal, reverse, {}});
            }
        }
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
        Run& r = runs[i];
        const CrossingGeometry g{r.z, r.delta, r.horizontal, r.reverse};
        const TGraph t(shape, twist, crossing_window(shape, g));
        r.est = crossing_probability(t, g, p.trials, derive_seed(p.seed, 1'000'000 + i), p.max_starts);
    }
    std::size_t worst = 0, truncated = 0;
    json rows = json::array();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const Run& r = runs[i];
        truncated += r.est.truncated;
        if (r.est.worst_case().estimate() < runs[worst].est.worst_case().estimate()) worst = i;
        double mean = 0.0;
        for (const auto& q : r.est.per_start) mean += q.estimate();
        mean /= r.est.per_start.size();
        rows.push_back({{"delta", r.delta}, {"z", {r.z.real(), r.z.imag()}}, {"horizontal", r.horizontal},
                        {"reverse", r.reverse}, {"worst", proportion_json(r.est.worst_case())},
                        {"mean_over_starts", mean}, {"starts", r.est.starts.size()}});
    }
    const Proportion& w = runs[worst].est.worst_case();
    const bool threshold_pass = w.estimate() >= p.threshold;
    const bool ci_pass = w.lower() > 0.0;
    return {"crossing", threshold_pass && ci_pass,
            {{"worst", proportion_json(w)}, {"worst_run", worst}, {"threshold", p.threshold},
             {"threshold_pass", threshold_pass}, {"ci_pass", ci_pass}, {"truncated", truncated},
             {"trials_per_start", p.trials}, {"max_starts", p.max_starts}, {"runs", rows}, {"seed", p.seed}}};
}

Result recurrence(const TriangleShape& shape, const Twist& twist, std::vector<double> radii, std::size_t trials,
                  std::uint64_t seed) {
    std::sort(radii.begin(), radii.end());
    const double r = radii.back() + 4;
    const TGraph t(shape, twist, window_covering(shape, cplx(-r, -r), cplx(r, r)));
    const int from = t.index(DualVertex{0, 0});
    const int to = t.vertex(from).out[0];
    const ReturnEstimate e = return_probability(t, from, to, radii, trials, seed);
    const auto scaled = e.scaled();
    bool factor_ok = true, monotone = true;
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        for (std::size_t j = 0; j < scaled.size(); ++j) factor_ok = factor_ok && scaled[i] <= 2.0 * scaled[j];
        if (i > 0) monotone = monotone && e.escape[i].estimate() <= e.escape[i - 1].upper();
    }
    json rows = json::array();
    for (std::size_t k = 0; k < radii.size(); ++k) {
        json row = proportion_json(e.escape[k]);
        row["radius"] = radii[k];
        row["scaled"] = scaled[k];
        rows.push_back(row);
    }
    return {"recurrence", factor_ok && monotone && e.truncated == 0,
            {{"radii", rows}, {"factor_pass", factor_ok}, {"monotone_pass", monotone}, {"truncated", e.truncated},
             {"trials", trials}, {"seed", seed}}};
}

Result green(const TriangleShape& shape, const Twist& twist, double radius, double direction) {
    const double r = radius + 6;
    const TGraph t(shape, twist, window_covering(shape, cplx(-r, -r), cplx(r, r)));
    const int face = t.face_index(HexVertex::white(0, 0));
    const CutGreenSpec spec = make_cut_spec(t, face, direction, radius);
    const CutGreenSolution s = solve_cut_green(t, spec);
    const double fit = fit_log_coefficient(t, s, radius / 3, radius);
    const double predicted = predicted_log_coefficient(t, face);
    const double rel = std::abs(fit - predicted) / std::max(std::abs(predicted), 1e-12);

    // Jump across the cut, far from the face: values just clockwise and
    // anticlockwise of the ray at comparable radius.
    double jump = 0.0;
    std::size_t jumps = 0;
    for (std::size_t i = 0; i < s.interior; ++i) {
        const int v = s.vertices[i];
        const auto& vx = t.vertex(v);
        const double rv = std::abs(vx.pos - spec.origin);
        if (rv < radius / 3 || rv > 2 * radius / 3 || !s.cut_adjacent[i]) continue;
        for (int k = 0; k < 2; ++k) {
            const auto it = std::find(s.vertices.begin(), s.vertices.end(), vx.out[k]);
            if (it == s.vertices.end()) continue;
            const double a0 = cut_argument(spec, vx.pos), a1 = cut_argument(spec, t.position(vx.out[k]));
            if (std::abs(a0 - a1) < std::numbers::pi) continue;  // this edge does not cross the ray
            jump = std::max(jump, std::abs(s.value[i] - s.value[it - s.vertices.begin()]));
            ++jumps;
        }
    }
    return {"green", s.max_residual < 1e-8 && rel <= 0.1,
            {{"radius", radius}, {"interior_vertices", s.interior}, {"max_residual", s.max_residual},
             {"fitted_log_coefficient", fit}, {"predicted", predicted},
             {"closed_form", closed_form_log_coefficient(t, face)}, {"relative_error", rel},
             {"max_cut_jump", jump}, {"cut_edges", jumps}, {"fit_range", {radius / 3, radius}}}};
}

Result domains(const TriangleShape& shape, const Twist& twist, double delta, std::size_t samples,
               std::uint64_t seed) {
    struct Case {
        std::string name;
        ContinuousDomain u;
    };
    const std::vector<Case> cases{{"square", square_domain(1.0)}, {"l-shape", l_shape_domain()}};
    bool pass = true;
    json rows = json::array();
    for (const Case& c : cases) {
        double haus[2]{}, prof[2]{};
        json scales = json::array();
        for (int level = 0; level < 2; ++level) {
            const double dl = delta / (1 << level), eps = 5 * dl;
            const TGraph t(shape, twist, domain_window(c.u, dl));
            const DiscreteDomain d = build_domain(t, dl, c.u, eps);
            haus[level] = loop_hausdorff(t, dl, d.loop, c.u);
            const ClassificationReport cr = check_classification(t, d);
            const auto profile = boundary_height_profile(t, d);
            for (double x : profile) prof[level] = std::max(prof[level], std::abs(x));
            double err = 0.0;
            for (std::size_t s = 0; s < samples; ++s) {
                const SpanningForest f = sample_domain_forest(t, d, derive_seed(seed, level * 1000 + s));
                const HeightFunction h = domain_heights(t, d, domain_matching(t, d, f));
                for (std::size_t i = 0; i < d.loop.size(); ++i) {
                    err = std::max(err, std::abs(h.at(t.vertex(d.loop[i]).coord) - profile[i]));
                }
            }
            pass = pass && haus[level] <= eps && cr.mismatches == 0 && err < 1e-9;
            scales.push_back({{"delta", dl}, {"eps", eps}, {"hausdorff", haus[level]},
                              {"loop_length", d.loop.size()}, {"wired_vertices", d.wired.size()},
                              {"classification_mismatches", cr.mismatches},
                              {"whites_checked", cr.whites_checked}, {"blacks_checked", cr.blacks_checked},
                              {"max_profile", prof[level]}, {"max_height_profile_error", err}});
        }
        const bool halves = haus[1] <= 1.5 * haus[0] / 2;
        const bool stable = prof[1] <= 1.2 * prof[0];
        pass = pass && halves && stable;
        rows.push_back({{"domain", c.name}, {"scales", scales}, {"hausdorff_halves", halves},
                        {"profile_stable", stable}});
    }
    return {"domain", pass, {{"cases", rows}, {"samples", samples}, {"seed", seed}}};
}

Result densities(const io::Slope& slope, int size, std::size_t samples, std::uint64_t seed, double tolerance) {
    const TileDensities d = tile_densities(slope.shape(), size, samples, seed);
    const auto target = slope.values();
    bool pass = true;
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
        worst = std::max(worst, std::abs(d.rho[k] - target[k]));
        pass = pass && std::abs(d.rho[k] - target[k]) <= tolerance;
    }
    return {"densities", pass,
            {{"rho", d.rho}, {"std_error", d.std_error}, {"target", target}, {"max_error", worst},
             {"tolerance", tolerance}, {"size", size}, {"samples", samples}, {"counts", d.counts},
             {"lambda_turns", d.turns}, {"seed", seed}}};
}

Result gibbs(const io::Slope& slope, int size, int patch, std::size_t samples, std::uint64_t seed) {
    const GibbsReport r = gibbs_conditional_check(slope.shape(), size, patch, samples, seed);
    json bins = json::array();
    for (const auto& b : r.bins) {
        bins.push_back({{"boundary", b.boundary}, {"states", b.states}, {"counts", b.counts}, {"tested", b.tested},
                        {"chi2", b.chi2}, {"p_value", b.p_value}, {"max_deviation", b.max_deviation}});
    }
    return {"gibbs", r.conclusive() && r.bonferroni_p > 0.01,
            {{"patch_hexagons", r.patch_hexagons}, {"observations", r.observations}, {"tested_bins", r.tested_bins},
             {"min_p", r.min_p}, {"bonferroni_p", r.bonferroni_p}, {"bins", bins}, {"size", size},
             {"samples", samples}, {"seed", seed}}};
}

Result reference_gap(const io::Slope& slope, int size, std::size_t samples, std::uint64_t seed) {
    const ReferenceGap a = height_reference_gap(slope.shape(), size, samples, seed);
    const ReferenceGap b = height_reference_gap(slope.shape(), 2 * size, samples, seed);
    const bool pass = b.max_gap <= 1.1 * a.max_gap + 1e-9;
    return {"hgap", pass,
            {{"size", size}, {"max_gap", a.max_gap}, {"max_gap_doubled", b.max_gap}, {"per_sample", a.per_sample},
             {"per_sample_doubled", b.per_sample}, {"lambda_turns", a.turns}, {"samples", samples}, {"seed", seed}}};
}

std::vector<std::string> names() {
    return {"geometry", "martingale", "reference-flow", "height-winding", "pushforward", "crossing",
            "recurrence", "green",    "domain",         "densities",      "gibbs",       "hgap"};
}

Result run(const std::string& name, const io::ExperimentConfig& c) {
    const TriangleShape shape = c.slope.shape();
    const json& p = c.params;
    auto twist = [&] { return io::resolve_twist(c, shape); };
    if (name == "geometry") return geometry(shape, twist(), p.value("size", 100));
    if (name == "martingale") return martingale(shape, twist(), p.value("size", 100));
    if (name == "reference-flow") return reference_flow(shape, twist(), p.value("size", 100));
    if (name == "height-winding") {
        return height_winding(shape, twist(), p.value("size", 50), p.value("samples", std::size_t{50}),
                              p.value("pairs", std::size_t{100}), c.seed);
    }
    if (name == "pushforward") {
        return pushforward(shape, p.value("domains", std::size_t{4}), p.value("max_inside", std::size_t{12}),
                           p.value("samples", std::size_t{100000}), c.seed);
    }
    if (name == "crossing") {
        CrossingParams cp;
        cp.trials = p.value("trials", cp.trials);
        cp.translates = p.value("translates", cp.translates);
        cp.max_starts = p.value("max_starts", cp.max_starts);
        cp.seed = c.seed;
        return crossing(shape, twist(), cp);
    }
    if (name == "recurrence") {
        return recurrence(shape, twist(), p.value("radii", std::vector<double>{16, 64, 256}),
                          p.value("trials", std::size_t{10000}), c.seed);
    }
    if (name == "green") return green(shape, twist(), p.value("radius", 60.0), p.value("direction", 0.3));
    if (name == "domain") return domains(shape, twist(), p.value("delta", 0.02), p.value("samples", std::size_t{10}), c.seed);
    if (name == "densities") {
        return densities(c.slope, p.value("size", 100), p.value("samples", std::size_t{20}), c.seed);
    }
    if (name == "gibbs") {
        return gibbs(c.slope, p.value("size", 100), p.value("patch", 1), p.value("samples", std::size_t{20}), c.seed);
    }
    if (name == "hgap") return reference_gap(c.slope, p.value("size", 50), p.value("samples", std::size_t{5}), c.seed);
    throw InvalidArgument("unknown suite \"" + name + "\"");
}

json to_json(const Result& r) {
    return {{"schema", "tdimer.report/1"}, {"suite", r.name}, {"pass", r.pass}, {"details", r.details}};
}

}  // namespace tdimer::suites
