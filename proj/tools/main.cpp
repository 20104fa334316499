// tdimer: command-line front end. Every subcommand resolves a complete
// experiment config (flags override a --config file), writes it next to the
// artifacts, and then produces JSON / CSV / SVG files in --out.
//
// Exit status: 0 success, 2 invalid configuration or usage, 1 numeric,
// degeneracy or verification failure.

#include <any>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>

#include "CLI11.hpp"
#include "io.hpp"
#include "suites.hpp"
#include "tdimer/error.hpp"
#include "tdimer/parallel.hpp"
#include "tdimer/rng.hpp"

namespace fs = std::filesystem;
using namespace tdimer;
using io::ExperimentConfig;
using io::json;

namespace {

struct Bound {
    std::string name;
    CLI::Option* opt = nullptr;
    std::function<json()> value;
};

struct Command {
    std::string name;
    CLI::App* app = nullptr;
    std::string pa = "1/3", pb = "1/3", pc = "1/3";
    std::vector<CLI::Option*> slope_opts;
    double lambda = 0.0;
    CLI::Option* lambda_opt = nullptr;
    std::uint64_t seed = 1;
    CLI::Option* seed_opt = nullptr;
    std::string out;
    CLI::Option* out_opt = nullptr;
    std::string config_path;
    std::vector<Bound> bound;
    std::vector<std::shared_ptr<std::any>> storage;
    std::function<void(const ExperimentConfig&)> run;

    template <class T>
    void param(const std::string& name, T def, const std::string& help) {
        auto cell = std::make_shared<std::any>(def);
        storage.push_back(cell);
        T* target = std::any_cast<T>(cell.get());
        CLI::Option* opt = app->add_option("--" + name, *target, help)->capture_default_str();
        bound.push_back({name, opt, [target] { return json(*target); }});
    }
    void param(const std::string& name, bool def, const std::string& help) {
        auto cell = std::make_shared<std::any>(def);
        storage.push_back(cell);
        bool* target = std::any_cast<bool>(cell.get());
        CLI::Option* opt = app->add_flag("--" + name + ",!--no-" + name, *target, help);
        bound.push_back({name, opt, [target] { return json(*target); }});
    }
    void flag(const std::string& name, const std::string& help) {
        auto cell = std::make_shared<std::any>(false);
        storage.push_back(cell);
        bool* target = std::any_cast<bool>(cell.get());
        CLI::Option* opt = app->add_flag("--" + name, *target, help);
        bound.push_back({name, opt, [target] { return json(*target); }});
    }
};

Command& add_command(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds, const std::string& name,
                     const std::string& help, bool experiment = true) {
    auto c = std::make_unique<Command>();
    c->name = name;
    c->app = root.add_subcommand(name, help);
    if (experiment) {
        c->slope_opts.push_back(c->app->add_option("--pa", c->pa, "vertical lozenge density, e.g. 1/3")->capture_default_str());
        c->slope_opts.push_back(c->app->add_option("--pb", c->pb, "NE-SW lozenge density")->capture_default_str());
        c->slope_opts.push_back(c->app->add_option("--pc", c->pc, "NW-SE lozenge density")->capture_default_str());
        c->lambda_opt = c->app->add_option("--lambda", c->lambda, "twist angle in turns (default: drawn from the seed)");
        c->seed_opt = c->app->add_option("--seed", c->seed, "random seed")->capture_default_str();
        c->app->add_option("--config", c->config_path, "JSON config; explicit flags override it");
    }
    c->out_opt = c->app->add_option("--out", c->out, "output directory (default .)");
    cmds.push_back(std::move(c));
    return *cmds.back();
}

const std::vector<std::string> kCommon{"delta", "window", "trials", "samples"};

ExperimentConfig resolve(const Command& cmd) {
    ExperimentConfig c;
    c.command = cmd.name;
    const bool from_file = !cmd.config_path.empty();
    if (from_file) {
        json j;
        try {
            j = json::parse(io::read_text(cmd.config_path));
        } catch (const json::exception& e) {
            throw InvalidArgument(std::string("config: ") + e.what());
        }
        c = j.get<ExperimentConfig>();
        if (c.command != cmd.name) throw InvalidArgument("config is for \"" + c.command + "\", not \"" + cmd.name + "\"");
    }
    const bool slope_given = std::any_of(cmd.slope_opts.begin(), cmd.slope_opts.end(), [](auto* o) { return o->count() > 0; });
    if (!from_file || slope_given) c.slope = io::parse_slope(cmd.pa, cmd.pb, cmd.pc);
    if (cmd.lambda_opt->count()) c.lambda_turns = cmd.lambda;
    if (!from_file || cmd.seed_opt->count()) c.seed = cmd.seed;
    for (const Bound& b : cmd.bound) {
        if (from_file && b.opt->count() == 0 && (c.params.contains(b.name) || std::find(kCommon.begin(), kCommon.end(), b.name) != kCommon.end())) {
            continue;
        }
        const json v = b.value();
        if (b.name == "delta") c.delta = v.get<double>();
        else if (b.name == "window") c.window = v.get<int>();
        else if (b.name == "trials") c.trials = v.get<std::size_t>();
        else if (b.name == "samples") c.samples = v.get<std::size_t>();
        else c.params[b.name] = v;
    }
    if (cmd.out_opt->count() || !from_file) c.output = cmd.out.empty() ? "." : cmd.out;
    io::validate(c);
    return c;
}

std::string path_in(const ExperimentConfig& c, const std::string& file) { return (fs::path(c.output) / file).string(); }

void emit(const ExperimentConfig& c, const std::string& file, const std::string& text) {
    const std::string p = path_in(c, file);
    io::write_text(p, text);
    io::write_meta(p, c);
    std::cout << p << "\n";
}

Window centred(int size) { return {-size / 2, size - size / 2 - 1, -size / 2, size - size / 2 - 1}; }

ContinuousDomain domain_from(const std::string& shape) {
    if (shape == "square") return square_domain(1.0);
    if (shape == "l-shape") return l_shape_domain();
    json j;
    try {
        j = json::parse(io::read_text(shape));
        std::vector<cplx> pts;
        for (const auto& p : j.at("boundary")) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        const auto& m = j.at("marked");
        return make_domain(std::move(pts), {m.at(0).get<double>(), m.at(1).get<double>()});
    } catch (const json::exception& e) {
        throw InvalidArgument("shape file " + shape + ": " + e.what());
    }
}

json proportion(const Proportion& p) {
    return {{"estimate", p.estimate()}, {"lower", p.lower()}, {"upper", p.upper()}, {"successes", p.successes},
            {"trials", p.trials}};
}

// ------------------------------------------------------------ subcommands

void run_build(const ExperimentConfig& c) {
    const TriangleShape shape = c.slope.shape();
    const TGraph t(shape, io::resolve_twist(c, shape), centred(c.window));
    const io::TGraphArtifact a = io::make_artifact(t, c.slope);
    emit(c, "tgraph.json", io::canonical_dump(json(a)));
    if (c.params.value("svg", true)) emit(c, "tgraph.svg", io::render_tgraph(a));
}

void run_walk(const ExperimentConfig& c) {
    const TriangleShape shape = c.slope.shape();
    const TGraph t(shape, io::resolve_twist(c, shape), centred(c.window));
    const std::string mode = c.params.value("mode", "path");
    const int start = t.index(DualVertex{c.params.value("start_m", 0), c.params.value("start_n", 0)});
    if (start < 0 || !t.vertex(start).has_out()) throw InvalidArgument("walk: start vertex must be inside the window");
    if (mode == "path") {
        const double horizon = c.params.value("horizon", 10.0);
        const WalkPath p = simulate(t, start, [&](const WalkStep& s) { return s.time >= horizon; }, c.seed);
        io::Csv csv({"step", "time", "m", "n", "x", "y"});
        std::vector<cplx> pts;
        for (std::size_t i = 0; i < p.steps.size(); ++i) {
            const auto& v = t.vertex(p.steps[i].vertex);
            csv.row({std::to_string(i), io::num(p.steps[i].time), std::to_string(v.coord.m), std::to_string(v.coord.n),
                     io::num(v.pos.real()), io::num(v.pos.imag())});
            pts.push_back(v.pos);
        }
        emit(c, "walk.csv", csv.str());
        if (c.params.value("svg", false)) {
            cplx lo = pts[0], hi = pts[0];
            for (cplx q : pts) {
                lo = {std::min(lo.real(), q.real()), std::min(lo.imag(), q.imag())};
                hi = {std::max(hi.real(), q.real()), std::max(hi.imag(), q.imag())};
            }
            io::Svg svg(lo - cplx(1, 1), hi + cplx(1, 1), 20.0);
            svg.polyline(pts, "black", 0.8);
            svg.circle(pts.front(), 0.15, "red");
            emit(c, "walk.svg", svg.str());
        }
    } else if (mode == "variance") {
        const auto dirs = direction_grid(c.params.value("directions", 8));
        const VarianceProfile v = variance_profile(t, dirs, c.samples, c.trials, c.seed);
        io::Csv csv({"start_m", "start_n", "direction", "variance"});
        for (std::size_t i = 0; i < v.starts.size(); ++i) {
            const DualVertex s = t.vertex(v.starts[i]).coord;
            for (std::size_t k = 0; k < dirs.size(); ++k) {
                csv.row({std::to_string(s.m), std::to_string(s.n), io::num(std::arg(dirs[k])), io::num(v.variance[i][k])});
            }
        }
        emit(c, "walk.csv", csv.str());
        emit(c, "walk.json", io::canonical_dump({{"schema", "tdimer.report/1"}, {"suite", "variance"},
                                                  {"details", {{"min", v.min}, {"max", v.max}, {"truncated", v.truncated},
                                                               {"trials", c.trials}, {"seed", c.seed}}}}));
    } else if (mode == "exit") {
        const double radius = c.params.value("radius", 10.0);
        const ExitAngleReport r = exit_angle_histogram(t, start, radius, c.trials, c.seed);
        io::Csv csv({"bin", "angle_lo", "angle_hi", "count"});
        const double w = 2 * std::numbers::pi / r.histogram.size();
        for (std::size_t k = 0; k < r.histogram.size(); ++k) {
            csv.row({std::to_string(k), io::num(k * w), io::num((k + 1) * w), std::to_string(r.histogram[k])});
        }
        emit(c, "walk.csv", csv.str());
        emit(c, "walk.json", io::canonical_dump({{"schema", "tdimer.report/1"}, {"suite", "exit-angle"},
                                                  {"details", {{"min_arc_probability", r.min_arc_probability},
                                                               {"truncated", r.truncated}, {"radius", radius},
                                                               {"trials", c.trials}, {"seed", c.seed}}}}));
    } else {
        throw InvalidArgument("walk: mode must be path, variance or exit");
    }
}

void run_cross(const ExperimentConfig& c) {
    const TriangleShape shape = c.slope.shape();
    const CrossingGeometry g{{c.params.value("z_x", 0.0), c.params.value("z_y", 0.0)}, c.delta,
                             !c.params.value("vertical", false), c.params.value("reverse", false)};
    const TGraph t(shape, io::resolve_twist(c, shape), crossing_window(shape, g));
    const CrossingEstimate e = crossing_probability(t, g, c.trials, c.seed, c.params.value("max_starts", std::size_t{0}));
    io::Csv csv({"m", "n", "x", "y", "successes", "trials", "estimate", "lower", "upper"});
    for (std::size_t i = 0; i < e.starts.size(); ++i) {
        const auto& v = t.vertex(e.starts[i]);
        const Proportion& p = e.per_start[i];
        csv.row({std::to_string(v.coord.m), std::to_string(v.coord.n), io::num(v.pos.real()), io::num(v.pos.imag()),
                 std::to_string(p.successes), std::to_string(p.trials), io::num(p.estimate()), io::num(p.lower()),
                 io::num(p.upper())});
    }
    emit(c, "cross.csv", csv.str());
    emit(c, "cross.json", io::canonical_dump({{"schema", "tdimer.report/1"}, {"suite", "crossing"},
                                              {"details", {{"worst", proportion(e.worst_case())},
                                                           {"starts", e.starts.size()}, {"truncated", e.truncated},
                                                           {"seed", c.seed}}}}));
    if (c.params.value("svg", false)) {
        const cplx lo = g.lower(), hi = g.upper();
        io::Svg svg(lo - cplx(2, 2), hi + cplx(2, 2), 10.0);
        svg.polyline({lo, {hi.real(), lo.imag()}, hi, {lo.real(), hi.imag()}}, "black", 1.0, true);
        svg.circle(g.source_centre() / g.delta, 0.25 / g.delta, "none", "blue");
        svg.circle(g.target_centre() / g.delta, 0.25 / g.delta, "none", "green");
        const cplx dst = g.target_centre() / g.delta;
        const double ball = 0.25 / g.delta;
        auto stop = [&](const WalkStep& s) {
            const cplx x = t.position(s.vertex);
            return std::abs(x - dst) <= ball || x.real() < lo.real() || x.real() > hi.real() || x.imag() < lo.imag() ||
                   x.imag() > hi.imag();
        };
        const WalkPath p = simulate(t, e.starts[e.worst], stop, derive_seed(c.seed, 0xC0FFEE));
        std::vector<cplx> pts;
        for (const auto& s : p.steps) pts.push_back(t.position(s.vertex));
        svg.polyline(pts, "black", 0.5);
        emit(c, "cross.svg", svg.str());
    }
}

void run_recur(const ExperimentConfig& c) {
    const TriangleShape shape = c.slope.shape();
    std::vector<double> radii = c.params.value("radii", std::vector<double>{16, 64, 256});
    if (radii.empty()) throw InvalidArgument("recur: need at least one radius");
    for (double r : radii) {
        if (!(r > 1)) throw InvalidArgument("recur: radii must exceed 1");
    }
    const double rmax = *std::max_element(radii.begin(), radii.end()) + 4;
    const TGraph t(shape, io::resolve_twist(c, shape), window_covering(shape, cplx(-rmax, -rmax), cplx(rmax, rmax)));
    const int from = t.index(DualVertex{0, 0});
    const ReturnEstimate e = return_probability(t, from, t.vertex(from).out[0], radii, c.trials, c.seed);
    io::Csv csv({"radius", "successes", "trials", "estimate", "lower", "upper", "scaled"});
    const auto scaled = e.scaled();
    for (std::size_t k = 0; k < e.radii.size(); ++k) {
        const Proportion& p = e.escape[k];
        csv.row({io::num(e.radii[k]), std::to_string(p.successes), std::to_string(p.trials), io::num(p.estimate()),
                 io::num(p.lower()), io::num(p.upper()), io::num(scaled[k])});
    }
    emit(c, "recur.csv", csv.str());
}

void run_green(const ExperimentConfig& c) {
    const TriangleShape shape = c.slope.shape();
    const double radius = c.params.value("radius", 60.0);
    if (!(radius >= 5)) throw InvalidArgument("green: radius must be at least 5");
    const double r = radius + 6;
    const TGraph t(shape, io::resolve_twist(c, shape), window_covering(shape, cplx(-r, -r), cplx(r, r)));
    const int face = t.face_index(HexVertex::white(0, 0));
    const CutGreenSpec spec = make_cut_spec(t, face, 2 * std::numbers::pi * c.params.value("direction", 0.05), radius);
    const CutGreenSolution s = solve_cut_green(t, spec);
    io::Csv csv({"m", "n", "x", "y", "r", "arg", "value", "interior"});
    for (std::size_t i = 0; i < s.vertices.size(); ++i) {
        const auto& v = t.vertex(s.vertices[i]);
        csv.row({std::to_string(v.coord.m), std::to_string(v.coord.n), io::num(v.pos.real()), io::num(v.pos.imag()),
                 io::num(std::abs(v.pos - spec.origin)), io::num(cut_argument(spec, v.pos)), io::num(s.value[i]),
                 i < s.interior ? "1" : "0"});
    }
    emit(c, "green.csv", csv.str());
    const double fit = fit_log_coefficient(t, s, radius / 3, radius);
    emit(c, "green.json", io::canonical_dump({{"schema", "tdimer.report/1"}, {"suite", "green"},
                                              {"details", {{"max_residual", s.max_residual},
                                                           {"fitted_log_coefficient", fit},
                                                           {"predicted", predicted_log_coefficient(t, face)},
                                                           {"closed_form", closed_form_log_coefficient(t, face)},
                                                           {"direction", spec.direction},
                                                           {"radius", radius}}}}));
}

struct BuiltDomain {
    ContinuousDomain u;
    double eps;
    TGraph t;
    DiscreteDomain d;
};

BuiltDomain build(const ExperimentConfig& c) {
    const TriangleShape shape = c.slope.shape();
    ContinuousDomain u = domain_from(c.params.value("shape", "square"));
    double eps = c.params.value("eps", 0.0);
    if (eps <= 0) eps = 5 * c.delta;
    TGraph t(shape, io::resolve_twist(c, shape), domain_window(u, c.delta));
    DiscreteDomain d = build_domain(t, c.delta, u, eps);
    return {std::move(u), eps, std::move(t), std::move(d)};
}

void run_domain(const ExperimentConfig& c) {
    const BuiltDomain b = build(c);
    const io::DomainArtifact a = io::make_artifact(b.t, b.d, b.u, b.eps, c.slope);
    emit(c, "domain.json", io::canonical_dump(json(a)));
    if (c.params.value("svg", true)) emit(c, "domain.svg", io::render_domain(a, b.t));
}

void run_sample(const ExperimentConfig& c) {
    const BuiltDomain b = build(c);
    io::SampleArtifact a;
    a.domain = io::make_artifact(b.t, b.d, b.u, b.eps, c.slope);
    a.seed = c.seed;
    const SpanningForest f = sample_domain_forest(b.t, b.d, derive_seed(c.seed, 1));
    for (std::size_t v = 0; v < f.parent.size(); ++v) {
        if (f.parent[v] < 0) continue;
        const DualVertex x = b.t.vertex(static_cast<int>(v)).coord, y = b.t.vertex(f.parent[v]).coord;
        a.tree.push_back({x.m, x.n, y.m, y.n});
    }
    for (const HexEdge& e : interior_edges(b.t, b.d, domain_matching(b.t, b.d, f))) {
        a.matching.push_back({e.black.m, e.black.n, e.slot});
    }
    std::sort(a.matching.begin(), a.matching.end());
    emit(c, "sample.json", io::canonical_dump(json(a)));
    if (c.params.value("svg", true)) emit(c, "sample.svg", io::render_sample(a, b.t));
}

void run_tile(const ExperimentConfig& c) {
    const TriangleShape shape = c.slope.shape();
    const int size = c.params.value("size", 50);
    if (size < 2) throw InvalidArgument("tile: size must be at least 2");
    const PipelineSample ps = sample_pipeline(shape, size, c.seed, c.params.value("margin", 3.0));
    io::TilingArtifact a;
    a.slope = c.slope;
    a.lambda_turns = ps.twist.turns();
    a.seed = c.seed;
    a.central = ps.central;
    for (const HexEdge& e : ps.tiling.edges()) {
        if (ps.central.contains(e.black.m, e.black.n)) a.edges.push_back({e.black.m, e.black.n, e.slot});
    }
    emit(c, "tiling.json", io::canonical_dump(json(a)));
    if (c.params.value("svg", true)) emit(c, "tiling.svg", io::render_tiling(a));
}

void run_stats(const ExperimentConfig& c) {
    const std::string kind = c.params.value("kind", "densities");
    const int size = c.params.value("size", 50);
    suites::Result r;
    if (kind == "densities") {
        r = suites::densities(c.slope, size, c.samples, c.seed);
        io::Csv csv({"class", "rho", "std_error", "count", "target"});
        const char* names[3] = {"vertical", "ne_sw", "nw_se"};
        for (int k = 0; k < 3; ++k) {
            csv.row({names[k], io::num(r.details["rho"][k].get<double>()), io::num(r.details["std_error"][k].get<double>()),
                     std::to_string(r.details["counts"][k].get<std::size_t>()),
                     io::num(r.details["target"][k].get<double>())});
        }
        emit(c, "stats.csv", csv.str());
    } else if (kind == "gibbs") {
        r = suites::gibbs(c.slope, size, c.params.value("patch", 1), c.samples, c.seed);
        io::Csv csv({"boundary", "states", "total", "chi2", "p_value", "max_deviation", "tested"});
        for (const auto& b : r.details["bins"]) {
            std::size_t total = 0;
            for (const auto& n : b["counts"]) total += n.get<std::size_t>();
            csv.row({std::to_string(b["boundary"].get<std::uint32_t>()), std::to_string(b["states"].get<std::size_t>()),
                     std::to_string(total), io::num(b["chi2"].get<double>()), io::num(b["p_value"].get<double>()),
                     io::num(b["max_deviation"].get<double>()), b["tested"].get<bool>() ? "1" : "0"});
        }
        emit(c, "stats.csv", csv.str());
    } else if (kind == "hgap") {
        r = suites::reference_gap(c.slope, size, c.samples, c.seed);
        io::Csv csv({"sample", "lambda_turns", "gap", "gap_doubled"});
        for (std::size_t i = 0; i < c.samples; ++i) {
            csv.row({std::to_string(i), io::num(r.details["lambda_turns"][i].get<double>()),
                     io::num(r.details["per_sample"][i].get<double>()),
                     io::num(r.details["per_sample_doubled"][i].get<double>())});
        }
        emit(c, "stats.csv", csv.str());
    } else {
        throw InvalidArgument("stats: kind must be densities, gibbs or hgap");
    }
    emit(c, "stats.json", io::canonical_dump(suites::to_json(r)));
}

bool verify_failed = false;

void run_verify(const ExperimentConfig& c) {
    const std::string suite = c.params.value("suite", "");
    const auto names = suites::names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
        throw InvalidArgument("verify: --suite must be one of the documented suite names");
    }
    ExperimentConfig cc = c;
    // Only explicitly supplied sizes reach the suite; the rest keep suite defaults.
    for (const char* key : {"size", "pairs", "suite_samples", "suite_trials"}) {
        if (cc.params.contains(key) && cc.params[key].get<long long>() <= 0) cc.params.erase(key);
    }
    if (cc.params.contains("suite_samples")) cc.params["samples"] = cc.params["suite_samples"];
    if (cc.params.contains("suite_trials")) cc.params["trials"] = cc.params["suite_trials"];
    const suites::Result r = suites::run(suite, cc);
    emit(c, "verify.json", io::canonical_dump(suites::to_json(r)));
    std::cout << suite << ": " << (r.pass ? "pass" : "FAIL") << "\n";
    verify_failed = !r.pass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"T-graph dimer sampler and verification tool"};
    app.require_subcommand(1);
    std::size_t threads = 0;
    app.add_option("--threads", threads, "worker threads (default: TDIMER_THREADS or all cores)");

    std::vector<std::unique_ptr<Command>> cmds;

    auto& build_cmd = add_command(app, cmds, "build", "build a T-graph and write tgraph.json / tgraph.svg");
    build_cmd.param("window", 40, "window side in lattice steps");
    build_cmd.param("svg", true, "also write SVG");
    build_cmd.run = run_build;

    auto& walk = add_command(app, cmds, "walk", "simulate the martingale walk (path, variance, exit)");
    walk.param("window", 40, "window side");
    walk.param("mode", std::string("path"), "path | variance | exit");
    walk.param("horizon", 10.0, "path mode: time horizon");
    walk.param("radius", 10.0, "exit mode: ball radius in T-graph units");
    walk.param("start_m", 0, "start vertex m");
    walk.param("start_n", 0, "start vertex n");
    walk.param("trials", std::size_t{1000}, "walks per estimate");
    walk.param("samples", std::size_t{10}, "variance mode: start vertices");
    walk.param("directions", 8, "variance mode: number of directions");
    walk.param("svg", false, "path mode: also write an SVG trace");
    walk.run = run_walk;

    auto& cross = add_command(app, cmds, "cross", "rectangle crossing estimate per start vertex");
    cross.param("delta", 0.1, "scale");
    cross.param("z_x", 0.0, "rectangle translate x");
    cross.param("z_y", 0.0, "rectangle translate y");
    cross.flag("vertical", "use the 1x3 rectangle");
    cross.flag("reverse", "cross right to left (top to bottom)");
    cross.param("trials", std::size_t{1000}, "walks per start vertex");
    cross.param("max_starts", std::size_t{0}, "keep this many evenly spread start vertices (0 = all)");
    cross.flag("svg", "write an SVG with one trace from the worst start");
    cross.run = run_cross;

    auto& recur = add_command(app, cmds, "recur", "escape-before-return probabilities");
    recur.param("radii", std::vector<double>{16, 64, 256}, "radii in T-graph units");
    recur.param("trials", std::size_t{1000}, "walks");
    recur.run = run_recur;

    auto& green = add_command(app, cmds, "green", "conjugate Green function with a cut");
    green.param("radius", 60.0, "truncation radius");
    green.param("direction", 0.05, "cut direction in turns");
    green.run = run_green;

    auto& sample = add_command(app, cmds, "sample", "sample a wired tree and its matching on a domain");
    sample.param("shape", std::string("square"), "square | l-shape | polygon JSON file");
    sample.param("delta", 0.05, "scale");
    sample.param("eps", 0.0, "corridor width (0 = 5 delta)");
    sample.param("svg", true, "also write SVG");
    sample.run = run_sample;

    auto& tile = add_command(app, cmds, "tile", "full-pipeline tiling of a central window");
    tile.param("size", 50, "central window side");
    tile.param("margin", 3.0, "domain side / window side");
    tile.param("svg", true, "also write SVG");
    tile.run = run_tile;

    auto& domain = add_command(app, cmds, "domain", "build a discrete domain from a polygon");
    domain.param("shape", std::string("square"), "square | l-shape | polygon JSON file");
    domain.param("delta", 0.05, "scale");
    domain.param("eps", 0.0, "corridor width (0 = 5 delta)");
    domain.param("svg", true, "also write SVG");
    domain.run = run_domain;

    auto& stats = add_command(app, cmds, "stats", "densities | gibbs | hgap statistics");
    stats.param("kind", std::string("densities"), "densities | gibbs | hgap");
    stats.param("size", 50, "window side");
    stats.param("samples", std::size_t{5}, "pipeline samples");
    stats.param("patch", 1, "gibbs: hexagons in the patch (1 or 2)");
    stats.run = run_stats;

    auto& verify = add_command(app, cmds, "verify", "run a verification suite");
    verify.param("suite", std::string("geometry"), "suite name");
    verify.param("size", 0, "window / domain size (0 = suite default)");
    verify.param("pairs", 0, "height-winding: pairs per tree (0 = default)");
    verify.param("suite_samples", std::size_t{0}, "samples / forests (0 = suite default)");
    verify.param("suite_trials", std::size_t{0}, "walks per estimate (0 = suite default)");
    verify.run = run_verify;

    auto& render = add_command(app, cmds, "render", "render a saved JSON artifact to SVG", false);
    std::string input, output;
    render.app->add_option("input", input, "artifact JSON")->required();
    render.app->add_option("-o,--output", output, "SVG file (default: input with .svg)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (threads > 0) set_default_threads(threads);

    try {
        if (render.app->parsed()) {
            if (output.empty()) output = fs::path(input).replace_extension(".svg").string();
            io::write_text(output, io::render_file_text(io::read_text(input)));
            std::cout << output << "\n";
            return 0;
        }
        for (const auto& cmd : cmds) {
            if (!cmd->app->parsed() || !cmd->run) continue;
            const ExperimentConfig c = resolve(*cmd);
            fs::create_directories(c.output);
            io::write_text(path_in(c, "config.json"), io::canonical_dump(json(c)));
            cmd->run(c);
            return verify_failed ? 1 : 0;
        }
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
