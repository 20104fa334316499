// Acceptance runner: one PASS/FAIL line per criterion, with the measured
// values. Exit status is 0 when every criterion passes except those listed
// in kKnownUnattainable, whose failure is expected and explained in README.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "io.hpp"
#include "suites.hpp"
#include "tdimer/parallel.hpp"

using namespace tdimer;
using io::json;

namespace {

const std::set<int> kKnownUnattainable{5, 6};

struct Outcome {
    bool pass = false;
    std::string summary;
    json details = json::object();
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;  // 0: no runtime limit
    std::function<Outcome()> run;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

const io::Slope kEquilateral = io::parse_slope("1/3", "1/3", "1/3");
const io::Slope kSkewed = io::parse_slope("1/2", "3/10", "1/5");
const std::vector<io::Slope> kSlopes{kEquilateral, kSkewed};

Twist twist_for(const io::Slope& s, std::uint64_t seed) { return random_twist(s.shape(), seed); }

// Runs one suite per slope; passes when all do. `pick` extracts the summary value.
Outcome per_slope(const std::function<suites::Result(const io::Slope&)>& suite, const std::string& key) {
    Outcome o{true, "", json::array()};
    for (const io::Slope& s : kSlopes) {
        const suites::Result r = suite(s);
        o.pass = o.pass && r.pass;
        if (!o.summary.empty()) o.summary += "; ";
        o.summary += s.p[0].str() + "," + s.p[1].str() + "," + s.p[2].str() + ": " + key + "=" +
                     fmt(r.details.at(key).get<double>());
        o.details.push_back(suites::to_json(r));
    }
    return o;
}

// Criterion 12: artifacts produced twice, with different thread counts, must
// be byte-identical.
Outcome determinism() {
    std::vector<std::pair<std::string, std::function<std::string()>>> producers;
    const io::Slope s = kSkewed;
    const TriangleShape shape = s.shape();
    producers.emplace_back("tgraph", [&] {
        const TGraph t(shape, twist_for(s, 1), Window::centered(20, 20));
        return io::canonical_dump(json(io::make_artifact(t, s)));
    });
    producers.emplace_back("sample", [&] {
        const ContinuousDomain u = square_domain(1.0);
        const TGraph t(shape, twist_for(s, 2), domain_window(u, 0.05));
        const DiscreteDomain d = build_domain(t, 0.05, u);
        io::SampleArtifact a;
        a.domain = io::make_artifact(t, d, u, 0.25, s);
        a.seed = 2;
        for (const HexEdge& e : interior_edges(t, d, domain_matching(t, d, sample_domain_forest(t, d, 2)))) {
            a.matching.push_back({e.black.m, e.black.n, e.slot});
        }
        return io::canonical_dump(json(a));
    });
    producers.emplace_back("tiling", [&] {
        const PipelineSample p = sample_pipeline(shape, 30, 3);
        io::TilingArtifact a;
        a.slope = s;
        a.lambda_turns = p.twist.turns();
        a.seed = 3;
        a.central = p.central;
        for (const HexEdge& e : p.tiling.edges()) a.edges.push_back({e.black.m, e.black.n, e.slot});
        return io::canonical_dump(json(a));
    });
    producers.emplace_back("densities", [&] { return suites::to_json(suites::densities(s, 50, 4, 4)).dump(); });
    producers.emplace_back("crossing", [&] {
        suites::CrossingParams p;
        p.deltas = {0.1};
        p.translates = 2;
        p.trials = 300;
        p.max_starts = 4;
        return suites::to_json(suites::crossing(shape, twist_for(s, 5), p)).dump();
    });
    producers.emplace_back("recurrence", [&] {
        return suites::to_json(suites::recurrence(shape, twist_for(s, 6), {8, 16}, 500, 6)).dump();
    });
    producers.emplace_back("height-winding", [&] {
        return suites::to_json(suites::height_winding(shape, twist_for(s, 7), 20, 3, 20, 7)).dump();
    });

    Outcome o{true, "", json::object()};
    std::size_t bytes = 0;
    for (const auto& [name, make] : producers) {
        set_default_threads(1);
        const std::string a = make();
        set_default_threads(1);
        const std::string b = make();
        set_default_threads(3);
        const std::string c = make();
        set_default_threads(0);
        const bool same = a == b && b == c;
        o.pass = o.pass && same;
        o.details[name] = same;
        bytes += a.size();
        if (!same) o.summary += name + " differs; ";
    }
    o.summary += std::to_string(producers.size()) + " artifacts, " + std::to_string(bytes) +
                 " bytes, threads 1/1/3 identical=" + (o.pass ? "yes" : "no");
    return o;
}

std::vector<Criterion> criteria() {
    std::vector<Criterion> out;
    out.push_back({1, "geometry", 10.0, [] {
                       return per_slope([](const io::Slope& s) { return suites::geometry(s.shape(), twist_for(s, 1), 100); },
                                        "linear_gap_growth");
                   }});
    out.push_back({2, "martingale", 1.0, [] {
                       return per_slope(
                           [](const io::Slope& s) { return suites::martingale(s.shape(), twist_for(s, 2), 100); },
                           "max_drift");
                   }});
    out.push_back({3, "reference-flow", 5.0, [] {
                       return per_slope(
                           [](const io::Slope& s) { return suites::reference_flow(s.shape(), twist_for(s, 3), 100); },
                           "max_divergence_error");
                   }});
    out.push_back({4, "height-winding", 120.0, [] {
                       return per_slope(
                           [](const io::Slope& s) {
                               return suites::height_winding(s.shape(), twist_for(s, 4), 50, 50, 100, 7);
                           },
                           "max_discrepancy");
                   }});
    out.push_back({5, "pushforward", 300.0, [] {
                       const suites::Result r = suites::pushforward(kSkewed.shape(), 4, 12, 100000, 11);
                       Outcome o{r.pass, "", suites::to_json(r)};
                       o.summary = "max |P - uniform|=" + fmt(r.details["max_uniform_deviation"].get<double>()) +
                                   ", TV(Wilson, uniform)=" + fmt(r.details["max_tv_wilson_uniform"].get<double>()) +
                                   ", TV(Wilson, pushforward)=" +
                                   fmt(r.details["max_tv_wilson_pushforward"].get<double>()) +
                                   " law_pass=" + (r.details["law_pass"].get<bool>() ? "yes" : "no");
                       return o;
                   }});
    out.push_back({6, "crossing", 600.0, [] {
                       const suites::Result r = suites::crossing(kSkewed.shape(), twist_for(kSkewed, 6));
                       Outcome o{r.pass, "", suites::to_json(r)};
                       const json& w = r.details["worst"];
                       o.summary = "worst=" + fmt(w["estimate"].get<double>()) + " CI [" +
                                   fmt(w["lower"].get<double>()) + ", " + fmt(w["upper"].get<double>()) +
                                   "] threshold_pass=" + (r.details["threshold_pass"].get<bool>() ? "yes" : "no") +
                                   " ci_pass=" + (r.details["ci_pass"].get<bool>() ? "yes" : "no");
                       return o;
                   }});
    out.push_back({7, "recurrence", 600.0, [] {
                       const suites::Result r = suites::recurrence(kSkewed.shape(), twist_for(kSkewed, 7));
                       Outcome o{r.pass, "p(R) log R =", suites::to_json(r)};
                       for (const auto& row : r.details["radii"]) o.summary += " " + fmt(row["scaled"].get<double>());
                       return o;
                   }});
    out.push_back({8, "green", 120.0, [] {
                       const suites::Result r = suites::green(kSkewed.shape(), twist_for(kSkewed, 8), 60.0, 0.3);
                       Outcome o{r.pass, "", suites::to_json(r)};
                       o.summary = "residual=" + fmt(r.details["max_residual"].get<double>()) +
                                   " fit=" + fmt(r.details["fitted_log_coefficient"].get<double>()) +
                                   " predicted=" + fmt(r.details["predicted"].get<double>()) +
                                   " rel=" + fmt(r.details["relative_error"].get<double>());
                       return o;
                   }});
    out.push_back({9, "domain", 0.0, [] {
                       const suites::Result r = suites::domains(kSkewed.shape(), twist_for(kSkewed, 9), 0.02, 10, 13);
                       Outcome o{r.pass, "", suites::to_json(r)};
                       for (const auto& c : r.details["cases"]) {
                           o.summary += c["domain"].get<std::string>() + ": hausdorff";
                           for (const auto& sc : c["scales"]) o.summary += " " + fmt(sc["hausdorff"].get<double>());
                           o.summary += " halves=" + std::string(c["hausdorff_halves"].get<bool>() ? "yes" : "no") + "; ";
                       }
                       return o;
                   }});
    out.push_back({10, "densities", 1200.0, [] {
                       Outcome o{true, "", json::array()};
                       for (const io::Slope& s : kSlopes) {
                           const suites::Result r = suites::densities(s, 100, 20, 17);
                           o.pass = o.pass && r.pass;
                           const auto rho = r.details["rho"];
                           o.summary += "(" + fmt(rho[0].get<double>()) + "," + fmt(rho[1].get<double>()) + "," +
                                        fmt(rho[2].get<double>()) + ") ";
                           o.details.push_back(suites::to_json(r));
                       }
                       return o;
                   }});
    out.push_back({11, "hgap", 0.0, [] {
                       Outcome o{true, "", json::array()};
                       for (const io::Slope& s : kSlopes) {
                           const suites::Result r = suites::reference_gap(s, 50, 5, 23);
                           o.pass = o.pass && r.pass;
                           o.summary += fmt(r.details["max_gap"].get<double>()) + " -> " +
                                        fmt(r.details["max_gap_doubled"].get<double>()) + "; ";
                           o.details.push_back(suites::to_json(r));
                       }
                       return o;
                   }});
    out.push_back({12, "determinism", 0.0, determinism});
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    std::string report_path;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--report" && i + 1 < argc) report_path = argv[++i];
        else only.insert(std::stoi(a));
    }
    json report = json::array();
    bool ok = true;
    for (const Criterion& c : criteria()) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.budget_seconds <= 0 || secs < c.budget_seconds;
        const bool pass = o.pass && in_time;
        const bool expected = kKnownUnattainable.count(c.id) > 0;
        std::ostringstream line;
        line << (pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.summary << " (" << fmt(secs)
             << " s";
        if (c.budget_seconds > 0) line << " of " << c.budget_seconds << " s";
        line << ")";
        if (!pass && expected) line << " [known unattainable]";
        std::cout << line.str() << std::endl;
        if (!pass && !expected) ok = false;
        report.push_back({{"id", c.id}, {"name", c.name}, {"pass", pass}, {"seconds", secs}, {"details", o.details}});
    }
    if (!report_path.empty()) std::ofstream(report_path) << report.dump(1) << "\n";
    return ok ? 0 : 1;
}
