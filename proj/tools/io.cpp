#include "io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tdimer/error.hpp"
#include "tdimer/parallel.hpp"

namespace tdimer::io {

// ---------------------------------------------------------------- fractions

std::string Fraction::str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }

namespace {

long long parse_int(std::string_view s, std::string_view whole) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InvalidArgument("not a fraction: \"" + std::string(whole) + "\"");
    }
    return v;
}

Fraction reduced(long long num, long long den) {
    if (den == 0) throw InvalidArgument("fraction with zero denominator");
    if (den < 0) num = -num, den = -den;
    const long long g = std::gcd(num, den);
    return {num / g, den / g};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Fraction parse_fraction(std::string_view text) {
    const std::string_view s = trim(text);
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        return reduced(parse_int(trim(s.substr(0, slash)), text), parse_int(trim(s.substr(slash + 1)), text));
    }
    if (const auto dot = s.find('.'); dot != std::string_view::npos) {
        const std::string_view frac = s.substr(dot + 1);
        if (frac.size() > 15 || frac.empty()) throw InvalidArgument("decimal needs 1-15 digits: \"" + std::string(text) + "\"");
        const std::string_view ip = s.substr(0, dot);
        long long den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        const long long whole = ip.empty() ? 0 : parse_int(ip, text);
        return reduced(whole * den + parse_int(frac, text), den);
    }
    return {parse_int(s, text), 1};
}

TriangleShape Slope::shape() const {
    const auto v = values();
    return triangle_for_slope(v[0], v[1], v[2]);
}

Slope parse_slope(std::string_view a, std::string_view b, std::string_view c) {
    Slope s{{parse_fraction(a), parse_fraction(b), parse_fraction(c)}};
    __int128 num = 0, den = 1;
    for (const Fraction& f : s.p) {
        if (f.num <= 0 || f.num >= f.den) throw InvalidArgument("slope entries must lie strictly between 0 and 1");
        num = num * f.den + static_cast<__int128>(f.num) * den;
        den *= f.den;
    }
    if (num != den) throw InvalidArgument("slope entries must sum to exactly 1");
    return s;
}

// ------------------------------------------------------------------- config

void to_json(json& j, const ExperimentConfig& c) {
    j = json{{"schema", "tdimer.config/1"},
             {"command", c.command},
             {"slope", {c.slope.p[0].str(), c.slope.p[1].str(), c.slope.p[2].str()}},
             {"lambda_turns", c.lambda_turns ? json(*c.lambda_turns) : json(nullptr)},
             {"seed", c.seed},
             {"delta", c.delta},
             {"window", c.window},
             {"trials", c.trials},
             {"samples", c.samples},
             {"params", c.params},
             {"output", c.output}};
}

void from_json(const json& j, ExperimentConfig& c) {
    try {
        if (j.value("schema", "") != "tdimer.config/1") throw InvalidArgument("config: unknown schema");
        c.command = j.at("command").get<std::string>();
        const auto& s = j.at("slope");
        if (!s.is_array() || s.size() != 3) throw InvalidArgument("config: slope must have three entries");
        c.slope = parse_slope(s[0].get<std::string>(), s[1].get<std::string>(), s[2].get<std::string>());
        const auto& l = j.at("lambda_turns");
        c.lambda_turns = l.is_null() ? std::nullopt : std::optional<double>(l.get<double>());
        c.seed = j.at("seed").get<std::uint64_t>();
        c.delta = j.at("delta").get<double>();
        c.window = j.at("window").get<int>();
        c.trials = j.at("trials").get<std::size_t>();
        c.samples = j.at("samples").get<std::size_t>();
        c.params = j.value("params", json::object());
        c.output = j.value("output", std::string("."));
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
}

void validate(const ExperimentConfig& c) {
    if (c.lambda_turns && !std::isfinite(*c.lambda_turns)) throw InvalidArgument("lambda must be finite");
    if (!(c.delta > 0 && c.delta <= 1)) throw InvalidArgument("delta must lie in (0, 1]");
    if (c.window < 4 || c.window > 4000) throw InvalidArgument("window must lie in [4, 4000]");
    if (c.trials == 0) throw InvalidArgument("trials must be positive");
    if (c.samples == 0) throw InvalidArgument("samples must be positive");
    if (!c.params.is_object()) throw InvalidArgument("params must be an object");
}

Twist resolve_twist(const ExperimentConfig& c, const TriangleShape& shape) {
    return c.lambda_turns ? Twist::from_turns(*c.lambda_turns) : random_twist(shape, c.seed);
}

// ---------------------------------------------------------------- artifacts

namespace {

json slope_json(const Slope& s) { return {s.p[0].str(), s.p[1].str(), s.p[2].str()}; }
Slope slope_from(const json& j) {
    return parse_slope(j.at(0).get<std::string>(), j.at(1).get<std::string>(), j.at(2).get<std::string>());
}
json window_json(const Window& w) { return {w.m0, w.m1, w.n0, w.n1}; }
Window window_from(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()}; }
json point_json(cplx p) { return {p.real(), p.imag()}; }
cplx point_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

void expect_schema(const json& j, std::string_view schema) {
    if (j.value("schema", "") != schema) throw InvalidArgument("expected a " + std::string(schema) + " document");
}

}  // namespace

TGraphArtifact make_artifact(const TGraph& t, const Slope& slope) {
    TGraphArtifact a;
    a.slope = slope;
    a.lambda_turns = t.twist().turns();
    a.window = t.window();
    a.vertices.reserve(t.num_vertices());
    for (const auto& v : t.vertices()) {
        a.vertices.push_back({v.coord.m, v.coord.n, v.pos.real(), v.pos.imag(), v.out, v.rate});
    }
    for (const auto& s : t.segments()) a.segments.push_back({s.black.m, s.black.n, s.corner, s.interior});
    return a;
}

void to_json(json& j, const TGraphArtifact& a) {
    json verts = json::array(), segs = json::array();
    for (const auto& v : a.vertices) verts.push_back({v.m, v.n, v.x, v.y, v.out[0], v.out[1], v.rate[0], v.rate[1]});
    for (const auto& s : a.segments) segs.push_back({s.m, s.n, s.corner[0], s.corner[1], s.corner[2], s.interior});
    j = json{{"schema", "tdimer.tgraph/1"}, {"slope", slope_json(a.slope)}, {"lambda_turns", a.lambda_turns},
             {"window", window_json(a.window)}, {"vertices", std::move(verts)}, {"segments", std::move(segs)}};
}

void from_json(const json& j, TGraphArtifact& a) {
    expect_schema(j, "tdimer.tgraph/1");
    a.slope = slope_from(j.at("slope"));
    a.lambda_turns = j.at("lambda_turns").get<double>();
    a.window = window_from(j.at("window"));
    a.vertices.clear();
    for (const auto& v : j.at("vertices")) {
        a.vertices.push_back({v.at(0).get<int>(), v.at(1).get<int>(), v.at(2).get<double>(), v.at(3).get<double>(),
                              {v.at(4).get<int>(), v.at(5).get<int>()},
                              {v.at(6).get<double>(), v.at(7).get<double>()}});
    }
    a.segments.clear();
    for (const auto& s : j.at("segments")) {
        a.segments.push_back({s.at(0).get<int>(), s.at(1).get<int>(),
                              {s.at(2).get<int>(), s.at(3).get<int>(), s.at(4).get<int>()}, s.at(5).get<int>()});
    }
}

void to_json(json& j, const TilingArtifact& a) {
    json edges = json::array();
    for (const auto& e : a.edges) edges.push_back({e[0], e[1], e[2]});
    j = json{{"schema", "tdimer.tiling/1"}, {"slope", slope_json(a.slope)}, {"lambda_turns", a.lambda_turns},
             {"seed", a.seed}, {"central", window_json(a.central)}, {"edges", std::move(edges)}};
}

void from_json(const json& j, TilingArtifact& a) {
    expect_schema(j, "tdimer.tiling/1");
    a.slope = slope_from(j.at("slope"));
    a.lambda_turns = j.at("lambda_turns").get<double>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.central = window_from(j.at("central"));
    a.edges.clear();
    for (const auto& e : j.at("edges")) a.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>()});
}

DomainArtifact make_artifact(const TGraph& t, const DiscreteDomain& d, const ContinuousDomain& u, double eps,
                             const Slope& slope) {
    DomainArtifact a;
    a.slope = slope;
    a.lambda_turns = t.twist().turns();
    a.delta = d.delta;
    a.eps = eps;
    a.window = t.window();
    a.polygon = u.boundary;
    a.marked = u.marked;
    auto coords = [&](int v) {
        const DualVertex c = t.vertex(v).coord;
        return std::array<int, 2>{c.m, c.n};
    };
    for (int v : d.loop) a.loop.push_back(coords(v));
    for (int v : d.escape) a.escape.push_back(coords(v));
    a.erased = {coords(d.erased_edge[0]), coords(d.erased_edge[1])};
    const HexVertex rw = t.face(d.removed_white).white;
    a.removed_white = {rw.m, rw.n};
    a.marked_adjacent = d.marked_adjacent;
    a.wired_vertices = d.wired.size();
    a.whites = d.num_whites();
    a.blacks = d.num_blacks();
    a.hausdorff = loop_hausdorff(t, d.delta, d.loop, u);
    a.boundary_profile = boundary_height_profile(t, d);
    return a;
}

namespace {

json pairs_json(const std::vector<std::array<int, 2>>& v) {
    json out = json::array();
    for (const auto& p : v) out.push_back({p[0], p[1]});
    return out;
}

std::vector<std::array<int, 2>> pairs_from(const json& j) {
    std::vector<std::array<int, 2>> out;
    for (const auto& p : j) out.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    return out;
}

}  // namespace

void to_json(json& j, const DomainArtifact& a) {
    json poly = json::array();
    for (cplx p : a.polygon) poly.push_back(point_json(p));
    j = json{{"schema", "tdimer.domain/1"},
             {"slope", slope_json(a.slope)},
             {"lambda_turns", a.lambda_turns},
             {"delta", a.delta},
             {"eps", a.eps},
             {"window", window_json(a.window)},
             {"polygon", std::move(poly)},
             {"marked", point_json(a.marked)},
             {"loop", pairs_json(a.loop)},
             {"escape", pairs_json(a.escape)},
             {"erased_edge", {{a.erased[0][0], a.erased[0][1]}, {a.erased[1][0], a.erased[1][1]}}},
             {"removed_white", {a.removed_white[0], a.removed_white[1]}},
             {"marked_adjacent", a.marked_adjacent},
             {"wired_vertices", a.wired_vertices},
             {"whites", a.whites},
             {"blacks", a.blacks},
             {"hausdorff", a.hausdorff},
             {"boundary_profile", a.boundary_profile}};
}

void from_json(const json& j, DomainArtifact& a) {
    expect_schema(j, "tdimer.domain/1");
    a.slope = slope_from(j.at("slope"));
    a.lambda_turns = j.at("lambda_turns").get<double>();
    a.delta = j.at("delta").get<double>();
    a.eps = j.at("eps").get<double>();
    a.window = window_from(j.at("window"));
    a.polygon.clear();
    for (const auto& p : j.at("polygon")) a.polygon.push_back(point_from(p));
    a.marked = point_from(j.at("marked"));
    a.loop = pairs_from(j.at("loop"));
    a.escape = pairs_from(j.at("escape"));
    const auto e = pairs_from(j.at("erased_edge"));
    if (e.size() != 2) throw InvalidArgument("domain: erased_edge needs two vertices");
    a.erased = {e[0], e[1]};
    a.removed_white = {j.at("removed_white").at(0).get<int>(), j.at("removed_white").at(1).get<int>()};
    a.marked_adjacent = j.at("marked_adjacent").get<bool>();
    a.wired_vertices = j.at("wired_vertices").get<std::size_t>();
    a.whites = j.at("whites").get<std::size_t>();
    a.blacks = j.at("blacks").get<std::size_t>();
    a.hausdorff = j.at("hausdorff").get<double>();
    a.boundary_profile = j.at("boundary_profile").get<std::vector<double>>();
}

void to_json(json& j, const SampleArtifact& a) {
    json tree = json::array(), matching = json::array();
    for (const auto& e : a.tree) tree.push_back({e[0], e[1], e[2], e[3]});
    for (const auto& e : a.matching) matching.push_back({e[0], e[1], e[2]});
    j = json{{"schema", "tdimer.sample/1"}, {"domain", json(a.domain)}, {"seed", a.seed},
             {"tree", std::move(tree)}, {"matching", std::move(matching)}};
}

void from_json(const json& j, SampleArtifact& a) {
    expect_schema(j, "tdimer.sample/1");
    a.domain = j.at("domain").get<DomainArtifact>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.tree.clear();
    for (const auto& e : j.at("tree")) {
        a.tree.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>(), e.at(3).get<int>()});
    }
    a.matching.clear();
    for (const auto& e : j.at("matching")) a.matching.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>()});
}

std::string canonical_dump(const json& j) { return j.dump() + "\n"; }

std::string reload_and_dump(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed JSON: ") + e.what());
    }
    const std::string schema = j.value("schema", "");
    try {
        if (schema == "tdimer.config/1") return canonical_dump(json(j.get<ExperimentConfig>()));
        if (schema == "tdimer.tgraph/1") return canonical_dump(json(j.get<TGraphArtifact>()));
        if (schema == "tdimer.tiling/1") return canonical_dump(json(j.get<TilingArtifact>()));
        if (schema == "tdimer.domain/1") return canonical_dump(json(j.get<DomainArtifact>()));
        if (schema == "tdimer.sample/1") return canonical_dump(json(j.get<SampleArtifact>()));
    } catch (const json::exception& e) {
        throw InvalidArgument(schema + ": " + e.what());
    }
    // Reports carry free-form details and are kept as plain JSON.
    if (schema == "tdimer.report/1") return canonical_dump(j);
    throw InvalidArgument("unknown schema \"" + schema + "\"");
}

// ---------------------------------------------------------------------- CSV

std::string num(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) { row(header); }

Csv& Csv::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw InternalError("csv: wrong number of cells");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
    return *this;
}

// ---------------------------------------------------------------------- SVG

namespace {

std::string fixed(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    std::string s(buf);
    return s == "-0.000" ? "0.000" : s;
}

std::pair<cplx, cplx> bounds(const std::vector<cplx>& pts, double pad) {
    cplx lo(HUGE_VAL, HUGE_VAL), hi(-HUGE_VAL, -HUGE_VAL);
    for (cplx p : pts) {
        lo = {std::min(lo.real(), p.real()), std::min(lo.imag(), p.imag())};
        hi = {std::max(hi.real(), p.real()), std::max(hi.imag(), p.imag())};
    }
    if (pts.empty()) lo = hi = 0.0;
    return {lo - cplx(pad, pad), hi + cplx(pad, pad)};
}

}  // namespace

Svg::Svg(cplx lo, cplx hi, double pixels_per_unit) : lo_(lo), hi_(hi), scale_(pixels_per_unit) {}

std::string Svg::pt(cplx p) const {
    return fixed((p.real() - lo_.real()) * scale_) + "," + fixed((hi_.imag() - p.imag()) * scale_);
}

void Svg::line(cplx a, cplx b, std::string_view stroke, double width, std::string_view extra) {
    const std::string pa = pt(a), pb = pt(b);
    const auto ca = pa.find(','), cb = pb.find(',');
    body_ += "<line x1=\"" + pa.substr(0, ca) + "\" y1=\"" + pa.substr(ca + 1) + "\" x2=\"" + pb.substr(0, cb) +
             "\" y2=\"" + pb.substr(cb + 1) + "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" +
             fixed(width) + "\"" + (extra.empty() ? "" : " " + std::string(extra)) + "/>\n";
}

void Svg::polyline(const std::vector<cplx>& pts, std::string_view stroke, double width, bool closed,
                   std::string_view extra) {
    body_ += closed ? "<polygon points=\"" : "<polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ += (i ? " " : "") + pt(pts[i]);
    body_ += "\" fill=\"none\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + fixed(width) + "\"" +
             (extra.empty() ? "" : " " + std::string(extra)) + "/>\n";
}

void Svg::polygon(const std::vector<cplx>& pts, std::string_view fill, std::string_view stroke) {
    body_ += "<polygon points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ += (i ? " " : "") + pt(pts[i]);
    body_ += "\" fill=\"" + std::string(fill) + "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"0.3\"/>\n";
}

void Svg::circle(cplx c, double r, std::string_view fill, std::string_view stroke) {
    const std::string p = pt(c);
    const auto comma = p.find(',');
    body_ += "<circle cx=\"" + p.substr(0, comma) + "\" cy=\"" + p.substr(comma + 1) + "\" r=\"" + fixed(r * scale_) +
             "\" fill=\"" + std::string(fill) + "\" stroke=\"" + std::string(stroke) + "\"/>\n";
}

std::string Svg::str() const {
    const double w = (hi_.real() - lo_.real()) * scale_, h = (hi_.imag() - lo_.imag()) * scale_;
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(w) + "\" height=\"" + fixed(h) +
           "\" viewBox=\"0 0 " + fixed(w) + " " + fixed(h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
           body_ + "</svg>\n";
}

std::string_view tile_colour(EdgeClass c) {
    switch (c) {
        case EdgeClass::vertical: return "#d95f02";
        case EdgeClass::ne_sw: return "#1b9e77";
        case EdgeClass::nw_se: return "#7570b3";
    }
    return "black";
}

std::string render_tgraph(const TGraphArtifact& a) {
    std::vector<cplx> pts;
    for (const auto& v : a.vertices) pts.emplace_back(v.x, v.y);
    const auto [lo, hi] = bounds(pts, 1.0);
    Svg svg(lo, hi, 20.0);
    for (const auto& s : a.segments) {
        if (s.interior < 0) continue;
        const auto& p = a.vertices[s.corner[(s.interior + 1) % 3]];
        const auto& q = a.vertices[s.corner[(s.interior + 2) % 3]];
        svg.line({p.x, p.y}, {q.x, q.y}, "black", 0.6);
    }
    return svg.str();
}

std::string render_tiling(const TilingArtifact& a) {
    std::vector<cplx> pts;
    std::string body;
    std::vector<std::pair<std::vector<cplx>, EdgeClass>> tiles;
    for (const auto& e : a.edges) {
        const HexEdge he{HexVertex::black(e[0], e[1]), e[2]};
        const DualEdge d = dual_of_edge(he, Orientation::white_to_black);
        auto third = [&](HexVertex v) {
            for (const DualVertex& c : face_corners(v)) {
                if (c != d.from && c != d.to) return c;
            }
            throw InternalError("render_tiling: face without a third corner");
        };
        std::vector<cplx> quad{regular_position(d.from), regular_position(third(he.white())), regular_position(d.to),
                               regular_position(third(he.black))};
        for (cplx p : quad) pts.push_back(p);
        tiles.emplace_back(std::move(quad), he.edge_class());
    }
    const auto [lo, hi] = bounds(pts, 1.0);
    Svg svg(lo, hi, 8.0);
    for (const auto& [quad, cls] : tiles) svg.polygon(quad, tile_colour(cls), "black");
    return svg.str();
}

TGraph rebuild_tgraph(const DomainArtifact& a) {
    return TGraph(a.slope.shape(), Twist::from_turns(a.lambda_turns), a.window);
}

namespace {

std::vector<cplx> positions(const TGraph& t, const std::vector<std::array<int, 2>>& coords) {
    std::vector<cplx> out;
    for (const auto& c : coords) out.push_back(t.position(DualVertex{c[0], c[1]}));
    return out;
}

Svg domain_canvas(const DomainArtifact& a, const TGraph& t, bool segments) {
    const std::vector<cplx> loop = positions(t, a.loop);
    auto [lo, hi] = bounds(loop, 2.0);
    const double side = std::max(hi.real() - lo.real(), hi.imag() - lo.imag());
    Svg svg(lo, hi, std::clamp(800.0 / side, 1.0, 40.0));
    if (segments) {
        for (const auto& s : t.segments()) {
            if (s.interior < 0) continue;
            const auto ends = s.endpoints();
            const cplx p = t.position(ends[0]), q = t.position(ends[1]);
            auto inside = [&](cplx z) {
                return z.real() >= lo.real() && z.real() <= hi.real() && z.imag() >= lo.imag() && z.imag() <= hi.imag();
            };
            if (inside(p) && inside(q)) svg.line(p, q, "#bbbbbb", 0.4);
        }
    }
    svg.polyline(loop, "red", 1.2, true);
    std::vector<cplx> esc = positions(t, a.escape);
    svg.polyline(esc, "red", 1.0, false, "stroke-dasharray=\"4,3\"");
    return svg;
}

}  // namespace

std::string render_domain(const DomainArtifact& a, const TGraph& t) {
    Svg svg = domain_canvas(a, t, true);
    const int fi = t.face_index(HexVertex::white(a.removed_white[0], a.removed_white[1]));
    if (fi >= 0) {
        const auto& f = t.face(fi);
        const cplx c = (t.position(f.corner[0]) + t.position(f.corner[1]) + t.position(f.corner[2])) / 3.0;
        svg.circle(c, 0.3, "black");
    }
    if (!a.loop.empty()) svg.circle(t.position(DualVertex{a.loop[0][0], a.loop[0][1]}), 0.25, "red");
    return svg.str();
}

std::string render_sample(const SampleArtifact& a, const TGraph& t) {
    Svg svg = domain_canvas(a.domain, t, false);
    for (const auto& e : a.tree) {
        svg.line(t.position(DualVertex{e[0], e[1]}), t.position(DualVertex{e[2], e[3]}), "cyan", 0.8);
    }
    return svg.str();
}

std::string render_file_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed JSON: ") + e.what());
    }
    const std::string schema = j.value("schema", "");
    try {
        if (schema == "tdimer.tgraph/1") return render_tgraph(j.get<TGraphArtifact>());
        if (schema == "tdimer.tiling/1") return render_tiling(j.get<TilingArtifact>());
        if (schema == "tdimer.domain/1") {
            const auto a = j.get<DomainArtifact>();
            return render_domain(a, rebuild_tgraph(a));
        }
        if (schema == "tdimer.sample/1") {
            const auto a = j.get<SampleArtifact>();
            return render_sample(a, rebuild_tgraph(a.domain));
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(schema + ": " + e.what());
    }
    throw InvalidArgument("render: unsupported schema \"" + schema + "\"");
}

// -------------------------------------------------------------------- files

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open " + path + " for writing");
    out << text;
    if (!out) throw InvalidArgument("failed writing " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_meta(const std::string& artifact_path, const ExperimentConfig& c) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    const json meta{{"artifact", artifact_path}, {"created", stamp}, {"threads", default_threads()},
                    {"command", c.command}, {"seed", c.seed}};
    write_text(artifact_path + ".meta.json", meta.dump(2) + "\n");
}

}  // namespace tdimer::io
