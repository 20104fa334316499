#pragma once

// Experiment configuration and artifact serialization (JSON, CSV, SVG),
// shared by the command-line tool, the Python module and the tests.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdimer/domain_builder.hpp"
#include "tdimer/gibbs_stats.hpp"
#include "tdimer/random_walk.hpp"
#include "tdimer/tgraph.hpp"

namespace tdimer::io {

using json = nlohmann::json;

/// Positive rational number written "p/q" (or an integer).
struct Fraction {
    long long num = 1;
    long long den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
    friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Accepts "p/q", "p" and finite decimals like "0.25" (converted exactly).
/// Throws InvalidArgument on anything else or on a zero denominator.
Fraction parse_fraction(std::string_view text);

/// Lozenge densities (vertical, NE-SW, NW-SE); the three fractions must sum to exactly 1.
struct Slope {
    std::array<Fraction, 3> p{Fraction{1, 3}, Fraction{1, 3}, Fraction{1, 3}};

    TriangleShape shape() const;
    std::array<double, 3> values() const { return {p[0].value(), p[1].value(), p[2].value()}; }
    friend bool operator==(const Slope&, const Slope&) = default;
};

Slope parse_slope(std::string_view a, std::string_view b, std::string_view c);

/// Everything that determines an experiment's primary artifacts.
struct ExperimentConfig {
    std::string command;
    Slope slope;
    std::optional<double> lambda_turns;  // nullopt: drawn from the seed
    std::uint64_t seed = 1;
    double delta = 0.1;
    int window = 40;
    std::size_t trials = 1000;
    std::size_t samples = 1;
    json params = json::object();  // subcommand-specific, defaults filled in
    std::string output = ".";

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

void to_json(json& j, const ExperimentConfig& c);
void from_json(const json& j, ExperimentConfig& c);

/// Range checks on the common fields; throws InvalidArgument.
void validate(const ExperimentConfig& c);

/// The fixed twist, or random_twist(shape, seed).
Twist resolve_twist(const ExperimentConfig& c, const TriangleShape& shape);

// ----------------------------------------------------------------- artifacts

struct TGraphArtifact {
    Slope slope;
    double lambda_turns = 0.0;
    Window window;
    struct Vertex {
        int m = 0, n = 0;
        double x = 0, y = 0;
        std::array<int, 2> out{-1, -1};  // vertex indices
        std::array<double, 2> rate{0, 0};
    };
    struct Segment {
        int m = 0, n = 0;  // black vertex
        std::array<int, 3> corner{};
        int interior = -1;
    };
    std::vector<Vertex> vertices;
    std::vector<Segment> segments;
};

TGraphArtifact make_artifact(const TGraph& t, const Slope& slope);
void to_json(json& j, const TGraphArtifact& a);
void from_json(const json& j, TGraphArtifact& a);

struct TilingArtifact {
    Slope slope;
    double lambda_turns = 0.0;
    std::uint64_t seed = 0;
    Window central;                      // black vertices counted as the observation window
    std::vector<std::array<int, 3>> edges;  // (m, n, slot) of the black endpoint
};

void to_json(json& j, const TilingArtifact& a);
void from_json(const json& j, TilingArtifact& a);

struct DomainArtifact {
    Slope slope;
    double lambda_turns = 0.0;
    double delta = 0.0;
    double eps = 0.0;
    Window window;  // T-graph window the domain was built in
    std::vector<cplx> polygon;  // continuum boundary
    cplx marked;
    std::vector<std::array<int, 2>> loop, escape;  // dual coordinates
    std::array<std::array<int, 2>, 2> erased{};
    std::array<int, 2> removed_white{};
    bool marked_adjacent = false;
    std::size_t wired_vertices = 0, whites = 0, blacks = 0;
    double hausdorff = 0.0;
    std::vector<double> boundary_profile;  // along the loop
};

DomainArtifact make_artifact(const TGraph& t, const DiscreteDomain& d, const ContinuousDomain& u, double eps,
                             const Slope& slope);
void to_json(json& j, const DomainArtifact& a);
void from_json(const json& j, DomainArtifact& a);

/// A sampled spanning forest of a domain and its matching.
struct SampleArtifact {
    DomainArtifact domain;
    std::uint64_t seed = 0;
    std::vector<std::array<int, 4>> tree;    // (m, n) -> (m', n') for every wired vertex and the fixed path
    std::vector<std::array<int, 3>> matching;  // (m, n, slot)
};

void to_json(json& j, const SampleArtifact& a);
void from_json(const json& j, SampleArtifact& a);

/// dump(load(dump(x))) == dump(x) for a JSON text.
std::string canonical_dump(const json& j);
/// Round-trips the text through the typed artifact named by its "schema" field.
std::string reload_and_dump(const std::string& text);

// ---------------------------------------------------------------------- CSV

/// Shortest round-trip decimal, locale independent.
std::string num(double x);

class Csv {
public:
    explicit Csv(std::vector<std::string> header);
    Csv& row(const std::vector<std::string>& cells);
    std::string str() const { return text_; }

private:
    std::size_t columns_;
    std::string text_;
};

// ---------------------------------------------------------------------- SVG

/// Minimal SVG canvas in y-up world coordinates.
class Svg {
public:
    Svg(cplx lo, cplx hi, double pixels_per_unit = 10.0);
    void line(cplx a, cplx b, std::string_view stroke, double width, std::string_view extra = "");
    void polyline(const std::vector<cplx>& pts, std::string_view stroke, double width, bool closed = false,
                  std::string_view extra = "");
    void polygon(const std::vector<cplx>& pts, std::string_view fill, std::string_view stroke = "none");
    void circle(cplx c, double r, std::string_view fill, std::string_view stroke = "none");
    std::string str() const;

private:
    std::string pt(cplx p) const;
    cplx lo_, hi_;
    double scale_;
    std::string body_;
};

std::string render_tgraph(const TGraphArtifact& a);
std::string render_tiling(const TilingArtifact& a);
std::string render_domain(const DomainArtifact& a, const TGraph& t);
std::string render_sample(const SampleArtifact& a, const TGraph& t);
/// T-graph a domain or sample artifact was built on.
TGraph rebuild_tgraph(const DomainArtifact& a);
/// Renders any saved artifact (tgraph, tiling, domain, sample).
std::string render_file_text(const std::string& json_text);

/// Fixed colours by lozenge class.
std::string_view tile_colour(EdgeClass c);

// -------------------------------------------------------------------- files

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
/// Non-deterministic details (time stamp, thread count) go to a sidecar
/// `<path>.meta.json`, never into the artifact.
void write_meta(const std::string& artifact_path, const ExperimentConfig& c);

}  // namespace tdimer::io
