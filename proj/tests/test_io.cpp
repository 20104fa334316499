#include <gtest/gtest.h>

#include <filesystem>

#include "io.hpp"
#include "suites.hpp"
#include "tdimer/error.hpp"

using namespace tdimer;
using io::json;

TEST(Fractions, Parsing) {
    EXPECT_EQ(io::parse_fraction("1/3"), (io::Fraction{1, 3}));
    EXPECT_EQ(io::parse_fraction(" 2/6 "), (io::Fraction{1, 3}));
    EXPECT_EQ(io::parse_fraction("0.25"), (io::Fraction{1, 4}));
    EXPECT_EQ(io::parse_fraction("0.3"), (io::Fraction{3, 10}));
    EXPECT_EQ(io::parse_fraction("3"), (io::Fraction{3, 1}));
    EXPECT_EQ(io::parse_fraction("1/3").str(), "1/3");
    EXPECT_EQ(io::parse_fraction("4/2").str(), "2");
    for (const char* bad : {"", "1/0", "a", "1/3/4", "0.", "1e-3", "0.1234567890123456", "1/x"}) {
        EXPECT_THROW(io::parse_fraction(bad), InvalidArgument) << bad;
    }
}

TEST(Fractions, SlopesSumExactly) {
    const io::Slope s = io::parse_slope("0.5", "0.3", "1/5");
    EXPECT_EQ(s.p[2], (io::Fraction{1, 5}));
    const auto d = s.shape().lozenge_densities();
    EXPECT_DOUBLE_EQ(d[0], 0.5);
    EXPECT_DOUBLE_EQ(d[1], 0.3);
    EXPECT_DOUBLE_EQ(d[2], 0.2);
    EXPECT_NO_THROW(io::parse_slope("1/3", "1/3", "1/3"));
    EXPECT_THROW(io::parse_slope("1/3", "1/3", "0.3333"), InvalidArgument);
    EXPECT_THROW(io::parse_slope("1", "0", "0"), InvalidArgument);
    EXPECT_THROW(io::parse_slope("1/2", "1/2", "0"), InvalidArgument);
}

TEST(Config, RoundTripAndValidation) {
    io::ExperimentConfig c;
    c.command = "cross";
    c.slope = io::parse_slope("1/2", "3/10", "1/5");
    c.lambda_turns = 0.125;
    c.seed = 18446744073709551615ULL;
    c.delta = 0.05;
    c.params = {{"z_x", 0.1}, {"vertical", true}};
    const json j = c;
    EXPECT_EQ(j.at("schema"), "tdimer.config/1");
    const io::ExperimentConfig back = j.get<io::ExperimentConfig>();
    EXPECT_EQ(back, c);
    EXPECT_EQ(io::canonical_dump(json(back)), io::canonical_dump(j));
    EXPECT_NO_THROW(io::validate(c));

    io::ExperimentConfig bad = c;
    bad.delta = 0;
    EXPECT_THROW(io::validate(bad), InvalidArgument);
    bad = c;
    bad.window = 2;
    EXPECT_THROW(io::validate(bad), InvalidArgument);
    bad = c;
    bad.trials = 0;
    EXPECT_THROW(io::validate(bad), InvalidArgument);
    EXPECT_THROW(json::parse(R"({"schema":"other"})").get<io::ExperimentConfig>(), InvalidArgument);
    EXPECT_THROW(json::parse(R"({"schema":"tdimer.config/1","command":"x","slope":["1/2","1/2"]})")
                     .get<io::ExperimentConfig>(),
                 InvalidArgument);
}

TEST(Config, FixedTwistIsUsed) {
    io::ExperimentConfig c;
    c.lambda_turns = 0.3;
    const Twist t = io::resolve_twist(c, c.slope.shape());
    EXPECT_NEAR(t.turns(), 0.3, 1e-15);
    c.lambda_turns.reset();
    c.seed = 4;
    EXPECT_EQ(io::resolve_twist(c, c.slope.shape()).angle(), random_twist(c.slope.shape(), 4).angle());
}

class Artifacts : public ::testing::Test {
protected:
    io::Slope slope = io::parse_slope("1/2", "3/10", "1/5");
    TriangleShape shape = slope.shape();
    Twist twist = Twist::from_turns(0.61);
};

TEST_F(Artifacts, TGraphRoundTrip) {
    const TGraph t(shape, twist, Window::centered(5, 5));
    const io::TGraphArtifact a = io::make_artifact(t, slope);
    EXPECT_EQ(a.vertices.size(), t.num_vertices());
    const std::string text = io::canonical_dump(json(a));
    EXPECT_EQ(io::reload_and_dump(text), text);
    const io::TGraphArtifact b = json::parse(text).get<io::TGraphArtifact>();
    for (std::size_t i = 0; i < a.vertices.size(); ++i) {
        EXPECT_EQ(a.vertices[i].x, b.vertices[i].x);
        EXPECT_EQ(a.vertices[i].y, b.vertices[i].y);
    }
    EXPECT_NE(io::render_tgraph(a).find("<svg"), std::string::npos);
}

TEST_F(Artifacts, DomainAndSampleRoundTrip) {
    const ContinuousDomain u = square_domain(1.0);
    const double delta = 0.1;
    const TGraph t(shape, twist, domain_window(u, delta));
    const DiscreteDomain d = build_domain(t, delta, u);
    io::SampleArtifact s;
    s.domain = io::make_artifact(t, d, u, 5 * delta, slope);
    s.seed = 3;
    for (const HexEdge& e : interior_edges(t, d, domain_matching(t, d, sample_domain_forest(t, d, 3)))) {
        s.matching.push_back({e.black.m, e.black.n, e.slot});
    }
    for (const std::string& text : {io::canonical_dump(json(s.domain)), io::canonical_dump(json(s))}) {
        EXPECT_EQ(io::reload_and_dump(text), text);
        EXPECT_NE(io::render_file_text(text).find("</svg>"), std::string::npos);
    }
    const TGraph again = io::rebuild_tgraph(s.domain);
    EXPECT_EQ(again.window(), t.window());
    EXPECT_EQ(again.position(DualVertex{1, 1}), t.position(DualVertex{1, 1}));
}

TEST_F(Artifacts, TilingRoundTrip) {
    const PipelineSample p = sample_pipeline(shape, 8, 2);
    io::TilingArtifact a;
    a.slope = slope;
    a.lambda_turns = p.twist.turns();
    a.seed = 2;
    a.central = p.central;
    for (const HexEdge& e : p.tiling.edges()) {
        if (p.central.contains(e.black.m, e.black.n)) a.edges.push_back({e.black.m, e.black.n, e.slot});
    }
    const std::string text = io::canonical_dump(json(a));
    EXPECT_EQ(io::reload_and_dump(text), text);
    const std::string svg = io::render_tiling(a);
    EXPECT_NE(svg.find(std::string(io::tile_colour(EdgeClass::vertical))), std::string::npos);
}

TEST(Json, RejectsMalformedDocuments) {
    EXPECT_THROW(io::reload_and_dump("{"), InvalidArgument);
    EXPECT_THROW(io::reload_and_dump(R"({"schema":"unknown/1"})"), InvalidArgument);
    EXPECT_THROW(io::reload_and_dump(R"({"schema":"tdimer.tiling/1"})"), InvalidArgument);
}

TEST(Csv, ShortestNumbers) {
    EXPECT_EQ(io::num(0.1), "0.1");
    EXPECT_EQ(io::num(1.0 / 3), "0.3333333333333333");
    EXPECT_EQ(io::num(-2.5e-20), "-2.5e-20");
    EXPECT_EQ(std::stod(io::num(0.7777777777777777)), 0.7777777777777777);
    io::Csv csv({"a", "b"});
    csv.row({"1", "2"});
    EXPECT_EQ(csv.str(), "a,b\n1,2\n");
    EXPECT_THROW(csv.row({"1"}), InternalError);
}

TEST(Suites, NamesAndReport) {
    const auto names = suites::names();
    EXPECT_EQ(names.size(), 12u);
    io::ExperimentConfig c;
    EXPECT_THROW(suites::run("nope", c), InvalidArgument);
    const suites::Result r = suites::martingale(c.slope.shape(), Twist::from_turns(0.2), 20);
    EXPECT_TRUE(r.pass);
    const json j = suites::to_json(r);
    EXPECT_EQ(j.at("schema"), "tdimer.report/1");
    EXPECT_EQ(j.at("suite"), "martingale");
}

TEST(Files, WriteAndReadBack) {
    const auto dir = std::filesystem::temp_directory_path() / "tdimer_io_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "x.txt").string();
    io::write_text(path, "hello\n");
    EXPECT_EQ(io::read_text(path), "hello\n");
    io::ExperimentConfig c;
    io::write_meta(path, c);
    EXPECT_TRUE(std::filesystem::exists(path + ".meta.json"));
    EXPECT_THROW(io::read_text((dir / "missing").string()), InvalidArgument);
    std::filesystem::remove_all(dir);
}
