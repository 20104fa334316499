// Python module: builds T-graphs, samples tilings and runs the verification
// suites. Structured results cross the boundary as JSON text.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "io.hpp"
#include "suites.hpp"
#include "tdimer/gibbs_stats.hpp"
#include "tdimer/parallel.hpp"
#include "tdimer/random_walk.hpp"

namespace py = pybind11;
using namespace tdimer;

namespace {

io::Slope slope_of(const std::string& pa, const std::string& pb, const std::string& pc) {
    return io::parse_slope(pa, pb, pc);
}

// size x size block of dual vertices around the origin, as in the CLI.
Window centred(int size) { return {-size / 2, size - size / 2 - 1, -size / 2, size - size / 2 - 1}; }

Twist twist_of(const io::Slope& s, std::optional<double> turns, std::uint64_t seed) {
    return turns ? Twist::from_turns(*turns) : random_twist(s.shape(), seed);
}

struct PyTGraph {
    io::Slope slope;
    TGraph graph;

    PyTGraph(const std::string& pa, const std::string& pb, const std::string& pc, std::optional<double> turns,
             int size, std::uint64_t seed)
        : slope(slope_of(pa, pb, pc)),
          graph(slope.shape(), twist_of(slope, turns, seed), centred(size)) {}

    py::array_t<std::complex<double>> positions() const {
        py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(graph.num_vertices()));
        auto v = out.mutable_unchecked<1>();
        for (std::size_t i = 0; i < graph.num_vertices(); ++i) v(i) = graph.position(static_cast<int>(i));
        return out;
    }

    py::array_t<int> coords() const {
        py::array_t<int> out({static_cast<py::ssize_t>(graph.num_vertices()), py::ssize_t{2}});
        auto v = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < graph.num_vertices(); ++i) {
            const auto& x = graph.vertex(static_cast<int>(i));
            v(i, 0) = x.coord.m;
            v(i, 1) = x.coord.n;
        }
        return out;
    }

    // Out-neighbours (-1 when none) and their jump rates.
    py::tuple jumps() const {
        const auto n = static_cast<py::ssize_t>(graph.num_vertices());
        py::array_t<int> out({n, py::ssize_t{2}});
        py::array_t<double> rate({n, py::ssize_t{2}});
        auto o = out.mutable_unchecked<2>();
        auto r = rate.mutable_unchecked<2>();
        for (py::ssize_t i = 0; i < n; ++i) {
            const auto& x = graph.vertex(static_cast<int>(i));
            for (int k = 0; k < 2; ++k) {
                o(i, k) = x.out[k];
                r(i, k) = x.rate[k];
            }
        }
        return py::make_tuple(out, rate);
    }

    py::array_t<double> drifts() const {
        py::array_t<double> out(static_cast<py::ssize_t>(graph.num_vertices()));
        auto v = out.mutable_unchecked<1>();
        for (std::size_t i = 0; i < graph.num_vertices(); ++i) {
            const auto& x = graph.vertex(static_cast<int>(i));
            v(i) = x.has_out() ? std::abs(drift(graph, jump_rates(graph, x.coord))) : 0.0;
        }
        return out;
    }

    std::string to_json() const { return io::canonical_dump(io::json(io::make_artifact(graph, slope))); }
};

std::string sample_tiling(const std::string& pa, const std::string& pb, const std::string& pc, int size,
                          std::uint64_t seed) {
    const io::Slope s = slope_of(pa, pb, pc);
    const PipelineSample p = sample_pipeline(s.shape(), size, seed);
    io::TilingArtifact a;
    a.slope = s;
    a.lambda_turns = p.twist.turns();
    a.seed = seed;
    a.central = p.central;
    for (const HexEdge& e : p.tiling.edges()) {
        if (p.central.contains(e.black.m, e.black.n)) a.edges.push_back({e.black.m, e.black.n, e.slot});
    }
    return io::canonical_dump(io::json(a));
}

std::string run_suite(const std::string& name, const std::string& config_text) {
    // Missing keys take the defaults of a `verify` config.
    io::ExperimentConfig base;
    base.command = "verify";
    io::json j = base;
    if (!config_text.empty()) j.merge_patch(io::json::parse(config_text));
    const auto c = j.get<io::ExperimentConfig>();
    io::validate(c);
    return suites::to_json(suites::run(name, c)).dump();
}

}  // namespace

PYBIND11_MODULE(_tdimer, m) {
    m.doc() = "T-graph random walks, spanning trees and lozenge tilings";

    static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
    static py::exception<InvalidArgument> invalid(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InvalidArgument& e) {
            invalid(e.what());
        } catch (const io::json::exception& e) {
            invalid(e.what());
        } catch (const Error& e) {
            base(e.what());
        }
    });

    py::class_<PyTGraph>(m, "TGraph")
        .def(py::init<const std::string&, const std::string&, const std::string&, std::optional<double>, int,
                      std::uint64_t>(),
             py::arg("pa") = "1/3", py::arg("pb") = "1/3", py::arg("pc") = "1/3", py::arg("lambda_turns") = py::none(),
             py::arg("size") = 40, py::arg("seed") = 1)
        .def_property_readonly("lambda_turns", [](const PyTGraph& t) { return t.graph.twist().turns(); })
        .def_property_readonly("num_vertices", [](const PyTGraph& t) { return t.graph.num_vertices(); })
        .def("positions", &PyTGraph::positions)
        .def("coords", &PyTGraph::coords)
        .def("jumps", &PyTGraph::jumps)
        .def("drifts", &PyTGraph::drifts)
        .def("to_json", &PyTGraph::to_json);

    m.def("random_twist",
          [](const std::string& pa, const std::string& pb, const std::string& pc, std::uint64_t seed) {
              return random_twist(slope_of(pa, pb, pc).shape(), seed).turns();
          },
          py::arg("pa"), py::arg("pb"), py::arg("pc"), py::arg("seed"));
    m.def("sample_tiling", &sample_tiling, py::arg("pa"), py::arg("pb"), py::arg("pc"), py::arg("size") = 50,
          py::arg("seed") = 1);
    m.def("run_suite", &run_suite, py::arg("name"), py::arg("config") = "");
    m.def("suite_names", &suites::names);
    m.def("reload_and_dump", &io::reload_and_dump, py::arg("text"));
    m.def("render", &io::render_file_text, py::arg("text"));
    m.def("set_threads", &set_default_threads, py::arg("n"));
    m.def("default_threads", &default_threads);
}
