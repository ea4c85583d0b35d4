#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pcd/generators.hpp"
#include "pcd/io.hpp"
#include "pcd/oracle.hpp"
#include "pcd/pipeline.hpp"

namespace py = pybind11;
using namespace pcd;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

MultiGraph make_graph(int n, const std::vector<std::pair<int, int>>& edges) { return MultiGraph(n, edges); }

Decomposition parts_from_py(const MultiGraph& g, const std::vector<std::tuple<std::string, int, std::vector<EdgeId>>>& parts,
                            const std::vector<EdgeId>& leftover) {
    std::string text;
    for (const auto& [kind, start, es] : parts) {
        text += kind + " " + std::to_string(start) + ":";
        for (EdgeId e : es) text += " " + std::to_string(e);
        text += "\n";
    }
    auto d = read_decomposition(g, text);
    d.leftover = leftover;
    return d;
}

py::dict instance_dict(const MultiGraph& g, const ClusterPartition* part) {
    py::dict d;
    d["graph"] = g;
    if (part) {
        d["clusters"] = part->clusters;
        d["V0"] = part->V0;
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_pcd, m) {
    m.doc() = "Path and cycle decompositions of graphs";

    py::register_exception<OperationalError>(m, "OperationalError", PyExc_RuntimeError);

    py::class_<MultiGraph>(m, "Graph")
        .def(py::init(&make_graph), py::arg("n"), py::arg("edges"))
        .def_property_readonly("n", &MultiGraph::n)
        .def_property_readonly("m", &MultiGraph::m)
        .def_property_readonly("edges", &MultiGraph::edge_list)
        .def("degree", &MultiGraph::degree)
        .def("max_multiplicity", &MultiGraph::max_multiplicity)
        .def("__repr__", [](const MultiGraph& g) {
            return "Graph(n=" + std::to_string(g.n()) + ", m=" + std::to_string(g.m()) + ")";
        });

    m.def("complete_graph", &complete_graph, py::arg("n"));
    m.def("cycle_graph", &cycle_graph, py::arg("n"));
    m.def("path_graph", &path_graph, py::arg("n"));
    m.def(
        "gnp", [](int n, const std::string& p, std::uint64_t seed) {
            Rng rng(seed);
            return gnp(n, parse_rational(p), rng);
        },
        py::arg("n"), py::arg("p"), py::arg("seed") = 1);
    m.def("two_cliques", &two_cliques, py::arg("n"), py::arg("s"), py::arg("matchings"));
    m.def("clique_star", &clique_star, py::arg("m"), py::arg("l"));
    m.def("clique_triangles", &clique_triangles, py::arg("m"), py::arg("t"));
    m.def(
        "blowup_cycle", [](int k, int mm, const std::string& d, std::uint64_t seed) {
            Rng rng(seed);
            auto inst = blowup_cycle(k, mm, parse_rational(d), rng);
            return instance_dict(inst.g, &inst.part);
        },
        py::arg("k"), py::arg("m"), py::arg("d") = "1/2", py::arg("seed") = 1);

    m.def(
        "read_instance", [](const std::string& text) {
            auto inst = read_instance(text);
            return instance_dict(inst.g, inst.part ? &*inst.part : nullptr);
        },
        py::arg("text"));
    m.def("write_instance", [](const MultiGraph& g) { return write_instance(g); }, py::arg("graph"));

    m.def(
        "decompose", [](const MultiGraph& g, const std::string& strategy, const std::string& delta, std::uint64_t seed) {
            return to_py(to_json(decompose(g, parse_strategy(strategy), parse_rational(delta), seed)));
        },
        py::arg("graph"), py::arg("strategy") = "greedy", py::arg("delta") = "1/10", py::arg("seed") = 1);

    m.def(
        "verify", [](const MultiGraph& g, const std::vector<std::tuple<std::string, int, std::vector<EdgeId>>>& parts,
                     const std::vector<EdgeId>& leftover) {
            auto r = verify_decomposition(g, parts_from_py(g, parts, leftover));
            py::dict d;
            d["valid"] = r.valid;
            d["paths"] = r.paths;
            d["cycles"] = r.cycles;
            d["leftover"] = r.leftover;
            d["violation"] = r.violation;
            return d;
        },
        py::arg("graph"), py::arg("parts"), py::arg("leftover") = std::vector<EdgeId>{},
        "parts: (kind, start vertex, edge ids) with kind 'path' or 'cycle'");

    m.def("min_path_cycle_count", [](const MultiGraph& g) { return min_path_cycle_count(g).count; }, py::arg("graph"));
    m.def("min_cycle_count", [](const MultiGraph& g) { return min_cycle_count(g).count; }, py::arg("graph"));
    m.def("min_path_count", [](const MultiGraph& g) { return min_path_count(g).count; }, py::arg("graph"));

    m.def(
        "weak_quasirandom", [](const MultiGraph& g, const std::string& eps, const std::string& p) {
            return to_py(to_json(weak_quasirandom_test(g, parse_rational(eps), parse_rational(p))));
        },
        py::arg("graph"), py::arg("eps"), py::arg("p"));

    m.def("audit_counterexamples", []() {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& a : audit_counterexamples()) j.push_back(to_json(a));
        return to_py(j);
    });
}
