#include "pwlr/diffusion.hpp"
#include "pwlr/errors.hpp"
#include "pwlr/evalkit.hpp"
#include "pwlr/filtration.hpp"
#include "pwlr/graph_io.hpp"
#include "pwlr/pipeline.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <tuple>

namespace py = pybind11;
using namespace pwlr;

namespace {

using EdgeTuple = std::tuple<int, int, double>;

Graph make_graph(int node_count, const std::vector<EdgeTuple>& edges, std::optional<std::vector<int>> labels,
                 int graph_label) {
  std::vector<Edge> list;
  list.reserve(edges.size());
  for (const auto& [u, v, w] : edges) list.push_back({u, v, w});
  Graph g = Graph::from_edges(node_count, std::move(list));
  g.discrete_labels = std::move(labels);
  g.graph_label = graph_label;
  g.validate();
  return g;
}

std::vector<EdgeTuple> edge_tuples(const Graph& g) {
  std::vector<EdgeTuple> out;
  for (const Edge& e : g.edges) out.emplace_back(e.u, e.v, e.weight);
  return out;
}

py::list tuple_list(const std::vector<DegreeTuple>& tuples) {
  py::list out;
  for (const auto& t : tuples) out.append(py::make_tuple(t.low, t.high));
  return out;
}

}  // namespace

PYBIND11_MODULE(_pwlr, m) {
  m.doc() = "Bindings for the pwlr C++ core.";
  m.attr("__version__") = "0.1.0";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());

  py::class_<Graph>(m, "Graph")
      .def(py::init(&make_graph), py::arg("node_count"), py::arg("edges"), py::arg("labels") = py::none(),
           py::arg("graph_label") = 0,
           "Undirected graph from (u, v, weight) triples over 0-based node ids.")
      .def_readonly("node_count", &Graph::node_count)
      .def_property_readonly("edges", &edge_tuples)
      .def_readwrite("labels", &Graph::discrete_labels)
      .def_readwrite("attributes", &Graph::continuous_attrs)
      .def_readwrite("graph_label", &Graph::graph_label)
      .def("degrees", &Graph::unweighted_degrees)
      .def("component_count", &Graph::component_count)
      .def("__repr__", [](const Graph& g) {
        return "<Graph |V|=" + std::to_string(g.node_count) + " |E|=" + std::to_string(g.edges.size()) + ">";
      });

  py::class_<GraphDataset>(m, "GraphDataset")
      .def(py::init([](std::string name, std::vector<Graph> graphs) {
             GraphDataset ds;
             ds.name = std::move(name);
             ds.graphs = std::move(graphs);
             ds.refresh_metadata();
             return ds;
           }),
           py::arg("name"), py::arg("graphs"))
      .def_readonly("name", &GraphDataset::name)
      .def_readonly("graphs", &GraphDataset::graphs)
      .def_readonly("label_vocabulary", &GraphDataset::label_vocabulary)
      .def_readonly("class_labels", &GraphDataset::class_labels)
      .def_readonly("warnings", &GraphDataset::warnings)
      .def("__len__", [](const GraphDataset& ds) { return ds.graphs.size(); })
      .def("__getitem__", [](const GraphDataset& ds, std::size_t i) {
        if (i >= ds.graphs.size()) throw py::index_error();
        return ds.graphs[i];
      });

  py::class_<PwlrConfig>(m, "PwlrConfig")
      .def(py::init([](int k1, int k2, double p, double tau, const std::string& mode, const std::string& feature_mode,
                       bool md_preprocess) {
             PwlrConfig cfg;
             cfg.k1 = k1;
             cfg.k2 = k2;
             cfg.p = p;
             cfg.tau = tau;
             cfg.mode = parse_embedding_mode(mode);
             cfg.feature_mode = parse_feature_mode(feature_mode);
             cfg.md_preprocess = md_preprocess;
             cfg.validate();
             return cfg;
           }),
           py::arg("k1") = 0, py::arg("k2") = 0, py::arg("p") = 1.0, py::arg("tau") = 1.0, py::arg("mode") = "h0",
           py::arg("feature_mode") = "discrete", py::arg("md_preprocess") = false)
      .def_readwrite("k1", &PwlrConfig::k1)
      .def_readwrite("k2", &PwlrConfig::k2)
      .def_readwrite("p", &PwlrConfig::p)
      .def_readwrite("tau", &PwlrConfig::tau)
      .def_property(
          "mode", [](const PwlrConfig& c) { return std::string(to_string(c.mode)); },
          [](PwlrConfig& c, const std::string& s) { c.mode = parse_embedding_mode(s); })
      .def_readwrite("md_preprocess", &PwlrConfig::md_preprocess);

  m.def("parse_tu_dataset", &parse_tu_dataset, py::arg("root"), py::arg("name"),
        "Load a dataset in the TU Dortmund text layout.");
  m.def(
      "encode_features",
      [](const GraphDataset& ds, const std::string& mode) {
        std::vector<DenseMatrix> out;
        for (auto& f : encode_features(ds, parse_feature_mode(mode))) out.push_back(std::move(f.values));
        return out;
      },
      py::arg("dataset"), py::arg("feature_mode") = "discrete");

  m.def(
      "transition_matrix", [](const Graph& g) { return build_transition_matrix(g).dense(); }, py::arg("graph"),
      "Dense (D + I)^-1 (A + I).");
  m.def(
      "wl_propagate",
      [](const Graph& g, const DenseMatrix& x, int k1) {
        return wl_propagate(build_transition_matrix(g), {x, Orientation::NodeMajor}, k1).values;
      },
      py::arg("graph"), py::arg("x"), py::arg("k1"), "M^k1 X for node-major X.");
  m.def(
      "rw_propagate",
      [](const Graph& g, const DenseMatrix& y, int k2) {
        return rw_propagate({y, Orientation::FeatureMajor}, build_transition_matrix(g), k2).values;
      },
      py::arg("graph"), py::arg("y"), py::arg("k2"), "Y M^k2 for feature-major Y.");
  m.def(
      "rw_limit",
      [](const Graph& g, const DenseMatrix& y) {
        return rw_limit({y, Orientation::FeatureMajor}, build_transition_matrix(g)).values;
      },
      py::arg("graph"), py::arg("y"));
  m.def(
      "stationary_distribution", [](const Graph& g) { return stationary_distribution(build_transition_matrix(g)); },
      py::arg("graph"));
  m.def(
      "second_eigenvalue", [](const Graph& g) { return second_eigenvalue(build_transition_matrix(g)); },
      py::arg("graph"));

  m.def(
      "edge_heights",
      [](const Graph& g, const DenseMatrix& x, double p) {
        return edge_heights(g, {x, Orientation::NodeMajor}, p);
      },
      py::arg("graph"), py::arg("x"), py::arg("p") = 1.0, "Per-edge l_p distance for node-major features.");
  m.def(
      "persistence",
      [](const Graph& g, const std::vector<double>& heights, double tau, std::optional<std::vector<std::pair<int, int>>> vocab) {
        const auto s = persistence_run(g, heights);
        py::list events;
        for (const auto& ev : s.events) {
          const Edge& e = g.edges[ev.edge];
          events.append(py::make_tuple(e.u, e.v, ev.height, ev.kind == EventKind::Merge ? "H0" : "H1",
                                       py::make_tuple(ev.degrees.low, ev.degrees.high)));
        }
        py::list betti;
        for (const auto& p : betti_prefixes(s)) betti.append(py::make_tuple(p.beta0, p.beta1));
        const auto sorted = phi_sorted(s, tau);
        py::dict out;
        out["events"] = events;
        out["betti"] = betti;
        out["phi_h0"] = sorted.h0;
        out["phi_h1"] = sorted.h1;
        if (vocab) {
          std::vector<DegreeTuple> tuples;
          for (auto [a, b] : *vocab) tuples.push_back({a, b});
          const auto reduced = phi_reduced(s, tau, tuples);
          out["opt_h0"] = reduced.h0;
          out["opt_h1"] = reduced.h1;
        }
        return out;
      },
      py::arg("graph"), py::arg("heights"), py::arg("tau") = 1.0, py::arg("vocab") = py::none());

  m.def(
      "embed_graph",
      [](const Graph& g, const DenseMatrix& x, const PwlrConfig& cfg) {
        const auto e = embed_graph(g, {x, Orientation::NodeMajor}, cfg);
        py::dict out;
        out["features"] = e.features.values;
        out["heights"] = e.heights;
        out["phi_h0"] = e.sorted.h0;
        out["phi_h1"] = e.sorted.h1;
        out["degree_tuples"] = tuple_list(e.local_vocab);
        out["opt_h0"] = e.reduced.h0;
        out["opt_h1"] = e.reduced.h1;
        return out;
      },
      py::arg("graph"), py::arg("x"), py::arg("config"));

  m.def(
      "build_degree_vocab", [](const GraphDataset& ds) { return tuple_list(build_degree_vocab(ds)); },
      py::arg("dataset"));

  py::class_<DatasetEmbedding>(m, "DatasetEmbedding")
      .def_readonly("vectors", &DatasetEmbedding::vectors)
      .def_readonly("graph_labels", &DatasetEmbedding::graph_labels)
      .def_readonly("pad_len_h0", &DatasetEmbedding::pad_len_h0)
      .def_readonly("pad_len_h1", &DatasetEmbedding::pad_len_h1)
      .def_property_readonly("vocab", [](const DatasetEmbedding& e) { return tuple_list(e.vocab); })
      .def("column_names", &DatasetEmbedding::column_names);

  m.def("embed_dataset", &embed_dataset, py::arg("dataset"), py::arg("config"), py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());

  py::class_<CvReport>(m, "CvReport")
      .def_readonly("mode", &CvReport::mode)
      .def_readonly("mean", &CvReport::mean)
      .def_readonly("std", &CvReport::std)
      .def_readonly("fold_accuracies", &CvReport::fold_accuracies)
      .def_property_readonly("chosen",
                             [](const CvReport& r) {
                               py::list rows;
                               for (const auto& rep : r.chosen) {
                                 py::list row;
                                 for (const auto& c : rep) row.append(py::make_tuple(c.k1, c.k2, c.trees));
                                 rows.append(row);
                               }
                               return rows;
                             })
      .def_readonly("runtime_seconds", &CvReport::runtime_seconds);

  m.def(
      "cross_validate",
      [](const GraphDataset& ds, const std::vector<std::string>& modes, const PwlrConfig& base,
         std::vector<int> k_values, std::vector<int> trees, int repeats, int folds, int inner_folds,
         std::uint64_t seed, int threads) {
        CvOptions o;
        o.repeats = repeats;
        o.folds = folds;
        o.inner_folds = inner_folds;
        o.k1_values = k_values;
        o.k2_values = k_values;
        o.tree_counts = std::move(trees);
        o.seed = seed;
        o.threads = threads;
        std::vector<EmbeddingMode> parsed;
        for (const auto& s : modes) parsed.push_back(parse_embedding_mode(s));
        py::gil_scoped_release release;
        return cross_validate(ds, parsed, base, o);
      },
      py::arg("dataset"), py::arg("modes"), py::arg("config") = PwlrConfig{},
      py::arg("k_values") = std::vector<int>{0, 1, 2}, py::arg("trees") = std::vector<int>{10, 25, 50, 100, 150, 200},
      py::arg("repeats") = 10, py::arg("folds") = 10, py::arg("inner_folds") = 5, py::arg("seed") = 0,
      py::arg("threads") = 1,
      "Repeated stratified k-fold with an inner grid search over (k1, k2, trees).");
}
