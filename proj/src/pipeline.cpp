#include "pwlr/pipeline.hpp"

#include "pwlr/errors.hpp"
#include "pwlr/graph_io.hpp"
#include "pwlr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace pwlr {

EmbeddingMode parse_embedding_mode(std::string_view text) {
  if (text == "h0") return EmbeddingMode::H0;
  if (text == "h1") return EmbeddingMode::H1;
  if (text == "h0h1") return EmbeddingMode::H0H1;
  if (text == "opt-h0") return EmbeddingMode::OptH0;
  if (text == "opt-h1") return EmbeddingMode::OptH1;
  if (text == "opt-h0h1") return EmbeddingMode::OptH0H1;
  throw ValidationError("unknown embedding mode '" + std::string(text) + "'");
}

std::string_view to_string(EmbeddingMode mode) {
  switch (mode) {
    case EmbeddingMode::H0: return "h0";
    case EmbeddingMode::H1: return "h1";
    case EmbeddingMode::H0H1: return "h0h1";
    case EmbeddingMode::OptH0: return "opt-h0";
    case EmbeddingMode::OptH1: return "opt-h1";
    case EmbeddingMode::OptH0H1: return "opt-h0h1";
  }
  return "?";
}

bool is_reduced(EmbeddingMode mode) {
  return mode == EmbeddingMode::OptH0 || mode == EmbeddingMode::OptH1 || mode == EmbeddingMode::OptH0H1;
}

void PwlrConfig::validate() const {
  if (max_iterations < 0) throw ValidationError("max_iterations must be nonnegative");
  if (k1 < 0 || k1 > max_iterations) {
    throw ValidationError("k1 must lie in 0.." + std::to_string(max_iterations));
  }
  if (k2 < 0 || k2 > max_iterations) {
    throw ValidationError("k2 must lie in 0.." + std::to_string(max_iterations));
  }
  if (!(p >= 1.0)) throw ValidationError("norm order p must be >= 1");
  if (!std::isfinite(tau)) throw ValidationError("tau must be finite");
}

namespace {

std::vector<DegreeTuple> sorted_unique(std::vector<DegreeTuple> tuples) {
  std::sort(tuples.begin(), tuples.end());
  tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
  return tuples;
}

/// Heights, persistence and phi vectors from already-propagated features.
GraphEmbedding summarize(const Graph& g, FeatureMatrix features, const PwlrConfig& cfg) {
  GraphEmbedding out;
  out.features = std::move(features);
  out.heights = edge_heights(g, out.features, cfg.p);
  out.summary = persistence_run(g, out.heights);
  out.sorted = phi_sorted(out.summary, cfg.tau);
  out.local_vocab = sorted_unique(edge_degree_tuples(g));
  out.reduced = phi_reduced(out.summary, cfg.tau, out.local_vocab);
  return out;
}

}  // namespace

GraphEmbedding embed_graph(const Graph& input, const FeatureMatrix& x, const PwlrConfig& cfg) {
  cfg.validate();
  const Graph g = cfg.md_preprocess ? preprocess_md(input) : input;
  if (x.orientation != Orientation::NodeMajor || x.values.rows() != g.node_count) {
    throw ValidationError("feature matrix must be node-major with one row per node");
  }
  const TransitionMatrix m = build_transition_matrix(g);
  FeatureMatrix y = wl_propagate(m, x, cfg.k1).transposed();
  return summarize(g, rw_propagate(y, m, cfg.k2), cfg);
}

std::vector<DegreeTuple> build_degree_vocab(const GraphDataset& ds) {
  std::set<DegreeTuple> all;
  for (const Graph& g : ds.graphs) {
    for (const auto& t : edge_degree_tuples(g)) all.insert(t);
  }
  return {all.begin(), all.end()};
}

GraphDataset prepare_dataset(const GraphDataset& ds, const PwlrConfig& cfg) {
  GraphDataset out = ds;
  if (cfg.md_preprocess) {
    for (Graph& g : out.graphs) g = preprocess_md(g);
  }
  return out;
}

std::pair<std::size_t, std::size_t> padded_lengths(const GraphDataset& ds) {
  std::size_t h0 = 0;
  std::size_t h1 = 0;
  for (const Graph& g : ds.graphs) {
    const auto components = static_cast<std::size_t>(g.component_count());
    const auto merges = static_cast<std::size_t>(g.node_count) - components;
    h0 = std::max(h0, merges);
    h1 = std::max(h1, g.edges.size() - merges);
  }
  return {h0, h1};
}

std::size_t embedding_dimension(EmbeddingMode mode, std::size_t vocab_size, std::size_t pad_h0, std::size_t pad_h1) {
  switch (mode) {
    case EmbeddingMode::H0: return pad_h0;
    case EmbeddingMode::H1: return pad_h1;
    case EmbeddingMode::H0H1: return pad_h0 + pad_h1;
    case EmbeddingMode::OptH0:
    case EmbeddingMode::OptH1: return vocab_size;
    case EmbeddingMode::OptH0H1: return 2 * vocab_size;
  }
  return 0;
}

std::vector<double> assemble_vector(EmbeddingMode mode, const PhiVectors& sorted, const PhiVectors& reduced,
                                    std::size_t pad_h0, std::size_t pad_h1) {
  auto padded = [](const std::vector<double>& v, std::size_t len) {
    if (v.size() > len) throw ValidationError("sorted block longer than the dataset padding length");
    std::vector<double> out(v);
    out.resize(len, 0.0);
    return out;
  };
  auto concat = [](std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  switch (mode) {
    case EmbeddingMode::H0: return padded(sorted.h0, pad_h0);
    case EmbeddingMode::H1: return padded(sorted.h1, pad_h1);
    case EmbeddingMode::H0H1: return concat(padded(sorted.h0, pad_h0), padded(sorted.h1, pad_h1));
    case EmbeddingMode::OptH0: return reduced.h0;
    case EmbeddingMode::OptH1: return reduced.h1;
    case EmbeddingMode::OptH0H1: return concat(reduced.h0, reduced.h1);
  }
  return {};
}

std::vector<std::string> DatasetEmbedding::column_names() const {
  std::vector<std::string> names;
  auto sorted_block = [&](const char* prefix, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) names.push_back(std::string(prefix) + "_" + std::to_string(i));
  };
  auto tuple_block = [&](const char* prefix) {
    for (const auto& t : vocab) {
      names.push_back(std::string(prefix) + "[" + std::to_string(t.low) + "-" + std::to_string(t.high) + "]");
    }
  };
  switch (config.mode) {
    case EmbeddingMode::H0: sorted_block("h0", pad_len_h0); break;
    case EmbeddingMode::H1: sorted_block("h1", pad_len_h1); break;
    case EmbeddingMode::H0H1:
      sorted_block("h0", pad_len_h0);
      sorted_block("h1", pad_len_h1);
      break;
    case EmbeddingMode::OptH0: tuple_block("h0"); break;
    case EmbeddingMode::OptH1: tuple_block("h1"); break;
    case EmbeddingMode::OptH0H1:
      tuple_block("h0");
      tuple_block("h1");
      break;
  }
  return names;
}

DatasetEmbedding embed_dataset(const GraphDataset& input, const PwlrConfig& cfg, int threads) {
  cfg.validate();
  const GraphDataset ds = prepare_dataset(input, cfg);
  PwlrConfig inner = cfg;
  inner.md_preprocess = false;

  DatasetEmbedding out;
  out.config = cfg;
  out.vocab = build_degree_vocab(ds);
  std::tie(out.pad_len_h0, out.pad_len_h1) = padded_lengths(ds);
  const auto dim = embedding_dimension(cfg.mode, out.vocab.size(), out.pad_len_h0, out.pad_len_h1);
  out.vectors = DenseMatrix::Zero(static_cast<Eigen::Index>(ds.graphs.size()), static_cast<Eigen::Index>(dim));
  out.graph_labels.reserve(ds.graphs.size());
  for (const Graph& g : ds.graphs) out.graph_labels.push_back(g.graph_label);

  const auto features = encode_features(ds, cfg.feature_mode);
  parallel_for(ds.graphs.size(), threads, [&](std::size_t i) {
    const GraphEmbedding ge = embed_graph(ds.graphs[i], features[i], inner);
    const PhiVectors reduced = phi_reduced(ge.summary, cfg.tau, out.vocab);
    const auto v = assemble_vector(cfg.mode, ge.sorted, reduced, out.pad_len_h0, out.pad_len_h1);
    out.vectors.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), v.size());
  });
  return out;
}

const DenseMatrix& EmbeddingGrid::at(int k1, int k2, EmbeddingMode mode) const {
  auto it = features.find({k1, k2});
  auto mit = std::find(modes.begin(), modes.end(), mode);
  if (it == features.end() || mit == modes.end()) {
    throw ValidationError("grid point (" + std::to_string(k1) + "," + std::to_string(k2) + ", " +
                          std::string(to_string(mode)) + ") was not computed");
  }
  return it->second[static_cast<std::size_t>(mit - modes.begin())];
}

EmbeddingGrid embed_dataset_grid(const GraphDataset& input, const PwlrConfig& base, const std::vector<int>& k1_values,
                                 const std::vector<int>& k2_values, const std::vector<EmbeddingMode>& modes,
                                 int threads) {
  EmbeddingGrid grid;
  grid.k1_values = k1_values;
  grid.k2_values = k2_values;
  std::sort(grid.k1_values.begin(), grid.k1_values.end());
  std::sort(grid.k2_values.begin(), grid.k2_values.end());
  grid.k1_values.erase(std::unique(grid.k1_values.begin(), grid.k1_values.end()), grid.k1_values.end());
  grid.k2_values.erase(std::unique(grid.k2_values.begin(), grid.k2_values.end()), grid.k2_values.end());
  grid.modes = modes;
  if (grid.k1_values.empty() || grid.k2_values.empty() || modes.empty()) {
    throw ValidationError("grid needs at least one k1, one k2 and one mode");
  }
  for (int k : grid.k1_values) {
    PwlrConfig probe = base;
    probe.k1 = k;
    probe.validate();
  }
  for (int k : grid.k2_values) {
    PwlrConfig probe = base;
    probe.k2 = k;
    probe.validate();
  }

  const GraphDataset ds = prepare_dataset(input, base);
  const auto vocab = build_degree_vocab(ds);
  const auto [pad_h0, pad_h1] = padded_lengths(ds);
  const auto n = static_cast<Eigen::Index>(ds.graphs.size());
  for (const Graph& g : ds.graphs) grid.graph_labels.push_back(g.graph_label);
  for (int k1 : grid.k1_values) {
    for (int k2 : grid.k2_values) {
      auto& mats = grid.features[{k1, k2}];
      for (EmbeddingMode mode : modes) {
        mats.push_back(DenseMatrix::Zero(
            n, static_cast<Eigen::Index>(embedding_dimension(mode, vocab.size(), pad_h0, pad_h1))));
      }
    }
  }

  const auto features = encode_features(ds, base.feature_mode);
  const int max_k2 = grid.k2_values.back();
  parallel_for(ds.graphs.size(), threads, [&](std::size_t gi) {
    const Graph& g = ds.graphs[gi];
    const TransitionMatrix m = build_transition_matrix(g);
    FeatureMatrix wl = features[gi];
    int wl_steps = 0;
    for (int k1 : grid.k1_values) {
      wl = wl_propagate(m, wl, k1 - wl_steps);
      wl_steps = k1;
      FeatureMatrix rw = wl.transposed();
      std::size_t next_k2 = 0;
      for (int k2 = 0; k2 <= max_k2; ++k2) {
        if (k2 > 0) rw = rw_propagate(rw, m, 1);
        if (grid.k2_values[next_k2] != k2) continue;
        ++next_k2;
        const auto heights = edge_heights(g, rw, base.p);
        const auto summary = persistence_run(g, heights);
        const auto sorted = phi_sorted(summary, base.tau);
        const auto reduced = phi_reduced(summary, base.tau, vocab);
        auto& mats = grid.features.at({k1, k2});
        for (std::size_t mi = 0; mi < modes.size(); ++mi) {
          const auto v = assemble_vector(modes[mi], sorted, reduced, pad_h0, pad_h1);
          mats[mi].row(static_cast<Eigen::Index>(gi)) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), v.size());
        }
      }
    }
  });
  return grid;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    m = (m + *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid))) / 2.0;
  }
  return m;
}

StabilityReport stability_probe(const Graph& g, const PwlrConfig& cfg, double epsilon, int trials,
                                std::uint64_t seed) {
  cfg.validate();
  if (epsilon < 0.0) throw ValidationError("epsilon must be nonnegative");
  if (trials < 1) throw ValidationError("need at least one trial");
  if (g.component_count() != 1) throw ValidationError("stability probe requires a connected graph");

  std::vector<int> vocabulary;
  if (g.discrete_labels) {
    std::set<int> labels(g.discrete_labels->begin(), g.discrete_labels->end());
    vocabulary.assign(labels.begin(), labels.end());
  }
  const FeatureMatrix x = encode_graph_features(g, vocabulary, cfg.feature_mode);
  PwlrConfig inner = cfg;
  inner.md_preprocess = false;

  const auto reference = embed_graph(g, x, inner);
  const DenseMatrix m_ref = build_transition_matrix(g).dense();

  StabilityReport report;
  report.epsilon = epsilon;
  report.mu2 = second_eigenvalue(build_transition_matrix(g));
  for (int k = 0; k <= cfg.k2; ++k) report.mu2_decay.push_back(std::pow(report.mu2, k));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> factor(1.0 - epsilon, 1.0 + epsilon);
  for (int t = 0; t < trials; ++t) {
    Graph perturbed = g;
    for (Edge& e : perturbed.edges) {
      double w = 0.0;
      do {
        w = e.weight * factor(rng);
      } while (!(w > 0.0));
      e.weight = w;
    }
    const auto emb = embed_graph(perturbed, x, inner);
    double dist = 0.0;
    for (std::size_t i = 0; i < emb.sorted.h0.size(); ++i) dist += std::abs(emb.sorted.h0[i] - reference.sorted.h0[i]);
    const double mdist = (build_transition_matrix(perturbed).dense() - m_ref).cwiseAbs().sum();
    report.embedding_distances.push_back(dist);
    report.matrix_distances.push_back(mdist);
    report.ratios.push_back(mdist > 0.0 ? dist / mdist : 0.0);
  }
  report.median_embedding_distance = median(report.embedding_distances);
  return report;
}

}  // namespace pwlr
