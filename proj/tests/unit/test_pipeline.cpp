#include "pwlr/diffusion.hpp"
#include "pwlr/errors.hpp"
#include "pwlr/graph_io.hpp"
#include "pwlr/pipeline.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace pwlr;
using doctest::Approx;

namespace {

struct Table7Row {
  std::vector<double> h0;
  double h1;
  std::vector<double> opt_h0;
};

// Rows for k2 = 0..6; opt_H1 is always (0, 0, h1).
const std::vector<Table7Row> kTable7 = {
    {{0, 2, 2}, 2, {2, 0, 2}},
    {{0.142857, 1.1, 1.292857}, 1.435714, {1.1, 0.142857, 1.292857}},
    {{0.248980, 0.402398, 0.895}, 0.607806, {0.895, 0.248980, 0.402398}},
    {{0.209344, 0.523549, 1.092750}, 0.732893, {}},
    {{0.226757, 0.432861, 1.065452}, 0.659618, {}},
    {{0.219926, 0.459778, 1.103905}, 0.679704, {}},
    {{0.222978, 0.443228, 1.101213}, 0.666206, {}},
};
const Table7Row kTable7Limit{{0.222222, 0.444444, 1.111111}, 0.666667, {1.111111, 0.222222, 0.444444}};

PwlrConfig worked_config(int k2) {
  PwlrConfig cfg;
  cfg.k1 = 0;
  cfg.k2 = k2;
  cfg.p = 1.0;
  cfg.tau = 0.0;
  return cfg;
}

void check_vector(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= tol);
}

/// opt vector built from the unordered events: the sorted H0 values permuted
/// into the degree-tuple order of the worked example.
void check_row(const GraphEmbedding& e, const Table7Row& row) {
  check_vector(e.sorted.h0, row.h0, 1e-6);
  check_vector(e.sorted.h1, {row.h1}, 1e-6);
  REQUIRE(e.local_vocab == std::vector<DegreeTuple>{{1, 3}, {2, 2}, {2, 3}});
  if (!row.opt_h0.empty()) check_vector(e.reduced.h0, row.opt_h0, 1e-6);
  check_vector(e.reduced.h1, {0, 0, row.h1}, 1e-6);
}

GraphDataset load(const std::string& root, const std::string& name) {
  return parse_tu_dataset(std::filesystem::path(root) / name, name);
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("embedding modes parse and print") {
    for (auto m : {EmbeddingMode::H0, EmbeddingMode::H1, EmbeddingMode::H0H1, EmbeddingMode::OptH0,
                   EmbeddingMode::OptH1, EmbeddingMode::OptH0H1}) {
      CHECK(parse_embedding_mode(to_string(m)) == m);
    }
    CHECK_THROWS_AS(parse_embedding_mode("h2"), ValidationError);
  }

  TEST_CASE("config validation") {
    PwlrConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.k1 = 30;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.k1 = 0;
    cfg.k2 = -1;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.k2 = 0;
    cfg.p = 0.5;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
  }

  TEST_CASE("worked example golden values") {
    const Graph g = testing::worked_example();
    const FeatureMatrix x{testing::worked_example_onehot(), Orientation::NodeMajor};
    const auto e = embed_graph(g, x, worked_config(1));
    check_row(e, kTable7[1]);
    const std::vector<double> expected_heights{1.1, 181.0 / 140, 201.0 / 140, 1.0 / 7};
    check_vector(e.heights, expected_heights, 1e-14);
  }

  TEST_CASE("worked example sweep over k2 and the limit") {
    const Graph g = testing::worked_example();
    const FeatureMatrix x{testing::worked_example_onehot(), Orientation::NodeMajor};
    for (int k2 = 0; k2 <= 6; ++k2) {
      CAPTURE(k2);
      check_row(embed_graph(g, x, worked_config(k2)), kTable7[static_cast<std::size_t>(k2)]);
    }
    const auto m = build_transition_matrix(g);
    const auto limit = rw_limit(x.transposed(), m);
    const auto h = edge_heights(g, limit, 1.0);
    const auto s = persistence_run(g, h);
    const auto sorted = phi_sorted(s, 0.0);
    const std::vector<DegreeTuple> vocab{{1, 3}, {2, 2}, {2, 3}};
    const auto reduced = phi_reduced(s, 0.0, vocab);
    check_vector(sorted.h0, kTable7Limit.h0, 1e-6);
    check_vector(sorted.h1, {kTable7Limit.h1}, 1e-6);
    check_vector(reduced.h0, kTable7Limit.opt_h0, 1e-6);
    check_vector(reduced.h1, {0, 0, kTable7Limit.h1}, 1e-6);
  }

  TEST_CASE("k1 = k2 = 0 uses raw label distances") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
      const Graph g = testing::random_graph(3 + trial % 6, 0.4, true, rng);
      const DenseMatrix x = testing::random_unit_labels(g.node_count, 3, rng);
      PwlrConfig cfg;
      cfg.tau = 0.0;
      const auto e = embed_graph(g, {x, Orientation::NodeMajor}, cfg);
      for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto& edge = g.edges[i];
        CHECK(e.heights[i] == Approx((x.row(edge.u) - x.row(edge.v)).lpNorm<1>()).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("edgeless graph gives empty phi") {
    Graph g = Graph::from_edges(3, {});
    const auto e = embed_graph(g, {DenseMatrix::Identity(3, 3), Orientation::NodeMajor}, worked_config(3));
    CHECK(e.sorted.h0.empty());
    CHECK(e.sorted.h1.empty());
    CHECK(e.reduced.h0.empty());
    CHECK(e.summary.beta0_final == 3);
  }

  TEST_CASE("feature matrix must match the graph") {
    const Graph g = testing::worked_example();
    CHECK_THROWS_AS(embed_graph(g, {DenseMatrix::Identity(3, 3), Orientation::NodeMajor}, worked_config(1)),
                    ValidationError);
  }

  TEST_CASE("degree vocabulary") {
    GraphDataset tri;
    tri.graphs.push_back(Graph::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}));
    CHECK(build_degree_vocab(tri) == std::vector<DegreeTuple>{{2, 2}});

    // Triangle: (2,2) on every edge. Path 0-1-2: (1,2) on both edges.
    const auto two = load(testing::kFixtureDir, "TWOGRAPH");
    CHECK(build_degree_vocab(two) == std::vector<DegreeTuple>{{1, 2}, {2, 2}});

    const auto mutag = load(testing::kDataDir, "MUTAG");
    CHECK(build_degree_vocab(mutag).size() == 7);
  }

  TEST_CASE("MUTAG dimensions hold for every (k1, k2)") {
    const auto mutag = load(testing::kDataDir, "MUTAG");
    const auto [h0, h1] = padded_lengths(mutag);
    CHECK(h1 == 7);
    CHECK(h0 >= 27);
    CHECK(h0 <= 29);
    for (auto [k1, k2] : std::vector<std::pair<int, int>>{{0, 0}, {1, 1}, {3, 0}, {0, 5}}) {
      for (auto mode : {EmbeddingMode::OptH0, EmbeddingMode::H0, EmbeddingMode::H1, EmbeddingMode::H0H1,
                        EmbeddingMode::OptH0H1}) {
        PwlrConfig cfg;
        cfg.k1 = k1;
        cfg.k2 = k2;
        cfg.mode = mode;
        const auto emb = embed_dataset(mutag, cfg);
        CHECK(emb.vectors.rows() == 188);
        CHECK(static_cast<std::size_t>(emb.vectors.cols()) ==
              embedding_dimension(mode, 7, emb.pad_len_h0, emb.pad_len_h1));
        CHECK(emb.column_names().size() == static_cast<std::size_t>(emb.vectors.cols()));
        CHECK(emb.vectors.allFinite());
      }
    }
    PwlrConfig cfg;
    cfg.mode = EmbeddingMode::H0H1;
    const auto emb = embed_dataset(mutag, cfg);
    CHECK(static_cast<std::size_t>(emb.vectors.cols()) == emb.pad_len_h0 + emb.pad_len_h1);
  }

  TEST_CASE("embed_dataset is deterministic and thread-count independent") {
    const auto mutag = load(testing::kDataDir, "MUTAG");
    PwlrConfig cfg;
    cfg.k1 = 2;
    cfg.k2 = 3;
    cfg.mode = EmbeddingMode::OptH0H1;
    const auto a = embed_dataset(mutag, cfg, 1);
    const auto b = embed_dataset(mutag, cfg, 1);
    const auto c = embed_dataset(mutag, cfg, 4);
    CHECK((a.vectors.array() == b.vectors.array()).all());
    CHECK((a.vectors.array() == c.vectors.array()).all());
    CHECK(a.graph_labels == c.graph_labels);
  }

  TEST_CASE("embedding grid agrees with per-point embeddings") {
    const auto mutag = load(testing::kDataDir, "MUTAG");
    PwlrConfig base;
    const std::vector<EmbeddingMode> modes{EmbeddingMode::H1, EmbeddingMode::OptH0};
    const auto grid = embed_dataset_grid(mutag, base, {0, 2, 1}, {3, 0}, modes, 2);
    CHECK(grid.k1_values == std::vector<int>{0, 1, 2});
    CHECK(grid.k2_values == std::vector<int>{0, 3});
    for (int k1 : grid.k1_values) {
      for (int k2 : grid.k2_values) {
        for (auto mode : modes) {
          PwlrConfig cfg = base;
          cfg.k1 = k1;
          cfg.k2 = k2;
          cfg.mode = mode;
          const auto direct = embed_dataset(mutag, cfg);
          const DenseMatrix& g = grid.at(k1, k2, mode);
          REQUIRE(g.rows() == direct.vectors.rows());
          REQUIRE(g.cols() == direct.vectors.cols());
          CHECK((g - direct.vectors).cwiseAbs().maxCoeff() <= 1e-12);
        }
      }
    }
    CHECK_THROWS_AS(grid.at(5, 0, EmbeddingMode::H1), ValidationError);
    CHECK_THROWS_AS(grid.at(0, 0, EmbeddingMode::H0), ValidationError);
  }

  TEST_CASE("node permutation leaves dataset vectors unchanged") {
    std::mt19937_64 rng(67);
    GraphDataset a;
    GraphDataset b;
    for (int i = 0; i < 15; ++i) {
      Graph g = testing::random_graph(3 + i % 6, 0.35, i % 4 != 0, rng);
      std::uniform_int_distribution<int> label(0, 2);
      g.discrete_labels = std::vector<int>(static_cast<std::size_t>(g.node_count));
      for (int& l : *g.discrete_labels) l = label(rng);
      g.graph_label = i % 2;
      std::vector<int> perm(static_cast<std::size_t>(g.node_count));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      a.graphs.push_back(g);
      b.graphs.push_back(testing::permuted(g, perm));
    }
    a.refresh_metadata();
    b.refresh_metadata();
    for (auto mode : {EmbeddingMode::H0H1, EmbeddingMode::OptH0H1}) {
      PwlrConfig cfg;
      cfg.k1 = 1;
      cfg.k2 = 2;
      cfg.mode = mode;
      const auto ea = embed_dataset(a, cfg);
      const auto eb = embed_dataset(b, cfg);
      CHECK((ea.vectors - eb.vectors).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("md preprocessing inverts weights before embedding") {
    Graph g = testing::worked_example();
    g.edges[1].weight = 0.5;  // 1/2 -> 2
    g.edges[2].weight = 1.0 / 3;
    PwlrConfig cfg = worked_config(1);
    cfg.md_preprocess = true;
    const auto e = embed_graph(g, {testing::worked_example_onehot(), Orientation::NodeMajor}, cfg);
    check_row(e, kTable7[1]);
  }

  TEST_CASE("stability probe") {
    const Graph g = testing::worked_example();
    PwlrConfig cfg = worked_config(1);

    const auto zero = stability_probe(g, cfg, 0.0, 10, 1);
    for (double d : zero.embedding_distances) CHECK(d == 0.0);
    CHECK(zero.median_embedding_distance == 0.0);
    CHECK(zero.mu2 == Approx(0.4919248460).epsilon(1e-9));
    REQUIRE(zero.mu2_decay.size() == 2);

    double previous = std::numeric_limits<double>::infinity();
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const auto r = stability_probe(g, cfg, eps, 100, 2024);
      CHECK(r.embedding_distances.size() == 100);
      CHECK(r.median_embedding_distance > 0.0);
      CHECK(r.median_embedding_distance < previous);
      previous = r.median_embedding_distance;
    }

    Graph disconnected = Graph::from_edges(4, {{0, 1, 1.0}, {2, 3, 1.0}});
    disconnected.discrete_labels = std::vector<int>{0, 1, 0, 1};
    CHECK_THROWS_AS(stability_probe(disconnected, cfg, 0.1, 2, 1), ValidationError);
    CHECK_THROWS_AS(stability_probe(g, cfg, -0.1, 2, 1), ValidationError);
  }

  TEST_CASE("stability distance stays under a fitted C (mu2^k2 + |dM|) envelope") {
    const Graph g = testing::worked_example();
    const double eps = 1e-3;
    std::vector<double> dist;
    std::vector<double> envelope;
    for (int k2 = 1; k2 <= 29; ++k2) {
      const auto r = stability_probe(g, worked_config(k2), eps, 1, 99);
      dist.push_back(r.embedding_distances[0]);
      envelope.push_back(r.mu2_decay.back() + r.matrix_distances[0]);
    }
    // Fit C on k2 = 1..20, then check the held-out k2 = 21..29.
    double c = 0.0;
    for (std::size_t i = 0; i < 20; ++i) c = std::max(c, dist[i] / envelope[i]);
    CHECK(c > 0.0);
    for (std::size_t i = 20; i < dist.size(); ++i) {
      CAPTURE(i + 1);
      CHECK(dist[i] <= c * envelope[i] * 1.01);
    }
  }

  TEST_CASE("median") {
    CHECK(median({}) == 0.0);
    CHECK(median({3.0}) == 3.0);
    CHECK(median({5.0, 1.0, 3.0}) == 3.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  }
}
