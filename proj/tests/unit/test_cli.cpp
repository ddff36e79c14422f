#include "pwlr/cli.hpp"
#include "pwlr/embedding_io.hpp"
#include "pwlr/graph_io.hpp"
#include "pwlr/pipeline.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace pwlr;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pwlr_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("embed on the worked example prints the golden vectors") {
    for (const std::string mode : {"h0", "h1", "opt-h0", "opt-h1"}) {
      const auto r = run({"embed", "--dataset", "WORKED", "--data-dir", testing::kFixtureDir, "--mode", mode, "--k1",
                          "0", "--k2", "1", "--tau", "0", "--p", "1"});
      REQUIRE(r.code == 0);
      std::istringstream in(r.out);
      const auto table = read_embedding_csv(in);
      REQUIRE(table.values.rows() == 1);
      std::vector<double> want;
      if (mode == "h0") want = {0.142857, 1.1, 1.292857};
      if (mode == "h1") want = {1.435714};
      if (mode == "opt-h0") want = {1.1, 0.142857, 1.292857};
      if (mode == "opt-h1") want = {0, 0, 1.435714};
      REQUIRE(table.values.cols() == static_cast<Eigen::Index>(want.size()));
      for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(std::abs(table.values(0, static_cast<Eigen::Index>(i)) - want[i]) <= 1e-6);
      }
      CHECK(r.out.rfind("# manifest: ", 0) == 0);
    }
  }

  TEST_CASE("embed MUTAG opt-h0 gives 188 rows of 7 coordinates") {
    const auto r = run({"embed", "--dataset", "MUTAG", "--data-dir", testing::kDataDir, "--mode", "opt-h0", "--k1",
                        "1", "--k2", "1", "--tau", "1", "--out", "csv"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    const auto table = read_embedding_csv(in);
    CHECK(table.values.rows() == 188);
    CHECK(table.values.cols() == 7);
    CHECK(table.columns.size() == 7);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }

  TEST_CASE("usage and validation errors exit with 2") {
    auto r = run({"embed", "--dataset", "NOPE", "--data-dir", "/nonexistent/pwlr"});
    CHECK(r.code == 2);
    CHECK(r.err.find("/nonexistent/pwlr") != std::string::npos);

    r = run({"classify", "--dataset", "MUTAG", "--data-dir", testing::kDataDir, "--folds", "1"});
    CHECK(r.code == 2);
    r = run({"embed", "--dataset", "WORKED", "--data-dir", testing::kFixtureDir, "--mode", "h7"});
    CHECK(r.code == 2);
    r = run({"embed", "--dataset", "WORKED", "--data-dir", testing::kFixtureDir, "--k1", "-1"});
    CHECK(r.code == 2);
    r = run({"inspect", "--dataset", "WORKED", "--data-dir", testing::kFixtureDir, "--index", "3"});
    CHECK(r.code == 2);
    r = run({"frobnicate"});
    CHECK(r.code == 2);
    r = run({});
    CHECK(r.code == 2);
  }

  TEST_CASE("classify honours the restricted grid and echoes it") {
    const auto r = run({"classify", "--dataset", "TWOGRAPH", "--data-dir", testing::kFixtureDir, "--mode", "opt-h0",
                        "--repeats", "1", "--folds", "2", "--inner-folds", "2", "--grid-k", "0..1", "--trees",
                        "10,50", "--seed", "7"});
    // Two graphs cannot fill two stratified folds per class.
    CHECK(r.code != 0);

    const fs::path dir = scratch_dir("classify");
    GraphDataset ds = parse_tu_dataset(fs::path(testing::kFixtureDir) / "TWOGRAPH", "TWOGRAPH");
    const auto base = ds.graphs;
    for (int i = 0; i < 9; ++i) ds.graphs.insert(ds.graphs.end(), base.begin(), base.end());
    ds.name = "TWENTY";
    fs::create_directories(dir / "TWENTY");
    write_tu_dataset(ds, dir / "TWENTY");
    const fs::path report = dir / "report.json";
    const auto ok = run({"classify", "--dataset", "TWENTY", "--data-dir", dir.string(), "--mode", "opt-h0,h1",
                         "--repeats", "1", "--folds", "2", "--inner-folds", "2", "--grid-k", "0..1", "--trees",
                         "10,50", "--seed", "7", "--out-path", report.string()});
    REQUIRE(ok.code == 0);
    std::ifstream in(report);
    const json doc = json::parse(in);
    CHECK(doc["manifest"]["config"]["grid_k"] == json::array({0, 1}));
    CHECK(doc["manifest"]["config"]["trees"] == json::array({10, 50}));
    CHECK(doc["manifest"]["seed"] == 7);
    REQUIRE(doc["reports"].size() == 2);
    for (const auto& rep : doc["reports"]) {
      for (const auto& row : rep["chosen"]) {
        for (const auto& c : row) {
          CHECK(c["k1"].get<int>() <= 1);
          CHECK(c["k2"].get<int>() <= 1);
          CHECK((c["trees"] == 10 || c["trees"] == 50));
        }
      }
    }
    CHECK(fs::exists(dir / "report.json.manifest.json"));
  }

  TEST_CASE("inspect reproduces the component table and spectral values") {
    const auto r = run({"inspect", "--dataset", "WORKED", "--data-dir", testing::kFixtureDir, "--k1", "0", "--k2",
                        "1", "--tau", "0", "--out", "json"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    std::vector<int> comps;
    std::vector<int> cycles;
    for (const auto& row : doc["betti"]) {
      comps.push_back(row["components"]);
      cycles.push_back(row["cycles"]);
    }
    CHECK(comps == std::vector<int>{4, 3, 2, 1, 1});
    CHECK(cycles == std::vector<int>{0, 0, 0, 0, 1});
    const double mu2 = doc["mu2"];
    CHECK(std::abs(mu2 - testing::dense_mu2(testing::dense_transition(testing::worked_example()))) <= 1e-10);

    const auto text = run({"inspect", "--dataset", "WORKED", "--data-dir", testing::kFixtureDir, "--k2", "1"});
    REQUIRE(text.code == 0);
    CHECK(text.out.find("mu2 = 0.4919248460") != std::string::npos);
  }

  TEST_CASE("inspect on random small graphs: trees have no cycles, mu2 matches the dense oracle") {
    std::mt19937_64 rng(73);
    const fs::path dir = scratch_dir("inspect");
    GraphDataset ds;
    ds.name = "RAND";
    for (int i = 0; i < 12; ++i) {
      Graph g = testing::random_graph(2 + i % 11, i % 2 == 0 ? 0.0 : 0.4, true, rng);
      g.discrete_labels = std::vector<int>(static_cast<std::size_t>(g.node_count));
      for (int v = 0; v < g.node_count; ++v) (*g.discrete_labels)[v] = v % 3;
      g.graph_label = i % 2;
      ds.graphs.push_back(g);
    }
    ds.refresh_metadata();
    write_tu_dataset(ds, dir);
    for (int i = 0; i < 12; ++i) {
      CAPTURE(i);
      const auto r = run({"inspect", "--dataset", "RAND", "--data-dir", dir.string(), "--index", std::to_string(i),
                          "--k2", "2", "--out", "json"});
      REQUIRE(r.code == 0);
      const json doc = json::parse(r.out);
      if (i % 2 == 0) {
        for (const auto& row : doc["betti"]) CHECK(row["cycles"] == 0);
      }
      const double want = testing::dense_mu2(testing::dense_transition(ds.graphs[static_cast<std::size_t>(i)]));
      CHECK(std::abs(doc["mu2"].get<double>() - want) <= 1e-8);
    }
  }

  TEST_CASE("bench on an empty dataset prints only the header") {
    const fs::path dir = scratch_dir("bench");
    std::ofstream(dir / "EMPTY_A.txt").close();
    std::ofstream(dir / "EMPTY_graph_indicator.txt").close();
    const auto r = run({"bench", "--dataset", "EMPTY", "--data-dir", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out == "k1,k2,graphs,edges,feature_width,seconds\n");
  }

  TEST_CASE("bench rows follow the requested grid") {
    const auto r = run({"bench", "--dataset", "WORKED", "--data-dir", testing::kFixtureDir, "--k1-list", "0,1",
                        "--k2-list", "2", "--repeats", "1"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].rfind("0,2,1,4,3,", 0) == 0);
    CHECK(rows[2].rfind("1,2,1,4,3,", 0) == 0);
  }

  TEST_CASE("CSV and JSON outputs round-trip bit-exactly") {
    const auto ds = parse_tu_dataset(fs::path(testing::kDataDir) / "MUTAG", "MUTAG");
    PwlrConfig cfg;
    cfg.k1 = 3;
    cfg.k2 = 7;
    cfg.mode = EmbeddingMode::H0H1;
    const auto table = to_table(embed_dataset(ds, cfg));

    std::stringstream csv;
    write_embedding_csv(csv, table, "comment line");
    const auto back = read_embedding_csv(csv);
    CHECK(back.columns == table.columns);
    CHECK(back.ids == table.ids);
    CHECK(back.labels == table.labels);
    CHECK((back.values.array() == table.values.array()).all());

    std::stringstream js;
    write_embedding_json(js, table);
    const auto jback = read_embedding_json(js);
    CHECK(jback.ids == table.ids);
    CHECK(jback.labels == table.labels);
    CHECK((jback.values.array() == table.values.array()).all());

    const fs::path dir = scratch_dir("roundtrip");
    const auto r = run({"embed", "--dataset", "MUTAG", "--data-dir", testing::kDataDir, "--mode", "h0h1", "--k1",
                        "3", "--k2", "7", "--out", "json", "--out-path", (dir / "e.json").string()});
    REQUIRE(r.code == 0);
    std::ifstream f(dir / "e.json");
    const auto cli_table = read_embedding_json(f);
    CHECK((cli_table.values.array() == table.values.array()).all());
    CHECK(fs::exists(dir / "e.json.manifest.json"));
  }

  TEST_CASE("thread count does not change output") {
    auto a = run({"embed", "--dataset", "MUTAG", "--data-dir", testing::kDataDir, "--mode", "opt-h0h1", "--k1", "2",
                  "--k2", "2", "--threads", "1"});
    auto b = run({"embed", "--dataset", "MUTAG", "--data-dir", testing::kDataDir, "--mode", "opt-h0h1", "--k1", "2",
                  "--k2", "2", "--threads", "3"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    auto strip = [](const std::string& s) { return s.substr(s.find('\n') + 1); };
    CHECK(strip(a.out) == strip(b.out));
  }
}
