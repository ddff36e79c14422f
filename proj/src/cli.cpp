#include "pwlr/cli.hpp"

#include "pwlr/diffusion.hpp"
#include "pwlr/embedding_io.hpp"
#include "pwlr/errors.hpp"
#include "pwlr/evalkit.hpp"
#include "pwlr/filtration.hpp"
#include "pwlr/graph_io.hpp"
#include "pwlr/pipeline.hpp"
#include "pwlr_version.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace pwlr::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Options {
  std::string dataset;
  std::string data_dir;
  std::string mode = "h0";
  int k1 = 0;
  int k2 = 0;
  double p = 1.0;
  double tau = 1.0;
  std::string feature_mode = "discrete";
  bool md_preprocess = false;
  int repeats = 10;
  int folds = 10;
  int inner_folds = 5;
  std::string grid_k = "0..29";
  std::string trees = "10,25,50,100,150,200";
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
  std::string out_path;
  int index = 0;
  std::string k1_list = "0";
  std::string k2_list = "4,8,16,32";
  int bench_repeats = 3;
};

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(std::string(flag) + ": expected comma-separated integers, got '" + text + "'");
    }
  }
  if (out.empty()) throw ValidationError(std::string(flag) + ": empty list");
  return out;
}

std::vector<int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return parse_int_list(text, "--grid-k");
  int lo = 0;
  int hi = 0;
  try {
    lo = std::stoi(text.substr(0, dots));
    hi = std::stoi(text.substr(dots + 2));
  } catch (const std::exception&) {
    throw ValidationError("--grid-k: expected A..B, got '" + text + "'");
  }
  if (lo < 0 || hi < lo) throw ValidationError("--grid-k: need 0 <= A <= B");
  std::vector<int> out;
  for (int k = lo; k <= hi; ++k) out.push_back(k);
  return out;
}

std::vector<EmbeddingMode> parse_modes(const std::string& text) {
  std::vector<EmbeddingMode> modes;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) modes.push_back(parse_embedding_mode(item));
  if (modes.empty()) throw ValidationError("--mode: empty");
  return modes;
}

fs::path resolve_dataset_dir(const Options& o) {
  fs::path base = o.data_dir;
  if (base.empty()) {
    const char* env = std::getenv("PWLR_DATA_DIR");
    base = env ? fs::path(env) : fs::path("data");
  }
  if (fs::exists(base / o.dataset / (o.dataset + "_A.txt"))) return base / o.dataset;
  if (fs::exists(base / (o.dataset + "_A.txt"))) return base;
  throw IoError("dataset directory not found: " + (base / o.dataset).string());
}

PwlrConfig make_config(const Options& o) {
  PwlrConfig cfg;
  cfg.k1 = o.k1;
  cfg.k2 = o.k2;
  cfg.p = o.p;
  cfg.tau = o.tau;
  cfg.mode = parse_embedding_mode(o.mode.substr(0, o.mode.find(',')));
  cfg.feature_mode = parse_feature_mode(o.feature_mode);
  cfg.md_preprocess = o.md_preprocess;
  cfg.max_iterations = std::max({cfg.max_iterations, o.k1, o.k2});
  return cfg;
}

json config_json(const PwlrConfig& cfg) {
  return {{"k1", cfg.k1},
          {"k2", cfg.k2},
          {"p", std::isfinite(cfg.p) ? json(cfg.p) : json("inf")},
          {"tau", cfg.tau},
          {"mode", std::string(to_string(cfg.mode))},
          {"feature_mode", std::string(to_string(cfg.feature_mode))},
          {"md_preprocess", cfg.md_preprocess}};
}

json manifest(const std::string& command, const Options& o, json config, json timings) {
  return {{"tool", "pwlr"},
          {"version", PWLR_VERSION},
          {"command", command},
          {"dataset", o.dataset},
          {"config", std::move(config)},
          {"seed", o.seed},
          {"threads", o.threads},
          {"timings", std::move(timings)}};
}

/// Writes `body` to --out-path (plus a sidecar manifest) or to `out`.
void emit(const Options& o, std::ostream& out, std::ostream& err, const std::string& body, const json& man) {
  if (o.out_path.empty()) {
    out << body;
    err << "manifest: " << man.dump() << '\n';
    return;
  }
  std::ofstream file(o.out_path);
  if (!file) throw IoError("cannot write " + o.out_path);
  file << body;
  std::ofstream mf(o.out_path + ".manifest.json");
  mf << man.dump(2) << '\n';
}

GraphDataset load(const Options& o) { return parse_tu_dataset(resolve_dataset_dir(o), o.dataset); }

int cmd_embed(const Options& o, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  const GraphDataset ds = load(o);
  const double t_load = seconds_since(t0);
  const PwlrConfig cfg = make_config(o);
  const auto t1 = Clock::now();
  const DatasetEmbedding emb = embed_dataset(ds, cfg, o.threads);
  const double t_embed = seconds_since(t1);

  const json man = manifest("embed", o, config_json(cfg), {{"load", t_load}, {"embed", t_embed}});
  std::ostringstream body;
  const auto table = to_table(emb);
  if (o.out == "json") {
    write_embedding_json(body, table);
  } else {
    write_embedding_csv(body, table, "manifest: " + man.dump());
  }
  emit(o, out, err, body.str(), man);
  for (const auto& w : ds.warnings) err << "warning: " << w << '\n';
  return kSuccess;
}

int cmd_classify(const Options& o, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  const GraphDataset ds = load(o);
  const double t_load = seconds_since(t0);

  CvOptions cv;
  cv.repeats = o.repeats;
  cv.folds = o.folds;
  cv.inner_folds = o.inner_folds;
  cv.k1_values = parse_range(o.grid_k);
  cv.k2_values = cv.k1_values;
  cv.tree_counts = parse_int_list(o.trees, "--trees");
  cv.seed = o.seed;
  cv.threads = o.threads;
  cv.validate();

  PwlrConfig base = make_config(o);
  base.max_iterations = std::max(base.max_iterations, cv.k1_values.back());
  const auto modes = parse_modes(o.mode);
  const auto t1 = Clock::now();
  const auto reports = cross_validate(ds, modes, base, cv);
  const double t_cv = seconds_since(t1);

  json config = config_json(base);
  config.erase("k1");
  config.erase("k2");
  config["modes"] = o.mode;
  config["grid_k"] = cv.k1_values;
  config["trees"] = cv.tree_counts;
  config["repeats"] = cv.repeats;
  config["folds"] = cv.folds;
  config["inner_folds"] = cv.inner_folds;
  const json man = manifest("classify", o, config, {{"load", t_load}, {"cross_validate", t_cv}});

  std::ostringstream body;
  if (o.out == "csv") {
    body << "# manifest: " << man.dump() << '\n';
    body << "mode,repeat,fold,accuracy,k1,k2,trees\n";
    for (const auto& r : reports) {
      for (std::size_t rep = 0; rep < r.fold_accuracies.size(); ++rep) {
        for (std::size_t f = 0; f < r.fold_accuracies[rep].size(); ++f) {
          const auto& c = r.chosen[rep][f];
          body << r.mode << ',' << rep << ',' << f << ',' << std::setprecision(17) << r.fold_accuracies[rep][f] << ','
               << c.k1 << ',' << c.k2 << ',' << c.trees << '\n';
        }
      }
    }
  } else {
    json arr = json::array();
    for (const auto& r : reports) {
      json chosen = json::array();
      for (const auto& rep : r.chosen) {
        json row = json::array();
        for (const auto& c : rep) row.push_back({{"k1", c.k1}, {"k2", c.k2}, {"trees", c.trees}});
        chosen.push_back(row);
      }
      arr.push_back({{"mode", r.mode},
                     {"mean", r.mean},
                     {"std", r.std},
                     {"fold_accuracies", r.fold_accuracies},
                     {"chosen", chosen},
                     {"runtime_seconds", r.runtime_seconds}});
    }
    body << json{{"manifest", man}, {"reports", arr}}.dump(2) << '\n';
  }
  emit(o, out, err, body.str(), man);
  for (const auto& r : reports) {
    char line[128];
    std::snprintf(line, sizeof line, "%s: %.2f +- %.2f %%\n", r.mode.c_str(), 100.0 * r.mean, 100.0 * r.std);
    err << line;
  }
  return kSuccess;
}

void print_matrix(std::ostream& os, const DenseMatrix& m) {
  char buf[32];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << "  ";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%10.6f", m(r, c));
      os << buf << (c + 1 < m.cols() ? " " : "");
    }
    os << '\n';
  }
}

void print_vector(std::ostream& os, const char* name, const std::vector<double>& v) {
  char buf[32];
  os << name << " = (";
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f", v[i]);
    os << (i ? ", " : "") << buf;
  }
  os << ")\n";
}

int cmd_inspect(const Options& o, std::ostream& out, std::ostream& err) {
  const GraphDataset ds = load(o);
  if (o.index < 0 || static_cast<std::size_t>(o.index) >= ds.graphs.size()) {
    throw ValidationError("graph index " + std::to_string(o.index) + " out of range (dataset has " +
                          std::to_string(ds.graphs.size()) + " graphs)");
  }
  const PwlrConfig cfg = make_config(o);
  const Graph g = cfg.md_preprocess ? preprocess_md(ds.graphs[o.index]) : ds.graphs[o.index];
  PwlrConfig inner = cfg;
  inner.md_preprocess = false;
  const FeatureMatrix x = encode_graph_features(g, ds.label_vocabulary, cfg.feature_mode);
  const TransitionMatrix m = build_transition_matrix(g);
  const GraphEmbedding ge = embed_graph(g, x, inner);
  const auto prefixes = betti_prefixes(ge.summary);

  std::optional<SpectralSummary> spectral;
  std::string spectral_note;
  if (m.connected() && g.node_count > 0) {
    try {
      spectral = spectral_summary(m);
    } catch (const NumericalError& e) {
      spectral_note = e.what();
    }
  } else {
    spectral_note = "graph is disconnected (" + std::to_string(m.component_count()) + " components)";
  }

  if (o.out == "json") {
    json events = json::array();
    for (const auto& ev : ge.summary.events) {
      const Edge& e = g.edges[ev.edge];
      events.push_back({{"u", e.u},
                        {"v", e.v},
                        {"height", ev.height},
                        {"kind", ev.kind == EventKind::Merge ? "H0" : "H1"},
                        {"degrees", {ev.degrees.low, ev.degrees.high}}});
    }
    json table = json::array();
    for (const auto& p : prefixes) {
      table.push_back({{"edges", p.edges}, {"height", p.height}, {"components", p.beta0}, {"cycles", p.beta1}});
    }
    json vocab = json::array();
    for (const auto& t : ge.local_vocab) vocab.push_back({t.low, t.high});
    auto rows = [](const DenseMatrix& d) {
      json a = json::array();
      for (Eigen::Index r = 0; r < d.rows(); ++r) a.push_back(std::vector<double>(d.row(r).begin(), d.row(r).end()));
      return a;
    };
    json doc{{"graph", o.index},
             {"config", config_json(cfg)},
             {"transition_matrix", rows(m.dense())},
             {"features", rows(ge.features.values)},
             {"events", events},
             {"betti", table},
             {"phi_h0", ge.sorted.h0},
             {"phi_h1", ge.sorted.h1},
             {"degree_tuples", vocab},
             {"opt_h0", ge.reduced.h0},
             {"opt_h1", ge.reduced.h1}};
    if (spectral) {
      doc["stationary"] = std::vector<double>(spectral->stationary.begin(), spectral->stationary.end());
      doc["mu2"] = spectral->mu2;
    } else {
      doc["spectral_note"] = spectral_note;
    }
    out << doc.dump(2) << '\n';
    return kSuccess;
  }

  out << "graph " << o.index << " of " << ds.name << ": |V| = " << g.node_count << ", |E| = " << g.edges.size()
      << ", k1 = " << cfg.k1 << ", k2 = " << cfg.k2 << ", p = " << cfg.p << ", tau = " << cfg.tau << "\n\n";
  out << "transition matrix M:\n";
  print_matrix(out, m.dense());
  out << "\npropagated features (M^k1 X)^T M^k2:\n";
  print_matrix(out, ge.features.values);
  if (spectral) {
    std::vector<double> pi(spectral->stationary.begin(), spectral->stationary.end());
    out << '\n';
    print_vector(out, "stationary pi", pi);
    char buf[64];
    std::snprintf(buf, sizeof buf, "mu2 = %.10f\n", spectral->mu2);
    out << buf;
  } else {
    out << "\nspectral: " << spectral_note << '\n';
  }
  out << "\nedges by height:\n";
  char buf[128];
  for (const auto& ev : ge.summary.events) {
    const Edge& e = g.edges[ev.edge];
    std::snprintf(buf, sizeof buf, "  (%d,%d)  h = %.6f  %s  degrees %s\n", e.u, e.v, ev.height,
                  ev.kind == EventKind::Merge ? "H0" : "H1", to_string(ev.degrees).c_str());
    out << buf;
  }
  out << "\nprefix  height      components  cycles\n";
  for (const auto& p : prefixes) {
    std::snprintf(buf, sizeof buf, "  %-5zu %-11.6f %-11d %d\n", p.edges, p.height, p.beta0, p.beta1);
    out << buf;
  }
  out << '\n';
  print_vector(out, "phi_H0", ge.sorted.h0);
  print_vector(out, "phi_H1", ge.sorted.h1);
  out << "degree tuples = (";
  for (std::size_t i = 0; i < ge.local_vocab.size(); ++i) out << (i ? ", " : "") << to_string(ge.local_vocab[i]);
  out << ")\n";
  print_vector(out, "opt_H0", ge.reduced.h0);
  print_vector(out, "opt_H1", ge.reduced.h1);
  (void)err;
  return kSuccess;
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  const GraphDataset ds = load(o);
  const auto k1s = parse_int_list(o.k1_list, "--k1-list");
  const auto k2s = parse_int_list(o.k2_list, "--k2-list");
  PwlrConfig cfg = make_config(o);
  for (int k : k1s) cfg.max_iterations = std::max(cfg.max_iterations, k);
  for (int k : k2s) cfg.max_iterations = std::max(cfg.max_iterations, k);

  std::size_t edges = 0;
  for (const auto& g : ds.graphs) edges += g.edges.size();
  const auto features = ds.graphs.empty() ? std::vector<FeatureMatrix>{} : encode_features(ds, cfg.feature_mode);
  const Eigen::Index width = features.empty() ? 0 : features.front().feature_count();

  std::ostringstream body;
  body << "k1,k2,graphs,edges,feature_width,seconds\n";
  json rows = json::array();
  if (!ds.graphs.empty()) {
    for (int k1 : k1s) {
      for (int k2 : k2s) {
        cfg.k1 = k1;
        cfg.k2 = k2;
        double best = 0.0;
        for (int rep = 0; rep < o.bench_repeats; ++rep) {
          const auto t0 = Clock::now();
          const auto emb = embed_dataset(ds, cfg, o.threads);
          const double s = seconds_since(t0);
          if (rep == 0 || s < best) best = s;
          if (emb.vectors.rows() != static_cast<Eigen::Index>(ds.graphs.size())) throw Error("embedding size mismatch");
        }
        char line[160];
        std::snprintf(line, sizeof line, "%d,%d,%zu,%zu,%ld,%.6f\n", k1, k2, ds.graphs.size(), edges,
                      static_cast<long>(width), best);
        body << line;
      }
    }
  }
  const json man = manifest("bench", o, config_json(cfg), json::object());
  emit(o, out, err, body.str(), man);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Persistent WL random-walk graph embeddings", "pwlr"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--dataset", o.dataset, "Dataset name (TU layout)")->required();
    sub->add_option("--data-dir", o.data_dir, "Directory holding <name>/ or the files (default $PWLR_DATA_DIR or ./data)");
    sub->add_option("--p", o.p, "Norm order for edge heights")->check(CLI::Range(1.0, std::numeric_limits<double>::infinity()));
    sub->add_option("--tau", o.tau, "Bias added to each height");
    sub->add_option("--feature-mode", o.feature_mode, "discrete | continuous | both")
        ->check(CLI::IsMember({"discrete", "continuous", "both"}));
    sub->add_flag("--md-preprocess", o.md_preprocess, "Drop zero-weight edges and invert weights");
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out-path", o.out_path, "Output file (default stdout)");
  };
  const auto mode_check = CLI::IsMember({"h0", "h1", "h0h1", "opt-h0", "opt-h1", "opt-h0h1"});

  auto* embed = app.add_subcommand("embed", "Write per-graph embedding vectors");
  add_common(embed);
  embed->add_option("--mode", o.mode, "h0 | h1 | h0h1 | opt-h0 | opt-h1 | opt-h0h1")->check(mode_check);
  embed->add_option("--k1", o.k1, "WL iterations")->check(CLI::NonNegativeNumber);
  embed->add_option("--k2", o.k2, "Random-walk iterations")->check(CLI::NonNegativeNumber);
  embed->add_option("--out", o.out, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  auto* classify = app.add_subcommand("classify", "Repeated stratified CV with inner grid search");
  add_common(classify);
  classify->add_option("--mode", o.mode, "Comma-separated embedding modes");
  classify->add_option("--repeats", o.repeats, "Outer CV repetitions")->check(CLI::PositiveNumber);
  classify->add_option("--folds", o.folds, "Outer folds")->check(CLI::Range(2, 1000));
  classify->add_option("--inner-folds", o.inner_folds, "Inner folds")->check(CLI::Range(2, 1000));
  classify->add_option("--grid-k", o.grid_k, "k1/k2 grid, A..B or list");
  classify->add_option("--trees", o.trees, "Comma-separated tree counts");
  classify->add_option("--out", o.out, "json | csv")->check(CLI::IsMember({"csv", "json"}));

  auto* inspect = app.add_subcommand("inspect", "Print the intermediate quantities for one graph");
  add_common(inspect);
  inspect->add_option("--index", o.index, "Graph index (0-based)");
  inspect->add_option("--k1", o.k1)->check(CLI::NonNegativeNumber);
  inspect->add_option("--k2", o.k2)->check(CLI::NonNegativeNumber);
  inspect->add_option("--out", o.out, "text | json")->check(CLI::IsMember({"text", "json"}));

  auto* bench = app.add_subcommand("bench", "Time dataset embedding over k1/k2");
  add_common(bench);
  bench->add_option("--mode", o.mode)->check(mode_check);
  bench->add_option("--k1-list", o.k1_list, "Comma-separated k1 values");
  bench->add_option("--k2-list", o.k2_list, "Comma-separated k2 values");
  bench->add_option("--repeats", o.bench_repeats, "Timing repetitions (minimum is reported)")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kSuccess;
    }
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (embed->parsed()) {
      if (o.out.empty()) o.out = "csv";
      return cmd_embed(o, out, err);
    }
    if (classify->parsed()) {
      if (o.out.empty()) o.out = "json";
      return cmd_classify(o, out, err);
    }
    if (inspect->parsed()) {
      if (o.out.empty()) o.out = "text";
      return cmd_inspect(o, out, err);
    }
    if (bench->parsed()) return cmd_bench(o, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsage;
}

}  // namespace pwlr::cli
