#include "pwlr/diffusion.hpp"

#include "pwlr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pwlr {

TransitionMatrix::TransitionMatrix(SparseMatrix matrix, std::vector<double> weighted_degrees,
                                   std::vector<int> component_ids)
    : matrix_(std::move(matrix)), degrees_(std::move(weighted_degrees)), components_(std::move(component_ids)) {
  component_count_ = components_.empty() ? 0 : *std::max_element(components_.begin(), components_.end()) + 1;
}

TransitionMatrix build_transition_matrix(const Graph& g) {
  g.validate();
  const auto n = static_cast<Eigen::Index>(g.node_count);
  std::vector<double> deg = g.weighted_degrees();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.edges.size() * 2 + static_cast<std::size_t>(n));
  for (Eigen::Index v = 0; v < n; ++v) triplets.emplace_back(v, v, 1.0 / (deg[v] + 1.0));
  for (const Edge& e : g.edges) {
    triplets.emplace_back(e.u, e.v, e.weight / (deg[e.u] + 1.0));
    triplets.emplace_back(e.v, e.u, e.weight / (deg[e.v] + 1.0));
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return TransitionMatrix(std::move(m), std::move(deg), g.component_ids());
}

FeatureMatrix wl_propagate(const TransitionMatrix& m, const FeatureMatrix& x, int k1) {
  if (k1 < 0) throw ValidationError("k1 must be nonnegative");
  if (x.orientation != Orientation::NodeMajor) throw ValidationError("wl_propagate expects node-major features");
  if (x.values.rows() != m.dim()) {
    throw ValidationError("feature rows (" + std::to_string(x.values.rows()) + ") differ from |V| (" +
                          std::to_string(m.dim()) + ")");
  }
  FeatureMatrix out = x;
  DenseMatrix next(out.values.rows(), out.values.cols());
  for (int i = 0; i < k1; ++i) {
    next.noalias() = m.matrix() * out.values;
    out.values.swap(next);
  }
  return out;
}

DenseMatrix normalized_wl_step(const Graph& g, const DenseMatrix& labels) {
  if (labels.rows() != g.node_count) throw ValidationError("label rows differ from node count");
  if ((labels.array() < 0.0).any()) throw ValidationError("normalized WL requires nonnegative labels");

  // Closed neighbourhood N[v] with a~_vv = 1.
  std::vector<std::vector<std::pair<int, double>>> nbhd(static_cast<std::size_t>(g.node_count));
  for (int v = 0; v < g.node_count; ++v) nbhd[v].emplace_back(v, 1.0);
  for (const Edge& e : g.edges) {
    nbhd[e.u].emplace_back(e.v, e.weight);
    nbhd[e.v].emplace_back(e.u, e.weight);
  }

  DenseMatrix out(labels.rows(), labels.cols());
  for (int v = 0; v < g.node_count; ++v) {
    Eigen::RowVectorXd numerator = Eigen::RowVectorXd::Zero(labels.cols());
    double mass = 0.0;
    for (const auto& [w, a] : nbhd[v]) {
      numerator += a * labels.row(w);
      mass += a * labels.row(w).lpNorm<1>();
    }
    if (mass == 0.0) {
      throw DegenerateLabelError("node " + std::to_string(v) + " has zero neighbourhood label mass");
    }
    out.row(v) = numerator / mass;
  }
  return out;
}

FeatureMatrix rw_propagate(const FeatureMatrix& y, const TransitionMatrix& m, int k2) {
  if (k2 < 0) throw ValidationError("k2 must be nonnegative");
  if (y.orientation != Orientation::FeatureMajor) throw ValidationError("rw_propagate expects feature-major features");
  if (y.values.cols() != m.dim()) {
    throw ValidationError("feature columns (" + std::to_string(y.values.cols()) + ") differ from |V| (" +
                          std::to_string(m.dim()) + ")");
  }
  FeatureMatrix out = y;
  DenseMatrix next(out.values.rows(), out.values.cols());
  for (int i = 0; i < k2; ++i) {
    next.noalias() = out.values * m.matrix();
    out.values.swap(next);
  }
  return out;
}

FeatureMatrix rw_limit(const FeatureMatrix& y, const TransitionMatrix& m) {
  if (y.orientation != Orientation::FeatureMajor) throw ValidationError("rw_limit expects feature-major features");
  if (y.values.cols() != m.dim()) throw ValidationError("feature columns differ from |V|");
  const Eigen::VectorXd pi = stationary_distribution(m);
  const Eigen::VectorXd mass = y.values.rowwise().sum();
  return {mass * pi.transpose(), Orientation::FeatureMajor};
}

Eigen::VectorXd stationary_distribution(const TransitionMatrix& m) {
  if (m.dim() == 0) return Eigen::VectorXd();
  if (!m.connected()) {
    throw ValidationError("graph has " + std::to_string(m.component_count()) +
                          " components; call stationary_distributions_by_component");
  }
  const auto& deg = m.weighted_degrees();
  Eigen::VectorXd pi(m.dim());
  for (Eigen::Index v = 0; v < m.dim(); ++v) pi[v] = deg[v] + 1.0;
  return pi / pi.sum();
}

std::vector<ComponentDistribution> stationary_distributions_by_component(const TransitionMatrix& m) {
  std::vector<ComponentDistribution> out(static_cast<std::size_t>(m.component_count()));
  const auto& comp = m.component_ids();
  for (Eigen::Index v = 0; v < m.dim(); ++v) out[comp[v]].nodes.push_back(static_cast<int>(v));
  const auto& deg = m.weighted_degrees();
  for (auto& c : out) {
    c.pi.resize(static_cast<Eigen::Index>(c.nodes.size()));
    for (std::size_t i = 0; i < c.nodes.size(); ++i) c.pi[static_cast<Eigen::Index>(i)] = deg[c.nodes[i]] + 1.0;
    c.pi /= c.pi.sum();
  }
  return out;
}

double second_eigenvalue(const TransitionMatrix& m, const PowerIterationOptions& options) {
  const Eigen::Index n = m.dim();
  if (n == 0) throw ValidationError("empty graph has no spectrum");
  const Eigen::VectorXd pi = stationary_distribution(m);
  if (n == 1) return 0.0;

  // <x, y>_pi = sum_v pi_v x_v y_v; B x = M x - (pi^T x) 1.
  auto pi_norm = [&](const Eigen::VectorXd& x) { return std::sqrt((pi.array() * x.array().square()).sum()); };
  auto deflate = [&](Eigen::VectorXd& x) { x.array() -= pi.dot(x); };
  auto apply_b = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = m.matrix() * x;
    deflate(y);
    return y;
  };

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = unif(rng);
  deflate(x);
  double norm = pi_norm(x);
  if (norm == 0.0) return 0.0;
  x /= norm;

  double residual = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd bx = apply_b(x);
    const double theta = (pi.array() * bx.array().square()).sum();  // <x, B^2 x>_pi
    const Eigen::VectorXd bbx = apply_b(bx);
    residual = pi_norm(bbx - theta * x);
    if (residual <= options.tolerance) return std::sqrt(std::max(theta, 0.0));
    norm = pi_norm(bbx);
    if (norm == 0.0) return 0.0;
    x = bbx / norm;
    deflate(x);  // keep rounding from reintroducing the unit eigenvector
    x /= pi_norm(x);
  }
  throw NumericalError("second_eigenvalue did not converge after " + std::to_string(options.max_iterations) +
                           " iterations (residual " + std::to_string(residual) + ")",
                       residual);
}

SpectralSummary spectral_summary(const TransitionMatrix& m, const PowerIterationOptions& options) {
  return {stationary_distribution(m), second_eigenvalue(m, options)};
}

ErgodicityProfile ergodicity_profile(const TransitionMatrix& m, int k_max) {
  if (k_max < 0) throw ValidationError("k_max must be nonnegative");
  const Eigen::RowVectorXd pi = stationary_distribution(m).transpose();
  const Eigen::RowVectorXd inv_sqrt_pi = pi.cwiseSqrt().cwiseInverse();
  ErgodicityProfile out;
  DenseMatrix power = DenseMatrix::Identity(m.dim(), m.dim());
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) power = power * m.matrix();
    const DenseMatrix diff = power.rowwise() - pi;
    out.l1.push_back(diff.cwiseAbs().rowwise().sum().maxCoeff());
    out.chi2.push_back((diff.array().rowwise() * inv_sqrt_pi.array()).matrix().rowwise().norm().maxCoeff());
  }
  return out;
}

}  // namespace pwlr
