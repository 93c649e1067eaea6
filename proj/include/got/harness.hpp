#pragma once

// Synthetic alignment experiments with a known correspondence, and the plan
// quality metrics used to judge them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "got/core.hpp"
#include "got/error.hpp"
#include "got/fused.hpp"
#include "got/matrix.hpp"

namespace got::harness {

/// y[correspondence[i]] = rotation * x[i] + noise.
struct SyntheticPair {
  EmbeddingSet x;
  EmbeddingSet y;
  Permutation correspondence;
  Matrix rotation;  // d x d orthogonal
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  /// Projections that map y back into x's frame (x' = x, y' = R^T y), standing
  /// in for trained domain encoders.
  ProjectionPair aligning_projection() const { return {std::nullopt, transpose(rotation)}; }
};

struct PlanMetrics {
  double row_argmax_accuracy = 0.0;
  std::size_t nonzeros_above_eps = 0;
  double entropy = 0.0;  // -sum T log T
  double marginal_violation = 0.0;
};

inline constexpr double kNonzeroRelativeThreshold = 1e-4;

namespace detail {

// Gram-Schmidt on the columns of a Gaussian matrix; columns come out orthonormal.
inline Matrix random_orthogonal(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(d, d);
  for (double& v : a.data()) v = normal(rng);
  for (std::size_t j = 0; j < d; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < d; ++i) dot += a(i, k) * a(i, j);
        for (std::size_t i = 0; i < d; ++i) a(i, j) -= dot * a(i, k);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) norm += a(i, j) * a(i, j);
    norm = std::sqrt(norm);
    got::detail::require(norm > 1e-12, "random_orthogonal: degenerate draw");
    for (std::size_t i = 0; i < d; ++i) a(i, j) /= norm;
  }
  return a;
}

}  // namespace detail

/// Deterministic in (n, d, noise_sigma, seed, shuffle). With shuffle off the
/// correspondence is the identity.
inline SyntheticPair generate_pair(std::size_t n, std::size_t d, double noise_sigma,
                                   std::uint64_t seed, bool shuffle = true) {
  got::detail::require(n >= 2, "generate_pair: n must be >= 2");
  got::detail::require(d >= 2, "generate_pair: d must be >= 2");
  got::detail::require(std::isfinite(noise_sigma) && noise_sigma >= 0.0,
                       "generate_pair: noise_sigma must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix x(n, d);
  for (double& v : x.data()) v = normal(rng);
  Matrix rotation = detail::random_orthogonal(d, rng);

  Permutation corr = identity_permutation(n);
  if (shuffle) std::shuffle(corr.begin(), corr.end(), rng);

  Matrix rx = matmul_transposed(x, rotation);  // row i = R x_i
  Matrix y(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      const double z = normal(rng);
      y(corr[i], k) = rx(i, k) + noise_sigma * z;
    }
  return SyntheticPair{EmbeddingSet(std::move(x)), EmbeddingSet(std::move(y)), std::move(corr),
                       std::move(rotation), noise_sigma, seed};
}

inline PlanMetrics evaluate_plan(const TransportPlan& plan, const Permutation& truth) {
  got::detail::require(truth.size() == plan.rows(),
                       "evaluate_plan: truth has " + std::to_string(truth.size()) +
                           " entries but plan has " + std::to_string(plan.rows()) + " rows");
  got::detail::require(std::all_of(truth.begin(), truth.end(),
                                   [&](std::size_t j) { return j < plan.cols(); }),
                       "evaluate_plan: truth index outside plan columns");
  const Matrix& t = plan.entries();
  double peak = 0.0;
  for (double v : t.data()) peak = std::max(peak, v);

  PlanMetrics m;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    auto r = t.row(i);
    const auto best = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
    if (best == truth[i]) ++hits;
  }
  m.row_argmax_accuracy = static_cast<double>(hits) / static_cast<double>(t.rows());
  for (double v : t.data()) {
    if (v > kNonzeroRelativeThreshold * peak) ++m.nonzeros_above_eps;
    if (v > 0.0) m.entropy -= v * std::log(v);
  }
  m.marginal_violation = plan.marginal_violation();
  return m;
}

struct SweepRow {
  double lambda = 0.0;
  double distance = 0.0;
  PlanMetrics metrics;
};

/// One fused solve per lambda on a fixed pair, using the pair's aligning
/// projection. Graphs and the cross cost are built once.
inline std::vector<SweepRow> run_sweep(const std::vector<double>& lambdas,
                                       const SolverConfig& config, const SyntheticPair& pair) {
  for (double l : lambdas)
    got::detail::require(l >= 0.0 && l <= 1.0, "run_sweep: lambda values must lie in [0, 1]");
  config.validate();
  const SimilarityMatrix cx = domain_graph(pair.x, config);
  const SimilarityMatrix cy = domain_graph(pair.y, config);
  const ProjectionPair proj = pair.aligning_projection();
  const CostMatrix cross = cosine_cost_matrix(proj.apply_x(pair.x), proj.apply_y(pair.y));

  std::vector<SweepRow> rows;
  rows.reserve(lambdas.size());
  for (double l : lambdas) {
    SolverConfig c = config;
    c.lambda = l;
    const GotResult r = solve_got(cross, cx, cy, c);
    rows.push_back(SweepRow{l, r.distance, evaluate_plan(r.plan, pair.correspondence)});
  }
  return rows;
}

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "lambda,distance,accuracy,nonzeros,entropy,marginal_violation\n";
  for (const auto& r : rows)
    out << format_number(r.lambda) << ',' << format_number(r.distance) << ','
        << format_number(r.metrics.row_argmax_accuracy) << ',' << r.metrics.nonzeros_above_eps
        << ',' << format_number(r.metrics.entropy) << ','
        << format_number(r.metrics.marginal_violation) << '\n';
}

}  // namespace got::harness
