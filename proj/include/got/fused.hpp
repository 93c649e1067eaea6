#pragma once

// Fused Graph Optimal Transport distance: a lambda-weighted combination of the
// node-matching (Wasserstein) and edge-matching (Gromov-Wasserstein) terms,
// either through one shared plan or as two independent solves.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>

#include "got/core.hpp"
#include "got/error.hpp"
#include "got/gromov.hpp"
#include "got/matrix.hpp"
#include "got/sinkhorn.hpp"

namespace got {

/// Fixed linear maps applied to each domain before the cross-domain cost is
/// formed. An empty map is the identity. Each map is d' x d (applied as M v).
class ProjectionPair {
 public:
  ProjectionPair() = default;
  ProjectionPair(std::optional<Matrix> proj_x, std::optional<Matrix> proj_y)
      : proj_x_(std::move(proj_x)), proj_y_(std::move(proj_y)) {
    if (proj_x_ && proj_y_)
      detail::require(proj_x_->rows() == proj_y_->rows(),
                      "ProjectionPair: output dimensions differ (" +
                          std::to_string(proj_x_->rows()) + " vs " +
                          std::to_string(proj_y_->rows()) + ")");
  }

  static ProjectionPair identity() { return {}; }

  const std::optional<Matrix>& proj_x() const noexcept { return proj_x_; }
  const std::optional<Matrix>& proj_y() const noexcept { return proj_y_; }

  EmbeddingSet apply_x(const EmbeddingSet& x) const { return apply(proj_x_, x, "proj_x"); }
  EmbeddingSet apply_y(const EmbeddingSet& y) const { return apply(proj_y_, y, "proj_y"); }

 private:
  static EmbeddingSet apply(const std::optional<Matrix>& map, const EmbeddingSet& e,
                            const char* name) {
    if (!map) return e;
    detail::require(map->cols() == e.dim(), std::string("ProjectionPair: ") + name +
                                                " expects input dimension " +
                                                std::to_string(map->cols()) + ", got " +
                                                std::to_string(e.dim()));
    return EmbeddingSet(matmul_transposed(e.matrix(), *map));
  }

  std::optional<Matrix> proj_x_;
  std::optional<Matrix> proj_y_;
};

struct GotResult {
  double distance = 0.0;
  SolveMode mode = SolveMode::shared;
  double lambda = 0.0;
  /// The shared plan, or the Wasserstein plan on the unshared path.
  TransportPlan plan;
  /// Gromov-Wasserstein plan; present only on the unshared path.
  std::optional<TransportPlan> plan_gwd;
  /// Term values on the unshared path (D_w, D_gw). On the shared path these are
  /// the two terms evaluated at the shared plan.
  double wd_distance = 0.0;
  double gwd_distance = 0.0;
  int outer_iterations_run = 0;
};

/// lambda * cross + (1 - lambda) * pseudo, entrywise.
inline Matrix unified_cost(const Matrix& cross, const Matrix& pseudo, double lambda) {
  detail::require(cross.same_shape(pseudo), "unified_cost: shape mismatch " +
                                                shape_string(cross) + " vs " +
                                                shape_string(pseudo));
  detail::require(lambda >= 0.0 && lambda <= 1.0, "unified_cost: lambda must lie in [0, 1]");
  Matrix u(cross.rows(), cross.cols());
  auto cd = cross.data();
  auto pd = pseudo.data();
  auto ud = u.data();
  for (std::size_t k = 0; k < ud.size(); ++k) ud[k] = lambda * cd[k] + (1.0 - lambda) * pd[k];
  return u;
}

inline Matrix unified_cost(const CostMatrix& cross, const Matrix& pseudo, double lambda) {
  return unified_cost(cross.entries(), pseudo, lambda);
}

/// Intra-domain graph as the fused solver sees it: thresholded at config.tau
/// unless config.threshold_graphs is off.
inline SimilarityMatrix domain_graph(const EmbeddingSet& e, const SolverConfig& config) {
  return config.threshold_graphs ? build_graph(e, config.tau) : similarity_graph(e);
}

/// Fused distance from prebuilt pieces: cross-domain cost and both graphs.
inline GotResult solve_got(const CostMatrix& cross, const SimilarityMatrix& cx,
                           const SimilarityMatrix& cy, const SolverConfig& config) {
  config.validate();
  detail::require(cross.rows() == cx.size() && cross.cols() == cy.size(),
                  "solve_got: cross cost is " + shape_string(cross.entries()) +
                      " but graphs have sizes " + std::to_string(cx.size()) + ", " +
                      std::to_string(cy.size()));
  const MarginalWeights p = uniform_marginal(cx.size());
  const MarginalWeights q = uniform_marginal(cy.size());
  const double lambda = config.lambda;

  if (config.mode == SolveMode::shared) {
    auto s = detail::structure_loop(&cross.entries(), lambda, cx, cy, p, q, config);
    const double wd = frobenius_dot(cross.entries(), s.plan.entries());
    const double gw = gw_objective(cx, cy, s.plan);
    return GotResult{s.distance, SolveMode::shared, lambda, std::move(s.plan), std::nullopt,
                     wd, gw, s.iterations};
  }

  WdResult wd = solve_wd(cross, p, q, config);
  GwdResult gw = solve_gwd(cx, cy, p, q, config);
  const double d = lambda * wd.distance + (1.0 - lambda) * gw.distance;
  return GotResult{d,
                   SolveMode::unshared,
                   lambda,
                   std::move(wd.plan),
                   std::move(gw.plan),
                   wd.distance,
                   gw.distance,
                   wd.outer_iterations_run + gw.outer_iterations_run};
}

/// Fused distance between two embedding sets. Graphs come from the raw
/// vectors; the cross-domain cosine cost from the projected ones.
inline GotResult solve_got(const EmbeddingSet& x, const EmbeddingSet& y,
                           const ProjectionPair& proj, const SolverConfig& config) {
  config.validate();
  const SimilarityMatrix cx = domain_graph(x, config);
  const SimilarityMatrix cy = domain_graph(y, config);
  const CostMatrix cross = cosine_cost_matrix(proj.apply_x(x), proj.apply_y(y));
  return solve_got(cross, cx, cy, config);
}

/// Cross-domain alignment loss: the fused distance itself. A trainer scales it
/// and adds it to its task loss; gradients reach the costs through
/// envelope_gradient, never through the solver iterations.
inline double alignment_loss(const EmbeddingSet& x, const EmbeddingSet& y,
                             const ProjectionPair& proj, const SolverConfig& config) {
  return solve_got(x, y, proj, config).distance;
}

}  // namespace got
