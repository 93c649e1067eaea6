#pragma once

// Gromov-Wasserstein distance with the squared-difference loss
//   L(x, y, x', y') = (cx(x, x') - cy(y, y'))^2.
// The quadratic objective sum T_ij T_i'j' L is linearized at the current plan
// into a pseudo-cost and the linear problem is handed to the proximal-point
// Wasserstein solver; repeating this is a Frank-Wolfe scheme with unit steps.
// The problem is non-convex, so the result is a stationary point, not a
// certified global minimum.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "got/core.hpp"
#include "got/error.hpp"
#include "got/matrix.hpp"
#include "got/sinkhorn.hpp"

namespace got {

struct GwdResult {
  TransportPlan plan;
  double distance = 0.0;  // <L(T), T> with L refreshed at the returned plan
  int outer_iterations_run = 0;
  bool converged = false;
  /// Objective at the starting coupling followed by the objective after each
  /// linearize-and-solve step.
  std::vector<double> objective_history;
};

/// (cx o cx) p 1^T + 1 q^T (cy o cy)^T: entry (i, j) = sum_k cx_ik^2 p_k + sum_l cy_jl^2 q_l.
inline Matrix gw_constant_term(const SimilarityMatrix& cx, const SimilarityMatrix& cy,
                               const MarginalWeights& p, const MarginalWeights& q) {
  detail::require(cx.size() == p.size() && cy.size() == q.size(),
                  "gw_constant_term: graph sizes " + std::to_string(cx.size()) + ", " +
                      std::to_string(cy.size()) + " do not match marginal lengths " +
                      std::to_string(p.size()) + ", " + std::to_string(q.size()));
  const std::size_t n = cx.size();
  const std::size_t m = cy.size();
  std::vector<double> fx(n, 0.0), fy(m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) fx[i] += cx(i, k) * cx(i, k) * p[k];
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t l = 0; l < m; ++l) fy[j] += cy(j, l) * cy(j, l) * q[l];

  Matrix c(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) c(i, j) = fx[i] + fy[j];
  return c;
}

/// c_const - 2 cx T cy^T. Entries may be negative.
inline Matrix gw_pseudo_cost(const Matrix& c_const, const SimilarityMatrix& cx,
                             const SimilarityMatrix& cy, const Matrix& plan) {
  detail::require(plan.rows() == cx.size() && plan.cols() == cy.size() &&
                      c_const.same_shape(plan),
                  "gw_pseudo_cost: plan " + shape_string(plan) + ", constant term " +
                      shape_string(c_const) + ", graphs " + std::to_string(cx.size()) + "/" +
                      std::to_string(cy.size()));
  Matrix cross = matmul_transposed(matmul(cx.entries(), plan), cy.entries());
  Matrix l(c_const.rows(), c_const.cols());
  auto cd = c_const.data();
  auto xd = cross.data();
  auto ld = l.data();
  for (std::size_t k = 0; k < ld.size(); ++k) ld[k] = cd[k] - 2.0 * xd[k];
  return l;
}

inline Matrix gw_pseudo_cost(const Matrix& c_const, const SimilarityMatrix& cx,
                             const SimilarityMatrix& cy, const TransportPlan& plan) {
  return gw_pseudo_cost(c_const, cx, cy, plan.entries());
}

/// Squared-loss GW objective via the factorization <L(T), T>. Exact when the
/// plan's entries have the marginals it declares.
inline double gw_objective(const SimilarityMatrix& cx, const SimilarityMatrix& cy,
                           const TransportPlan& plan) {
  const Matrix c = gw_constant_term(cx, cy, plan.row_marginal(), plan.col_marginal());
  return frobenius_dot(gw_pseudo_cost(c, cx, cy, plan), plan.entries());
}

namespace detail {

struct StructureSolve {
  TransportPlan plan;
  double distance;
  int iterations;
  bool converged;
  std::vector<double> history;
};

// Linearize-and-solve loop on lambda * cross + (1 - lambda) * L(T). With no
// cross cost this is plain Gromov-Wasserstein; with one it is the fused
// objective sharing a single plan between node and edge terms.
inline StructureSolve structure_loop(const Matrix* cross, double lambda,
                                     const SimilarityMatrix& cx, const SimilarityMatrix& cy,
                                     const MarginalWeights& p, const MarginalWeights& q,
                                     const SolverConfig& config) {
  config.validate();
  detail::require(cx.size() == p.size() && cy.size() == q.size(),
                  "structure solve: graph sizes do not match marginal lengths");
  if (cross)
    detail::require(cross->rows() == cx.size() && cross->cols() == cy.size(),
                    "structure solve: cross cost is " + shape_string(*cross) +
                        " but graphs have sizes " + std::to_string(cx.size()) + ", " +
                        std::to_string(cy.size()));

  const Matrix c_const = gw_constant_term(cx, cy, p, q);
  auto unified = [&](const Matrix& plan) {
    Matrix l = gw_pseudo_cost(c_const, cx, cy, plan);
    if (!cross) return l;
    auto cd = cross->data();
    auto ld = l.data();
    for (std::size_t k = 0; k < ld.size(); ++k) ld[k] = lambda * cd[k] + (1.0 - lambda) * ld[k];
    return l;
  };

  TransportPlan plan = independent_plan(p, q);
  std::vector<double> history;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;
  for (;;) {
    const Matrix cost = unified(plan.entries());
    objective = frobenius_dot(cost, plan.entries());
    history.push_back(objective);
    if (converged || iterations == config.outer_iters) break;

    WdResult step = solve_wd(cost, p, q, config);
    const double change = max_abs_diff(step.plan.entries(), plan.entries());
    plan = std::move(step.plan);
    ++iterations;
    converged = change < config.convergence_tol;
  }
  return StructureSolve{std::move(plan), objective, iterations, converged, std::move(history)};
}

}  // namespace detail

/// Gromov-Wasserstein distance between two graphs, starting from p q^T.
inline GwdResult solve_gwd(const SimilarityMatrix& cx, const SimilarityMatrix& cy,
                           const MarginalWeights& p, const MarginalWeights& q,
                           const SolverConfig& config) {
  auto s = detail::structure_loop(nullptr, 0.0, cx, cy, p, q, config);
  return GwdResult{std::move(s.plan), s.distance, s.iterations, s.converged,
                   std::move(s.history)};
}

}  // namespace got
