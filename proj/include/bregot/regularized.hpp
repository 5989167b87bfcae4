#pragma once

#include <Eigen/Core>
#include <vector>

#include "bregot/generator.hpp"
#include "bregot/polytope.hpp"

namespace bregot {

struct SolveOptions {
  double grad_tol = 1e-10;
  int max_iters = 500;
  double backtrack_factor = 0.5;
  double armijo_c = 1e-4;
  double min_entry_fraction = 1e-14;  // entry floor relative to x (x) y
};

struct RegularizedResult {
  TransportPlan plan;
  double linear_value = 0.0;      // <C, plan>
  double divergence_value = 0.0;  // D_U(plan, x (x) y)
  double objective = 0.0;         // linear + eps * divergence
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

struct LimitPlanResult {
  TransportPlan plan;
  double final_eps = 0.0;
  bool fully_converged = false;
};

// <C, plan> + eps * D_U(plan, x (x) y); rejects infeasible plans, +inf is a
// legitimate value when the plan leaves the divergence domain.
double objective(const Generator& gen, const Eigen::MatrixXd& C, const Histogram& x,
                 const Histogram& y, double eps, const TransportPlan& plan);

// Unique minimizer of the regularized problem by reduced-space damped Newton
// over Pi = x(x)y + sum_k theta_k B_k on spt(x) x spt(y), Armijo
// backtracking, steps capped so entries stay above
// min_entry_fraction * (x(x)y). Warm start must be interior and feasible,
// else it is ignored.
RegularizedResult solve_regularized(const Generator& gen, const Eigen::MatrixXd& C,
                                    const Histogram& x, const Histogram& y, double eps,
                                    const SolveOptions& opts = {},
                                    const TransportPlan* warm_start = nullptr);

// Norm of the objective gradient projected onto the tangent space of the
// marginal constraints; zero exactly at the minimizer.
double kkt_residual(const Generator& gen, const Eigen::MatrixXd& C, const Histogram& x,
                    const Histogram& y, double eps, const TransportPlan& plan);

// Warm-started continuation along a decreasing eps sequence, approximating
// the D_U-projection of x (x) y onto the optimal face.
LimitPlanResult solve_limit_plan(const Generator& gen, const Eigen::MatrixXd& C, const Histogram& x,
                                 const Histogram& y, const std::vector<double>& eps_sequence,
                                 const SolveOptions& opts = {});

}  // namespace bregot
