#pragma once

#include <Eigen/Core>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bregot/generator.hpp"
#include "bregot/polytope.hpp"

namespace bregot {

// Raised when the data violate the non-triviality assumption
// Pi(x,y) != argmin <C, .> required by the error bound.
struct AssumptionViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LPResult {
  double optimal_value = 0.0;
  TransportPlan optimal_plan;
  // Indices into enumerate_vertices(x, y) attaining the optimum within the
  // tie tolerance; empty when the network simplex path was taken.
  std::vector<int> optimal_vertices;
};

struct GapReport {
  double delta = 0.0;        // second_value - best_value, +inf if all tie
  double best_value = 0.0;
  double second_value = 0.0;
  double tie_tolerance = 0.0;
};

// Relative tie tolerance used when none is supplied: 1e-9 (1 + |best|).
double default_tie_tol(double best_value);

// Minimizes <C, .> over Pi(x, y). Exact vertex enumeration up to the
// enumeration guard, primal network simplex with Bland's rule beyond it
// (optimality certified by nonnegative reduced costs).
LPResult solve_lp(const Eigen::MatrixXd& C, const Histogram& x, const Histogram& y);

// The suboptimality gap over the vertex set; requires enumeration.
GapReport suboptimality_gap(const Eigen::MatrixXd& C, const Histogram& x, const Histogram& y,
                            std::optional<double> tie_tol = std::nullopt);

// sup over Pi(x,y) of D_U(., x (x) y); attained at a vertex since the
// divergence is convex and continuous on the (compact) polytope.
double divergence_radius(const Generator& gen, const Histogram& x, const Histogram& y);

// True iff <C, .> is non-constant over the vertices under the tie tolerance.
bool check_assumption_xy(const Eigen::MatrixXd& C, const Histogram& x, const Histogram& y,
                         std::optional<double> tie_tol = std::nullopt);

namespace detail {
// Transportation network simplex; exposed for direct testing.
struct NetworkSimplexResult {
  double value = 0.0;
  Eigen::MatrixXd plan;
  int iterations = 0;
};
NetworkSimplexResult network_simplex(const Eigen::MatrixXd& C, const Eigen::VectorXd& supply,
                                     const Eigen::VectorXd& demand);
}  // namespace detail

}  // namespace bregot
