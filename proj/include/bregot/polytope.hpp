#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

namespace bregot {

// Entries below this are exact zeros for support purposes.
inline constexpr double kSupportEpsilon = 1e-15;

// Largest I + J for which vertex enumeration is offered.
inline constexpr int kEnumerationGuard = 14;

// A nonnegative vector with a declared total mass (1 unless the data are
// deliberately scaled); the sum must match the mass to 1e-12.
struct Histogram {
  Eigen::VectorXd values;
  double total_mass = 1.0;

  Histogram() = default;
  Histogram(Eigen::VectorXd v, double mass = 1.0);

  Eigen::Index size() const { return values.size(); }
  std::vector<int> support() const;
};

struct TransportPlan {
  Eigen::MatrixXd entries;  // I x J, nonnegative

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index cols() const { return entries.cols(); }
  Histogram row_marginal() const;
  Histogram col_marginal() const;
};

struct PlanDiagnostics {
  bool ok = true;
  std::vector<std::string> violations;
};

struct VertexSet {
  std::vector<TransportPlan> vertices;
  // Cells of the spanning forest defining each vertex, original indices.
  std::vector<std::vector<std::pair<int, int>>> tree_supports;
};

// (x (x) y)_{ij} = x_i y_j / mass; a member of Pi(x, y).
TransportPlan product_plan(const Histogram& x, const Histogram& y);

// Nonnegativity, marginal and support (spt(Pi) within spt(x) x spt(y))
// checks at the given tolerance, with one message per violation.
PlanDiagnostics validate_plan(const TransportPlan& plan, const Histogram& x, const Histogram& y,
                              double tol);

// All vertices of Pi(x, y): spanning trees of the support-restricted
// bipartite graph, basic flows back-substituted, nonnegative solutions kept,
// duplicates removed by an entrywise 1e-9 rounding key. Requires
// I + J <= kEnumerationGuard.
VertexSet enumerate_vertices(const Histogram& x, const Histogram& y);

// (|spt(x)|-1)(|spt(y)|-1) independent matrices with zero row/column sums
// supported on spt(x) x spt(y), spanning the tangent space of Pi(x, y).
std::vector<Eigen::MatrixXd> null_space_basis(const Histogram& x, const Histogram& y);

}  // namespace bregot
