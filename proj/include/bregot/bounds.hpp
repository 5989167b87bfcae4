#pragma once

#include <Eigen/Core>
#include <optional>

#include "bregot/exact.hpp"
#include "bregot/generator.hpp"
#include "bregot/polytope.hpp"

namespace bregot {

struct BoundEvaluation {
  bool valid_eps = false;  // eps lies in (0, eps_max]
  double value = 0.0;      // clamped to 0 below 1e-300
  double log_value = 0.0;  // natural log, finite even when value underflows
  bool underflowed = false;
};

struct NuResult {
  double value = 0.0;
  double limit_value = 0.0;  // r -> 0 limit U'(a) + lim r U''(r)
  double grid_value = 0.0;   // refined grid supremum
  bool limit_dominates = false;
};

// Unique R in (a/2, a) with U'(R) - U'(a - R) = radius / a, by bisection to
// 1e-13 absolute on R / a.
double r_u(const Generator& gen, double radius);

// sup over (0, r_upper] of U'(a - r) + r U''(r). Uses the family's closed
// form when one exists (2 for r log r), otherwise the numeric path.
double nu_u(const Generator& gen, double r_upper);

// Numeric path: the r -> 0 limit, a 2048-point log-spaced grid maximum with
// golden-section refinement, and the endpoint, reported separately.
NuResult nu_u_numeric(const Generator& gen, double r_upper);

// Right endpoint of the valid eps interval,
//   min( delta r_u / (a radius), (delta/a) / (radius/a + nu - U'(a)) ),
// the two interval endpoints in their scale-invariant form (the unit-scale
// endpoints verbatim when a = 1). +inf when delta is +inf.
double epsilon_interval(double delta, double radius, double r_u, double nu_u, double u_prime_one,
                        double a);

// delta * e_U(-delta/eps + radius + nu) for unit-mass data; for scaled
// generators the scale-invariant per-unit-mass form
// (delta/a) e_U(-delta/(a eps) + radius/a + nu) / a, which equals the
// unit-scale value. Multiply by a to bound the raw scaled error. Throws when
// eps lies outside the valid interval.
double theorem_bound(const Generator& gen, double delta, double radius, double nu, double eps);

// Same bound without the validity exception; log arithmetic throughout.
BoundEvaluation evaluate_theorem_bound(const Generator& gen, double delta, double radius, double nu,
                                       double eps);

// delta * exp(-delta/eps + radius + 1), the classical r log r closed form,
// valid on (0, delta / (1 + radius)].
double weed_bound(double delta, double radius_kl, double eps);

// eps * radius; valid for every eps > 0.
double naive_bound(double radius, double eps);

struct BoundReport {
  Generator gen;
  double delta = 0.0;
  double radius = 0.0;
  double r_u = 0.0;
  double nu_u = 0.0;
  bool nu_limit_dominates = false;
  double u_prime_one = 0.0;
  double eps_max = 0.0;

  BoundEvaluation bound_at(double eps) const;
  double naive_at(double eps) const { return naive_bound(radius, eps); }
};

// Assembles gap, radius, R_U, nu_U and the eps interval. Requires an
// admissible generator, enumeration-scale data, and the non-triviality
// assumption (AssumptionViolation otherwise).
BoundReport full_report(const Generator& gen, const Eigen::MatrixXd& C, const Histogram& x,
                        const Histogram& y, std::optional<double> tie_tol = std::nullopt);

}  // namespace bregot
