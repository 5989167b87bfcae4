#include "bregot/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace bregot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kUnderflowFloor = 1e-300;

}  // namespace

double r_u(const Generator& gen, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("r_u: radius must be positive");
  const double a = gen.domain_length();
  const double target = radius / a;
  // U'(R) - U'(a-R) is strictly increasing, 0 at a/2, +inf at a.
  double lo = 0.5 * a, hi = a;
  while (hi - lo > 1e-13 * a) {
    const double mid = 0.5 * (lo + hi);
    const double gap_at_mid = gen.prime(mid) - gen.prime(a - mid);
    if (gap_at_mid < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

NuResult nu_u_numeric(const Generator& gen, double r_upper) {
  const double a = gen.domain_length();
  if (!(r_upper >= 0.5 * a) || !(r_upper < a))
    throw std::invalid_argument("nu_u: r_upper must lie in [a/2, a)");
  auto g = [&gen, a](double r) { return gen.prime(a - r) + r * gen.second(r); };

  NuResult out;
  out.limit_value = gen.u1_prime() + gen.ru2_limit_at_zero();

  const int n = 2048;
  const double log_lo = std::log(r_upper) + std::log(1e-12);
  const double log_hi = std::log(r_upper);
  double best = -kInf;
  int best_i = 0;
  std::vector<double> rs(n), gs(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    rs[i] = std::exp(log_lo * (1.0 - t) + log_hi * t);
    gs[i] = g(rs[i]);
    if (gs[i] > best) {
      best = gs[i];
      best_i = i;
    }
  }
  // Golden-section refinement around the best grid point.
  double lo = rs[std::max(0, best_i - 1)];
  double hi = rs[std::min(n - 1, best_i + 1)];
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-15 * r_upper; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = g(x1);
    }
  }
  out.grid_value = std::max({best, f1, f2, g(r_upper)});
  out.limit_dominates = out.limit_value >= out.grid_value;
  out.value = std::max(out.limit_value, out.grid_value);
  return out;
}

double nu_u(const Generator& gen, double r_upper) {
  const double a = gen.domain_length();
  if (!(r_upper >= 0.5 * a) || !(r_upper < a))
    throw std::invalid_argument("nu_u: r_upper must lie in [a/2, a)");
  if (auto nu = gen.analytic_nu(r_upper)) return *nu;
  return nu_u_numeric(gen, r_upper).value;
}

double epsilon_interval(double delta, double radius, double r_u, double nu_u, double u_prime_one,
                        double a) {
  if (delta == kInf) return kInf;  // every vertex optimal; the bound is vacuous
  if (!(delta > 0.0)) throw std::invalid_argument("epsilon_interval: delta must be positive");
  if (!(radius > 0.0)) throw std::invalid_argument("epsilon_interval: radius must be positive");
  const double end1 = delta * r_u / (a * radius);
  const double end2 = (delta / a) / (radius / a + nu_u - u_prime_one);
  return std::min(end1, end2);
}

BoundEvaluation evaluate_theorem_bound(const Generator& gen, double delta, double radius, double nu,
                                       double eps) {
  const double a = gen.domain_length();
  const double r = r_u(gen, radius);
  const double eps_max = epsilon_interval(delta, radius, r, nu, gen.u1_prime(), a);

  BoundEvaluation eval;
  eval.valid_eps = eps > 0.0 && eps <= eps_max * (1.0 + 1e-12);
  if (!eval.valid_eps) return eval;

  const double tau = -delta / (a * eps) + radius / a + nu;
  eval.log_value = std::log(delta) - 2.0 * std::log(a) + gen.log_inverse_prime(tau);
  if (eval.log_value >= std::log(kUnderflowFloor)) {
    // Full-precision product while it is representable.
    eval.value = (delta / (a * a)) * gen.inverse_prime(tau);
  } else {
    eval.value = 0.0;
    eval.underflowed = true;
  }
  return eval;
}

double theorem_bound(const Generator& gen, double delta, double radius, double nu, double eps) {
  const BoundEvaluation eval = evaluate_theorem_bound(gen, delta, radius, nu, eps);
  if (!eval.valid_eps) {
    const double r = r_u(gen, radius);
    const double eps_max = epsilon_interval(delta, radius, r, nu, gen.u1_prime(),
                                            gen.domain_length());
    throw std::domain_error("theorem_bound: eps = " + std::to_string(eps) +
                            " outside the valid interval (0, " + std::to_string(eps_max) + "]");
  }
  return eval.value;
}

double weed_bound(double delta, double radius_kl, double eps) {
  if (!(delta > 0.0) || !(radius_kl > 0.0))
    throw std::invalid_argument("weed_bound: delta and radius must be positive");
  const double eps_max = delta / (1.0 + radius_kl);
  if (!(eps > 0.0) || eps > eps_max * (1.0 + 1e-12))
    throw std::domain_error("weed_bound: eps = " + std::to_string(eps) +
                            " outside the valid interval (0, " + std::to_string(eps_max) + "]");
  const double arg = -delta / eps + radius_kl + 1.0;
  if (std::log(delta) + arg < std::log(kUnderflowFloor)) return 0.0;
  return delta * std::exp(arg);
}

double naive_bound(double radius, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("naive_bound: eps must be positive");
  return eps * radius;
}

BoundEvaluation BoundReport::bound_at(double eps) const {
  const double a = gen.domain_length();
  BoundEvaluation eval;
  eval.valid_eps = eps > 0.0 && eps <= eps_max * (1.0 + 1e-12);
  if (!eval.valid_eps) return eval;
  const double tau = -delta / (a * eps) + radius / a + nu_u;
  eval.log_value = std::log(delta) - 2.0 * std::log(a) + gen.log_inverse_prime(tau);
  if (eval.log_value >= std::log(kUnderflowFloor)) {
    eval.value = (delta / (a * a)) * gen.inverse_prime(tau);
  } else {
    eval.value = 0.0;
    eval.underflowed = true;
  }
  return eval;
}

BoundReport full_report(const Generator& gen, const Eigen::MatrixXd& C, const Histogram& x,
                        const Histogram& y, std::optional<double> tie_tol) {
  if (!gen.is_admissible())
    throw std::invalid_argument("full_report: generator '" + gen.spec() + "' is not admissible");
  if (std::abs(x.total_mass - gen.domain_length()) > 1e-9 * std::max(1.0, gen.domain_length()))
    throw std::invalid_argument("full_report: data mass " + std::to_string(x.total_mass) +
                                " does not match the generator domain [0, " +
                                std::to_string(gen.domain_length()) + "]");
  const GapReport gap = suboptimality_gap(C, x, y, tie_tol);
  if (!std::isfinite(gap.delta))
    throw AssumptionViolation(
        "Pi(x,y) != argmin <C,.> fails: every vertex attains the same objective (constant cost "
        "or point polytope)");

  BoundReport report{gen, gap.delta, 0.0, 0.0, 0.0, false, gen.u1_prime(), 0.0};
  report.radius = divergence_radius(gen, x, y);
  report.r_u = r_u(gen, report.radius);
  if (auto analytic = gen.analytic_nu(report.r_u)) {
    report.nu_u = *analytic;
    report.nu_limit_dominates = true;  // the closed forms are r -> 0 limits
  } else {
    const NuResult numeric = nu_u_numeric(gen, report.r_u);
    report.nu_u = numeric.value;
    report.nu_limit_dominates = numeric.limit_dominates;
  }
  report.eps_max =
      epsilon_interval(report.delta, report.radius, report.r_u, report.nu_u, report.u_prime_one,
                       gen.domain_length());
  return report;
}

}  // namespace bregot
