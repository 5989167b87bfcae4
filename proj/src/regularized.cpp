#include "bregot/regularized.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

#ifdef BREGOT_SOLVER_DEBUG
#include <cstdio>
#define BREGOT_DBG(...) std::printf(__VA_ARGS__)
#else
#define BREGOT_DBG(...)
#endif

namespace bregot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_problem(const Generator& gen, const Eigen::MatrixXd& C, const Histogram& x,
                     const Histogram& y, double eps) {
  if (C.rows() != x.size() || C.cols() != y.size())
    throw std::invalid_argument("regularized solve: cost/marginal shape mismatch");
  if (std::abs(x.total_mass - y.total_mass) > 1e-9 * std::max(1.0, x.total_mass))
    throw std::invalid_argument("regularized solve: marginal masses differ");
  if (std::abs(x.total_mass - gen.domain_length()) > 1e-9 * std::max(1.0, gen.domain_length()))
    throw std::invalid_argument("regularized solve: data mass " + std::to_string(x.total_mass) +
                                " does not match the generator domain [0, " +
                                std::to_string(gen.domain_length()) + "]");
  if (!(eps > 0.0)) throw std::invalid_argument("regularized solve: eps must be positive");
}

// Solver workspace on the support-restricted cells.
struct Reduced {
  std::vector<int> rows, cols;        // support index maps
  Eigen::VectorXd cost;               // per cell, row-major over support
  Eigen::VectorXd ref;                // x (x) y entries
  Eigen::VectorXd ref_prime;          // U'(ref)
  Eigen::VectorXd floor;              // entry floor
  Eigen::MatrixXd basis;              // cells x dim, vectorized null-space basis
  int p = 0, q = 0;

  int cell(int u, int v) const { return u * q + v; }
};

Reduced build_reduced(const Generator& gen, const Eigen::MatrixXd& C, const Histogram& x,
                      const Histogram& y, double min_entry_fraction) {
  Reduced red;
  red.rows = x.support();
  red.cols = y.support();
  red.p = static_cast<int>(red.rows.size());
  red.q = static_cast<int>(red.cols.size());
  const int cells = red.p * red.q;
  red.cost.resize(cells);
  red.ref.resize(cells);
  red.ref_prime.resize(cells);
  red.floor.resize(cells);
  for (int u = 0; u < red.p; ++u)
    for (int v = 0; v < red.q; ++v) {
      const int c = red.cell(u, v);
      red.cost[c] = C(red.rows[u], red.cols[v]);
      red.ref[c] = x.values[red.rows[u]] * y.values[red.cols[v]] / x.total_mass;
      red.ref_prime[c] = gen.prime(red.ref[c]);
      red.floor[c] = min_entry_fraction * red.ref[c];
    }
  const int dim = (red.p - 1) * (red.q - 1);
  red.basis.resize(cells, std::max(dim, 0));
  red.basis.setZero();
  int k = 0;
  for (int u = 0; u + 1 < red.p; ++u)
    for (int v = 0; v + 1 < red.q; ++v, ++k) {
      red.basis(red.cell(u, v), k) = 1.0;
      red.basis(red.cell(u, v + 1), k) = -1.0;
      red.basis(red.cell(u + 1, v), k) = -1.0;
      red.basis(red.cell(u + 1, v + 1), k) = 1.0;
    }
  return red;
}

double reduced_objective(const Generator& gen, const Reduced& red, double eps,
                         const Eigen::VectorXd& pi) {
  const double a = gen.domain_length();
  double linear = 0.0, div = 0.0;
  for (int c = 0; c < pi.size(); ++c) {
    if (!(pi[c] > 0.0) || pi[c] > a) return kInf;
    linear += red.cost[c] * pi[c];
    div += gen.divergence(pi[c], red.ref[c]);
  }
  return linear + eps * div;
}

TransportPlan expand_plan(const Reduced& red, const Eigen::VectorXd& pi, int I, int J) {
  TransportPlan plan;
  plan.entries = Eigen::MatrixXd::Zero(I, J);
  for (int u = 0; u < red.p; ++u)
    for (int v = 0; v < red.q; ++v) plan.entries(red.rows[u], red.cols[v]) = pi[red.cell(u, v)];
  return plan;
}

}  // namespace

double objective(const Generator& gen, const Eigen::MatrixXd& C, const Histogram& x,
                 const Histogram& y, double eps, const TransportPlan& plan) {
  require_problem(gen, C, x, y, eps);
  const PlanDiagnostics diag = validate_plan(plan, x, y, 1e-9);
  if (!diag.ok)
    throw std::invalid_argument("objective: infeasible plan: " + diag.violations.front());
  const TransportPlan ref = product_plan(x, y);
  return C.cwiseProduct(plan.entries).sum() +
         eps * bregman_divergence(gen, plan.entries, ref.entries);
}

RegularizedResult solve_regularized(const Generator& gen, const Eigen::MatrixXd& C,
                                    const Histogram& x, const Histogram& y, double eps,
                                    const SolveOptions& opts, const TransportPlan* warm_start) {
  require_problem(gen, C, x, y, eps);
  if (!gen.is_barrier())
    throw std::invalid_argument("solve_regularized: generator '" + gen.spec() +
                                "' lacks the barrier U'(0) = -inf; the minimizer need not be "
                                "interior");

  const int I = static_cast<int>(x.size());
  const int J = static_cast<int>(y.size());
  Reduced red = build_reduced(gen, C, x, y, opts.min_entry_fraction);
  const int dim = static_cast<int>(red.basis.cols());

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
  if (warm_start && dim > 0 && warm_start->rows() == I && warm_start->cols() == J) {
    Eigen::VectorXd target(red.ref.size());
    for (int u = 0; u < red.p; ++u)
      for (int v = 0; v < red.q; ++v)
        target[red.cell(u, v)] = warm_start->entries(red.rows[u], red.cols[v]) - red.ref[red.cell(u, v)];
    Eigen::VectorXd cand = red.basis.colPivHouseholderQr().solve(target);
    Eigen::VectorXd pi = red.ref + red.basis * cand;
    // Floor-pinned warm entries are fine; the active set reclaims them.
    if ((pi.array() >= red.floor.array()).all()) theta = std::move(cand);
  }

  Eigen::VectorXd pi = red.ref + red.basis * theta;
  double f = reduced_objective(gen, red, eps, pi);
  if (!std::isfinite(f)) {  // degenerate warm start; restart at the reference
    theta.setZero();
    pi = red.ref;
    f = reduced_objective(gen, red, eps, pi);
  }

  RegularizedResult result;
  Eigen::VectorXd grad(dim), step(dim), pi_new(pi.size());
  int iter = 0;
  double grad_norm = 0.0;
  bool converged = dim == 0;
  const double a_interior = gen.domain_length() * (1.0 - 1e-16);

  // Active floor pins. The true optimum of an entry can underflow the floor
  // (superexponential families at small eps); such entries get pinned and
  // the Newton step is taken in the exact kernel of the pinned basis rows,
  // which keeps the marginals intact. Pins with a negative KKT multiplier
  // are released again, so a wrongly pinned entry cannot distort the result.
  std::vector<char> pin_mask(pi.size(), 0);
  std::vector<char> no_repin(pi.size(), 0);  // released pins wait for one step
  std::vector<int> release_count(pi.size(), 0);
  auto at_floor = [&](int c) { return pi[c] - red.floor[c] <= 1e-6 * pi[c]; };

  for (; iter < opts.max_iters && dim > 0; ++iter) {
    // Plan-space gradient c + eps (U'(pi) - U'(ref)), pulled back to theta.
    Eigen::VectorXd gplan(pi.size());
    Eigen::VectorXd weight(pi.size());
    for (int c = 0; c < pi.size(); ++c) {
      gplan[c] = red.cost[c] + eps * (gen.prime(pi[c]) - red.ref_prime[c]);
      double w = eps * gen.second(std::min(pi[c], a_interior));
      if (!std::isfinite(w)) w = 1e300;
      weight[c] = w;
    }
    // The soft curvature scale: cells still carrying meaningful mass.
    double weight_soft = kInf;
    for (int c = 0; c < pi.size(); ++c)
      if (pi[c] > 1e-9 * red.ref[c]) weight_soft = std::min(weight_soft, weight[c]);
    for (int c = 0; c < pi.size(); ++c) {
      if (pin_mask[c] || no_repin[c] || !(gplan[c] > 0.0)) continue;
      if (at_floor(c)) {
        pin_mask[c] = 1;
        BREGOT_DBG("it %d: pin %d at floor (pi=%.3e gplan=%.3e)\n", iter, c, pi[c], gplan[c]);
      } else if (pi[c] <= 1e-9 * red.ref[c] && weight[c] >= 1e12 * weight_soft) {
        // Stiff and massless: the barrier curvature would swamp the Newton
        // system long before the entry reaches its (underflowing) optimum.
        // Pinning it at its current negligible value is exact to rounding.
        pin_mask[c] = 1;
      }
    }

    double descent = 0.0;
    bool want_release_check = false;
    std::vector<int> pinned;
    for (int c = 0; c < pi.size(); ++c)
      if (pin_mask[c]) pinned.push_back(c);

    if (pinned.empty()) {
      grad = red.basis.transpose() * gplan;
      grad_norm = grad.norm();
      if (grad_norm <= opts.grad_tol * (1.0 + std::abs(f))) {
        BREGOT_DBG("it %d: grad converged (no pins)\n", iter);
        converged = true;
        break;
      }
      const Eigen::MatrixXd hess = red.basis.transpose() * weight.asDiagonal() * red.basis;
      step = hess.ldlt().solve(-grad);
      descent = grad.dot(step);
      if (!(descent < 0.0) || !step.allFinite()) {
        step = -grad;  // fall back to steepest descent if the solve degenerates
        descent = grad.dot(step);
      }
    } else {
      Eigen::MatrixXd pinned_rows(pinned.size(), dim);
      for (std::size_t k = 0; k < pinned.size(); ++k) pinned_rows.row(k) = red.basis.row(pinned[k]);
      const Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(pinned_rows).kernel();
      const bool no_movement = kernel.cols() == 0 || (kernel.cols() == 1 && kernel.norm() < 1e-14);
      Eigen::VectorXd gplan_free = gplan;
      Eigen::VectorXd weight_free = weight;
      for (int c : pinned) {
        gplan_free[c] = 0.0;
        weight_free[c] = 0.0;
      }
      grad = red.basis.transpose() * gplan;  // full gradient, for multipliers
      if (no_movement) {
        grad_norm = 0.0;
        want_release_check = true;
      } else {
        const Eigen::MatrixXd bz = red.basis * kernel;
        const Eigen::VectorXd gz = bz.transpose() * gplan_free;
        grad_norm = gz.norm();
        if (grad_norm <= opts.grad_tol * (1.0 + std::abs(f))) {
          want_release_check = true;
        } else {
          const Eigen::MatrixXd hz = bz.transpose() * weight_free.asDiagonal() * bz;
          const Eigen::VectorXd sz = hz.ldlt().solve(-gz);
          step = kernel * sz;
          descent = gz.dot(sz);
          if (!(descent < 0.0) || !step.allFinite()) {
            step = -(kernel * gz);
            descent = -gz.squaredNorm();
          }
          // Stationary on the pinned subspace at working precision: still
          // subject to the multiplier check below before declaring victory.
          if (-descent <= 1e-17 * (1.0 + std::abs(f))) want_release_check = true;
        }
      }
      if (want_release_check) {
        // Stationary given the pins. KKT for pi_c >= floor_c demands
        // grad_theta = sum mu_c B_c with mu >= 0; a negative multiplier
        // marks a pin whose release yields further descent. Multipliers
        // below the least-squares residual are noise, and a pin that keeps
        // flapping stays put: the mass it holds is at floor level anyway.
        const Eigen::VectorXd mu =
            pinned_rows.transpose().colPivHouseholderQr().solve(grad);
        const double resid = (pinned_rows.transpose() * mu - grad).norm();
        int worst = -1;
        double worst_mu = -std::max(1e-8 * (1.0 + gplan.cwiseAbs().maxCoeff()), 10.0 * resid);
        for (std::size_t k = 0; k < pinned.size(); ++k)
          if (mu[static_cast<Eigen::Index>(k)] < worst_mu && release_count[pinned[k]] < 4) {
            worst_mu = mu[static_cast<Eigen::Index>(k)];
            worst = pinned[k];
          }
        if (worst < 0) {
          BREGOT_DBG("it %d: converged, %zu pins all mu>=0\n", iter, pinned.size());
          converged = true;
          break;
        }
        BREGOT_DBG("it %d: release pin %d (mu=%.3e)\n", iter, worst, worst_mu);
        pin_mask[worst] = 0;
        no_repin[worst] = 1;
        ++release_count[worst];
        continue;  // re-solve with the released pin
      }
    }

    // Stationary at floating-point resolution: the model predicts less
    // improvement than the objective can register (e.g. huge eps amplifying
    // rounding in U'(pi) - U'(ref)). Pinned configurations pass through the
    // multiplier check instead.
    if (pinned.empty() && -descent <= 1e-17 * (1.0 + std::abs(f))) {
      BREGOT_DBG("it %d: stagnation converged (descent=%.3e)\n", iter, descent);
      converged = true;
      break;
    }

    // Cap the step so entries stay above their floors; kernel steps move
    // pinned cells only at rounding level, which the dscale filter ignores.
    const Eigen::VectorXd dpi = red.basis * step;
    const double dscale = dpi.cwiseAbs().maxCoeff();
    double alpha_cap = kInf;
    for (int c = 0; c < pi.size(); ++c)
      if (dpi[c] < -1e-14 * dscale)
        alpha_cap = std::min(alpha_cap, std::max(0.0, pi[c] - red.floor[c]) / (-dpi[c]));
    double alpha = std::min(1.0, alpha_cap);
    if (!(alpha > 0.0)) {
      // Blocked by an unpinned floor entry the direction still pushes down.
      bool pinned_new = false;
      for (int c = 0; c < pi.size(); ++c)
        if (!pin_mask[c] && at_floor(c) && dpi[c] < -1e-14 * dscale) {
          pin_mask[c] = 1;
          pinned_new = true;
        }
      if (pinned_new) continue;
      break;  // numerically immobile yet not stationary
    }

    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      pi_new = pi + alpha * dpi;
      for (int c : pinned) pi_new[c] = pi[c];  // cancel rounding drift on pins
      const double f_new = reduced_objective(gen, red, eps, pi_new);
      if (f_new <= f + opts.armijo_c * alpha * descent) {
        pi = pi_new;
        theta += alpha * step;
        f = f_new;
        accepted = true;
        std::fill(no_repin.begin(), no_repin.end(), 0);
        break;
      }
      alpha *= opts.backtrack_factor;
    }
    if (!accepted) {
      // Armijo exhausted: the objective cannot register the predicted
      // decrease, which is stationarity at working precision.
      converged = -descent <= 1e-12 * (1.0 + std::abs(f));
      BREGOT_DBG("it %d: armijo exhausted (descent=%.3e) converged=%d\n", iter, descent,
                 int(converged));
      break;
    }
  }

  result.plan = expand_plan(red, pi, I, J);
  result.linear_value = C.cwiseProduct(result.plan.entries).sum();
  double div = 0.0;
  for (int c = 0; c < pi.size(); ++c) div += gen.divergence(pi[c], red.ref[c]);
  result.divergence_value = div;
  result.objective = result.linear_value + eps * result.divergence_value;
  result.iterations = iter;
  result.grad_norm = grad_norm;
  result.converged = converged;
  return result;
}

double kkt_residual(const Generator& gen, const Eigen::MatrixXd& C, const Histogram& x,
                    const Histogram& y, double eps, const TransportPlan& plan) {
  require_problem(gen, C, x, y, eps);
  Reduced red = build_reduced(gen, C, x, y, 0.0);
  if (red.basis.cols() == 0) return 0.0;
  Eigen::VectorXd gplan(red.ref.size());
  for (int u = 0; u < red.p; ++u)
    for (int v = 0; v < red.q; ++v) {
      const int c = red.cell(u, v);
      const double entry = plan.entries(red.rows[u], red.cols[v]);
      if (!(entry > 0.0))
        throw std::invalid_argument("kkt_residual: plan is not interior on spt(x) x spt(y)");
      gplan[c] = red.cost[c] + eps * (gen.prime(entry) - red.ref_prime[c]);
    }
  // Orthonormal tangent basis; the projection norm is basis-independent.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(red.basis);
  Eigen::MatrixXd thin_q =
      qr.householderQ() * Eigen::MatrixXd::Identity(red.basis.rows(), red.basis.cols());
  return (thin_q.transpose() * gplan).norm();
}

LimitPlanResult solve_limit_plan(const Generator& gen, const Eigen::MatrixXd& C, const Histogram& x,
                                 const Histogram& y, const std::vector<double>& eps_sequence,
                                 const SolveOptions& opts) {
  if (eps_sequence.empty()) throw std::invalid_argument("solve_limit_plan: empty eps sequence");
  for (std::size_t k = 0; k + 1 < eps_sequence.size(); ++k)
    if (!(eps_sequence[k] > eps_sequence[k + 1]))
      throw std::invalid_argument("solve_limit_plan: eps sequence must decrease strictly");

  LimitPlanResult out;
  out.fully_converged = true;
  const TransportPlan* warm = nullptr;
  TransportPlan carry;
  for (double eps : eps_sequence) {
    RegularizedResult res = solve_regularized(gen, C, x, y, eps, opts, warm);
    out.fully_converged = out.fully_converged && res.converged;
    carry = std::move(res.plan);
    warm = &carry;
    out.final_eps = eps;
  }
  out.plan = std::move(carry);
  return out;
}

}  // namespace bregot
