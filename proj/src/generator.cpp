#include "bregot/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "bregot/special_functions.hpp"

namespace bregot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrtPi = 1.7724538509055160273;

std::string fmt_param(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

namespace detail {

class GeneratorImpl {
 public:
  virtual ~GeneratorImpl() = default;
  virtual GeneratorFamily family() const = 0;
  virtual double domain_length() const = 0;
  virtual double value(double r) const = 0;   // r in [0, a]
  virtual double prime(double r) const = 0;   // r in (0, a]
  virtual double second(double r) const = 0;  // r in (0, a)
  virtual double prime_at_zero() const = 0;
  virtual double ru2_limit_at_zero() const = 0;
  virtual bool is_barrier() const = 0;
  virtual bool is_admissible() const = 0;
  virtual std::string spec_string() const = 0;
  virtual std::optional<double> analytic_nu(double) const { return std::nullopt; }

  // Safeguarded log-space bisection; families with closed forms override.
  virtual double inverse_prime(double tau) const {
    const double a = domain_length();
    if (prime(a) <= tau) return a;
    double lo = a;
    for (int k = 0; k < 4000; ++k) {
      lo *= 0.5;
      if (lo < 1e-320) throw std::domain_error("e_u: bisection bracket underflow");
      if (prime(lo) < tau) break;
    }
    double llo = std::log(lo), lhi = std::log(a);
    while (lhi - llo > 1e-14) {
      const double mid = 0.5 * (llo + lhi);
      if (prime(std::exp(mid)) < tau)
        llo = mid;
      else
        lhi = mid;
    }
    return std::exp(0.5 * (llo + lhi));
  }

  virtual double log_inverse_prime(double tau) const { return std::log(inverse_prime(tau)); }

  virtual double divergence(double r, double r0) const {
    if (r0 <= 0.0) {
      if (r <= 0.0) return 0.0;
      if (is_barrier()) return kInf;
      return value(r) - value(0.0) - r * prime_at_zero();
    }
    if (r == r0) return 0.0;
    const double d = value(r) - value(r0) - (r - r0) * prime(r0);
    return d > 0.0 ? d : 0.0;
  }
};

namespace {

class KlImpl final : public GeneratorImpl {
 public:
  GeneratorFamily family() const override { return GeneratorFamily::kKl; }
  double domain_length() const override { return 1.0; }
  double value(double r) const override { return r <= 0.0 ? 0.0 : r * std::log(r); }
  double prime(double r) const override { return std::log(r) + 1.0; }
  double second(double r) const override { return 1.0 / r; }
  double prime_at_zero() const override { return -kInf; }
  double ru2_limit_at_zero() const override { return 1.0; }
  bool is_barrier() const override { return true; }
  bool is_admissible() const override { return true; }
  std::string spec_string() const override { return "kl"; }
  std::optional<double> analytic_nu(double) const override { return 2.0; }
  double inverse_prime(double tau) const override { return std::exp(tau - 1.0); }
  double log_inverse_prime(double tau) const override { return tau - 1.0; }
  double divergence(double r, double r0) const override {
    if (r0 <= 0.0) return r <= 0.0 ? 0.0 : kInf;
    if (r <= 0.0) return r0;
    const double d = r * std::log(r / r0) - (r - r0);
    return d > 0.0 ? d : 0.0;
  }
};

class IncGammaImpl final : public GeneratorImpl {
 public:
  explicit IncGammaImpl(double alpha)
      : alpha_(alpha), gamma_ap1_(std::tgamma(alpha + 1.0)), gamma_a_(std::tgamma(alpha)) {}
  GeneratorFamily family() const override { return GeneratorFamily::kIncompleteGamma; }
  double domain_length() const override { return 1.0; }
  double value(double r) const override {
    if (r <= 0.0) return 0.0;
    const double x = -std::log(r);
    if (x < alpha_ + 2.0) return (r - 1.0) + reg_lower_gamma(alpha_ + 1.0, x);
    return r - upper_incomplete_gamma(alpha_ + 1.0, x) / gamma_ap1_;
  }
  double prime(double r) const override {
    const double x = -std::log(r);
    return 1.0 - std::pow(x, alpha_) / gamma_ap1_;
  }
  double second(double r) const override {
    const double x = -std::log(r);
    return std::pow(x, alpha_ - 1.0) / (gamma_a_ * r);
  }
  double prime_at_zero() const override { return -kInf; }
  double ru2_limit_at_zero() const override { return alpha_ == 1.0 ? 1.0 : 0.0; }
  bool is_barrier() const override { return true; }
  bool is_admissible() const override { return true; }
  std::string spec_string() const override { return "gamma:" + fmt_param(alpha_); }
  std::optional<double> analytic_nu(double) const override {
    if (alpha_ == 1.0) return 2.0;  // coincides with r log r
    return std::nullopt;
  }
  double inverse_prime(double tau) const override {
    return std::exp(-std::pow(gamma_ap1_ * (1.0 - tau), 1.0 / alpha_));
  }
  double log_inverse_prime(double tau) const override {
    return -std::pow(gamma_ap1_ * (1.0 - tau), 1.0 / alpha_);
  }

 private:
  double alpha_;
  double gamma_ap1_;  // Gamma(alpha + 1)
  double gamma_a_;    // Gamma(alpha)
};

class ErfcImpl final : public GeneratorImpl {
 public:
  explicit ErfcImpl(double a) : a_(a) {}
  GeneratorFamily family() const override { return GeneratorFamily::kErfcScaled; }
  double domain_length() const override { return 1.0; }
  double value(double r) const override {
    // int_0^r H(t/a) dt = -(a/sqrt(pi)) exp(-erfc_inv(2r/a)^2)
    if (r <= 0.0) return 0.0;
    const double s = erfc_inv(2.0 * r / a_);
    return -(a_ / kSqrtPi) * std::exp(-s * s);
  }
  double prime(double r) const override { return -2.0 * erfc_inv(2.0 * r / a_); }
  double second(double r) const override {
    const double s = erfc_inv(2.0 * r / a_);
    return (2.0 * kSqrtPi / a_) * std::exp(s * s);
  }
  double prime_at_zero() const override { return -kInf; }
  double ru2_limit_at_zero() const override { return 0.0; }
  bool is_barrier() const override { return true; }
  bool is_admissible() const override { return true; }
  std::string spec_string() const override { return "erfc:" + fmt_param(a_); }
  double inverse_prime(double tau) const override { return 0.5 * a_ * std::erfc(-0.5 * tau); }
  double log_inverse_prime(double tau) const override {
    return std::log(0.5 * a_) + log_erfc(-0.5 * tau);
  }

 private:
  double a_;
};

class FermiImpl final : public GeneratorImpl {
 public:
  explicit FermiImpl(double a) : a_(a) {}
  GeneratorFamily family() const override { return GeneratorFamily::kFermiDiracScaled; }
  double domain_length() const override { return 1.0; }
  double value(double r) const override {
    if (r <= 0.0) return 0.0;
    return r * std::log(r / a_) + (a_ - r) * std::log1p(-r / a_);
  }
  double prime(double r) const override { return std::log(r) - std::log(a_ - r); }
  double second(double r) const override { return 1.0 / r + 1.0 / (a_ - r); }
  double prime_at_zero() const override { return -kInf; }
  double ru2_limit_at_zero() const override { return 1.0; }
  bool is_barrier() const override { return true; }
  bool is_admissible() const override { return true; }
  std::string spec_string() const override { return "fermi:" + fmt_param(a_); }
  double inverse_prime(double tau) const override {
    if (tau < 0.0) {
      const double e = std::exp(tau);
      return a_ * e / (1.0 + e);
    }
    return a_ / (1.0 + std::exp(-tau));
  }
  double log_inverse_prime(double tau) const override {
    if (tau < 0.0) return std::log(a_) + tau - std::log1p(std::exp(tau));
    return std::log(a_) - std::log1p(std::exp(-tau));
  }

 private:
  double a_;
};

class QLogImpl final : public GeneratorImpl {
 public:
  explicit QLogImpl(double q) : q_(q) {}
  GeneratorFamily family() const override { return GeneratorFamily::kQLog; }
  double domain_length() const override { return 1.0; }
  double value(double r) const override {
    if (q_ == 1.0) return r <= 0.0 ? 0.0 : r * std::log(r) - r;
    if (q_ < 2.0) {
      if (r <= 0.0) return 0.0;
      return std::pow(r, 2.0 - q_) / ((1.0 - q_) * (2.0 - q_)) - r / (1.0 - q_);
    }
    // Antiderivative anchored at r = 1; diverges at r = 0.
    if (r <= 0.0) return kInf;
    if (q_ == 2.0) return (r - 1.0) - std::log(r);
    return (std::pow(r, 2.0 - q_) - 1.0) / ((1.0 - q_) * (2.0 - q_)) - (r - 1.0) / (1.0 - q_);
  }
  double prime(double r) const override {
    if (q_ == 1.0) return std::log(r);
    return (std::pow(r, 1.0 - q_) - 1.0) / (1.0 - q_);
  }
  double second(double r) const override { return std::pow(r, -q_); }
  double prime_at_zero() const override { return q_ >= 1.0 ? -kInf : -1.0 / (1.0 - q_); }
  double ru2_limit_at_zero() const override {
    if (q_ < 1.0) return 0.0;
    return q_ == 1.0 ? 1.0 : kInf;
  }
  bool is_barrier() const override { return q_ >= 1.0; }
  bool is_admissible() const override { return q_ == 1.0; }
  std::string spec_string() const override { return "qlog:" + fmt_param(q_); }
  std::optional<double> analytic_nu(double) const override {
    if (q_ == 1.0) return 1.0;  // (r log r - r) shifts the KL value by -1
    return std::nullopt;
  }
  double inverse_prime(double tau) const override {
    if (q_ == 1.0) return std::exp(tau);
    const double base = 1.0 + (1.0 - q_) * tau;
    if (base <= 0.0) throw std::domain_error("e_u: tau below the q-log range");
    return std::pow(base, 1.0 / (1.0 - q_));
  }
  double log_inverse_prime(double tau) const override {
    if (q_ == 1.0) return tau;
    const double base = 1.0 + (1.0 - q_) * tau;
    if (base <= 0.0) throw std::domain_error("e_u: tau below the q-log range");
    return std::log(base) / (1.0 - q_);
  }

 private:
  double q_;
};

class AffineImpl final : public GeneratorImpl {
 public:
  AffineImpl(std::shared_ptr<const GeneratorImpl> base, double lambda, double mu0, double mu1)
      : base_(std::move(base)), lambda_(lambda), mu0_(mu0), mu1_(mu1) {}
  GeneratorFamily family() const override { return GeneratorFamily::kAffine; }
  double domain_length() const override { return base_->domain_length(); }
  double value(double r) const override { return lambda_ * base_->value(r) + mu1_ * r + mu0_; }
  double prime(double r) const override { return lambda_ * base_->prime(r) + mu1_; }
  double second(double r) const override { return lambda_ * base_->second(r); }
  double prime_at_zero() const override { return lambda_ * base_->prime_at_zero() + mu1_; }
  double ru2_limit_at_zero() const override { return lambda_ * base_->ru2_limit_at_zero(); }
  bool is_barrier() const override { return base_->is_barrier(); }
  bool is_admissible() const override { return base_->is_admissible(); }
  std::string spec_string() const override {
    return "affine(" + base_->spec_string() + "," + fmt_param(lambda_) + "," + fmt_param(mu0_) +
           "," + fmt_param(mu1_) + ")";
  }
  std::optional<double> analytic_nu(double r_upper) const override {
    if (auto nu = base_->analytic_nu(r_upper)) return lambda_ * *nu + mu1_;
    return std::nullopt;
  }
  double inverse_prime(double tau) const override {
    return base_->inverse_prime((tau - mu1_) / lambda_);
  }
  double log_inverse_prime(double tau) const override {
    return base_->log_inverse_prime((tau - mu1_) / lambda_);
  }
  // d_{lambda U + mu1 r + mu0} = lambda d_U exactly; the affine terms cancel.
  double divergence(double r, double r0) const override {
    return lambda_ * base_->divergence(r, r0);
  }

  const GeneratorImpl& base() const { return *base_; }
  std::shared_ptr<const GeneratorImpl> base_ptr() const { return base_; }
  double lambda() const { return lambda_; }
  double mu0() const { return mu0_; }
  double mu1() const { return mu1_; }

 private:
  std::shared_ptr<const GeneratorImpl> base_;
  double lambda_, mu0_, mu1_;
};

class ScaledImpl final : public GeneratorImpl {
 public:
  ScaledImpl(std::shared_ptr<const GeneratorImpl> base, double a, double b)
      : base_(std::move(base)), a_(a), b_(b) {}
  GeneratorFamily family() const override { return GeneratorFamily::kScaled; }
  double domain_length() const override { return a_; }
  double value(double r) const override { return (a_ / b_) * base_->value(map(r)); }
  double prime(double r) const override { return base_->prime(map(r)); }
  double second(double r) const override { return (b_ / a_) * base_->second(map(r)); }
  double prime_at_zero() const override { return base_->prime_at_zero(); }
  double ru2_limit_at_zero() const override { return base_->ru2_limit_at_zero(); }
  bool is_barrier() const override { return base_->is_barrier(); }
  bool is_admissible() const override { return base_->is_admissible(); }
  std::string spec_string() const override {
    return "scale(" + base_->spec_string() + "," + fmt_param(a_) + "," + fmt_param(b_) + ")";
  }
  std::optional<double> analytic_nu(double r_upper) const override {
    // g_{W_b^a}(r) = g_base(b r / a) pointwise, so the supremum carries over.
    return base_->analytic_nu(map(r_upper));
  }
  double inverse_prime(double tau) const override { return (a_ / b_) * base_->inverse_prime(tau); }
  double log_inverse_prime(double tau) const override {
    return std::log(a_ / b_) + base_->log_inverse_prime(tau);
  }
  double divergence(double r, double r0) const override {
    return (a_ / b_) * base_->divergence(map(r), map(r0));
  }

 private:
  double map(double r) const { return std::min(b_ * r / a_, b_); }
  std::shared_ptr<const GeneratorImpl> base_;
  double a_, b_;
};

}  // namespace
}  // namespace detail

Generator::Generator(std::shared_ptr<const detail::GeneratorImpl> impl) : impl_(std::move(impl)) {
  domain_length_ = impl_->domain_length();
  u1_prime_ = impl_->prime(domain_length_);
  spec_ = impl_->spec_string();
}

Generator Generator::kl() { return Generator(std::make_shared<detail::KlImpl>()); }

Generator Generator::incomplete_gamma(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("gamma generator: alpha must lie in (0, 1]");
  return Generator(std::make_shared<detail::IncGammaImpl>(alpha));
}

Generator Generator::erfc_scaled(double a) {
  if (!(a > 1.0)) throw std::invalid_argument("erfc generator: scale a must exceed 1");
  return Generator(std::make_shared<detail::ErfcImpl>(a));
}

Generator Generator::fermi_dirac_scaled(double a) {
  if (!(a > 1.0)) throw std::invalid_argument("fermi generator: scale a must exceed 1");
  return Generator(std::make_shared<detail::FermiImpl>(a));
}

Generator Generator::q_log(double q) {
  if (!std::isfinite(q)) throw std::invalid_argument("qlog generator: q must be finite");
  return Generator(std::make_shared<detail::QLogImpl>(q));
}

GeneratorFamily Generator::family() const { return impl_->family(); }
bool Generator::is_barrier() const { return impl_->is_barrier(); }
bool Generator::is_admissible() const { return impl_->is_admissible(); }
double Generator::prime_at_zero() const { return impl_->prime_at_zero(); }
double Generator::ru2_limit_at_zero() const { return impl_->ru2_limit_at_zero(); }
std::optional<double> Generator::analytic_nu(double r_upper) const {
  return impl_->analytic_nu(r_upper);
}

namespace {

// Inputs a hair outside [0, a] from upstream rounding are clamped; anything
// further out is a caller bug.
double clamp_domain(double r, double a, const char* what) {
  const double tol = 1e-9 * std::max(1.0, a);
  if (!(r >= -tol) || !(r <= a + tol))
    throw std::domain_error(std::string(what) + ": argument outside [0, " + fmt_param(a) + "]");
  return std::clamp(r, 0.0, a);
}

}  // namespace

double Generator::value(double r) const {
  return impl_->value(clamp_domain(r, domain_length_, "u_value"));
}

double Generator::prime(double r) const {
  r = clamp_domain(r, domain_length_, "u_prime");
  if (r == 0.0) return impl_->prime_at_zero();
  return impl_->prime(r);
}

double Generator::second(double r) const {
  // Half-open: U'' extends continuously (possibly to +inf) at the right
  // endpoint for every shipped family, and the scaled families are smooth
  // there outright.
  if (!(r > 0.0) || r > domain_length_ * (1.0 + 1e-12))
    throw std::domain_error("u_second: argument must lie in (0, " + fmt_param(domain_length_) +
                            "]");
  return impl_->second(std::min(r, domain_length_));
}

double Generator::inverse_prime(double tau) const {
  const double slack = 1e-9 * (1.0 + std::abs(u1_prime_));
  if (tau > u1_prime_ + slack)
    throw std::domain_error("e_u: tau exceeds U'(a) = " + fmt_param(u1_prime_));
  return impl_->inverse_prime(std::min(tau, u1_prime_));
}

double Generator::log_inverse_prime(double tau) const {
  const double slack = 1e-9 * (1.0 + std::abs(u1_prime_));
  if (tau > u1_prime_ + slack)
    throw std::domain_error("e_u: tau exceeds U'(a) = " + fmt_param(u1_prime_));
  return impl_->log_inverse_prime(std::min(tau, u1_prime_));
}

double Generator::divergence(double r, double r0) const {
  r = clamp_domain(r, domain_length_, "d_u");
  r0 = clamp_domain(r0, domain_length_, "d_u");
  return impl_->divergence(r, r0);
}

double u_value(const Generator& gen, double r) { return gen.value(r); }
double u_prime(const Generator& gen, double r) { return gen.prime(r); }
double u_second(const Generator& gen, double r) { return gen.second(r); }
double e_u(const Generator& gen, double tau) { return gen.inverse_prime(tau); }
double d_u(const Generator& gen, double r, double r0) { return gen.divergence(r, r0); }

Generator affine(const Generator& gen, double lambda, double mu0, double mu1) {
  if (!(lambda > 0.0)) throw std::invalid_argument("affine: lambda must be positive");
  auto base = gen.impl_;
  if (auto* nested = dynamic_cast<const detail::AffineImpl*>(base.get())) {
    // lambda2 (lambda1 U + mu11 r + mu01) + mu12 r + mu02
    const double l = lambda * nested->lambda();
    const double m0 = lambda * nested->mu0() + mu0;
    const double m1 = lambda * nested->mu1() + mu1;
    base = nested->base_ptr();
    lambda = l;
    mu0 = m0;
    mu1 = m1;
  }
  if (lambda == 1.0 && mu0 == 0.0 && mu1 == 0.0) return Generator(base);
  return Generator(std::make_shared<detail::AffineImpl>(base, lambda, mu0, mu1));
}

Generator domain_scale(const Generator& gen, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("domain_scale: a, b must be positive");
  if (std::abs(gen.domain_length() - b) > 1e-12 * std::max(1.0, b))
    throw std::invalid_argument("domain_scale: base generator is defined on [0, " +
                                fmt_param(gen.domain_length()) + "], not [0, " + fmt_param(b) +
                                "]");
  if (a == b) return gen;
  return Generator(std::make_shared<detail::ScaledImpl>(gen.impl_, a, b));
}

Generator normalize(const Generator& gen) {
  const double a = gen.domain_length();
  const double u0 = gen.value(0.0);
  const double ua = gen.value(a);
  const double upa = gen.u1_prime();
  if (!std::isfinite(u0) || !std::isfinite(ua) || !std::isfinite(upa))
    throw std::invalid_argument("normalize: generator values not finite on [0, a]");
  if (std::abs(u0) <= 1e-12 && std::abs(ua) <= 1e-12 && std::abs(upa - 1.0) <= 1e-12) return gen;
  // Solve lambda U + mu1 r + mu0 for value 0 at both endpoints and slope 1
  // at a; lambda > 0 because the chord slope is below U'(a) by convexity.
  const double chord = (ua - u0) / a;
  const double lambda = 1.0 / (upa - chord);
  const double mu0 = -lambda * u0;
  const double mu1 = -lambda * chord;
  return affine(gen, lambda, mu0, mu1);
}

double extend_beyond_one(const Generator& gen, double r) {
  if (!(r >= 0.0)) throw std::domain_error("extend_beyond_one: r must be nonnegative");
  const double a = gen.domain_length();
  if (r <= a) return gen.value(r);
  const double upa = gen.u1_prime();
  const double ua = gen.value(a);
  // C^1 match of r log r + beta r + gamma at r = a.
  const double beta = upa - 1.0 - std::log(a);
  const double gamma = ua + a - a * upa;
  return r * std::log(r) + beta * r + gamma;
}

AssumptionReport check_assumptions(const Generator& gen, int grid_size) {
  if (grid_size < 16) throw std::invalid_argument("check_assumptions: grid_size must be >= 16");
  const double a = gen.domain_length();
  AssumptionReport report;

  // Mixed grid: log-spaced cluster near 0 plus uniform coverage.
  std::vector<double> grid;
  const int n_log = grid_size / 2;
  for (int i = 0; i < n_log; ++i) {
    const double t = static_cast<double>(i) / (n_log - 1);
    grid.push_back(a * std::exp(std::log(1e-8) * (1.0 - t) + std::log(0.1) * t));
  }
  const int n_lin = grid_size - n_log;
  for (int i = 0; i < n_lin; ++i)
    grid.push_back(a * (0.1 + (0.9 - 1e-6) * (i + 1.0) / n_lin));
  std::sort(grid.begin(), grid.end());

  report.convex_ok = true;
  for (double r : grid) {
    const double w = gen.second(r);
    if (!(w > 0.0)) report.convex_ok = false;
  }

  // Barrier evidence: U'(a 2^{-k}) must fall monotonically, and the
  // decrements must not die off geometrically (they do exactly when U'(0+)
  // is finite). A huge terminal value short-circuits the ratio test.
  {
    std::vector<double> p(61);
    for (int k = 1; k <= 60; ++k) p[k] = gen.prime(a * std::ldexp(1.0, -k));
    bool decreasing = true;
    for (int k = 2; k <= 60; ++k)
      if (!(p[k] < p[k - 1])) decreasing = false;
    const double d30 = p[29] - p[30];
    const double d60 = p[59] - p[60];
    report.barrier_ok =
        decreasing && (p[60] < -1e3 || (d60 >= 0.25 * d30 && d60 > 1e-12 * (1.0 + std::abs(p[60]))));
  }

  report.ru2_monotone_ok = true;
  double prev = grid.front() * gen.second(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = grid[i] * gen.second(grid[i]);
    if (cur < prev * (1.0 - 1e-9) - 1e-12) report.ru2_monotone_ok = false;
    prev = cur;
  }

  // q_U by central differences of U'' away from the endpoints.
  report.big_q_estimate = -kInf;
  for (double r : grid) {
    if (r < 1e-6 * a || r > a * (1.0 - 1e-3)) continue;
    const double h = std::max(1e-12, 1e-5 * std::min(r, a - r));
    const double w0 = gen.second(r);
    const double dw = (gen.second(r + h) - gen.second(r - h)) / (2.0 * h);
    const double q = -r * dw / w0;
    report.q_values.emplace_back(r, q);
    report.big_q_estimate = std::max(report.big_q_estimate, q);
  }

  report.admissible = report.convex_ok && report.barrier_ok && report.ru2_monotone_ok;
  return report;
}

namespace {

std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_number(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size()) throw std::invalid_argument("generator spec: bad number '" + s + "'");
  return v;
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

Generator parse_generator(const std::string& raw) {
  const std::string spec = strip(raw);
  if (spec == "kl") return Generator::kl();
  if (spec.rfind("gamma:", 0) == 0) return Generator::incomplete_gamma(parse_number(spec.substr(6)));
  if (spec.rfind("erfc:", 0) == 0) return Generator::erfc_scaled(parse_number(spec.substr(5)));
  if (spec.rfind("fermi:", 0) == 0) return Generator::fermi_dirac_scaled(parse_number(spec.substr(6)));
  if (spec.rfind("qlog:", 0) == 0) return Generator::q_log(parse_number(spec.substr(5)));
  if (spec.rfind("affine(", 0) == 0 && spec.back() == ')') {
    const auto parts = split_top_level(spec.substr(7, spec.size() - 8));
    if (parts.size() != 4)
      throw std::invalid_argument("generator spec: affine needs (spec,lambda,mu0,mu1)");
    return affine(parse_generator(parts[0]), parse_number(parts[1]), parse_number(parts[2]),
                  parse_number(parts[3]));
  }
  if (spec.rfind("scale(", 0) == 0 && spec.back() == ')') {
    const auto parts = split_top_level(spec.substr(6, spec.size() - 7));
    if (parts.size() != 3) throw std::invalid_argument("generator spec: scale needs (spec,a,b)");
    return domain_scale(parse_generator(parts[0]), parse_number(parts[1]), parse_number(parts[2]));
  }
  throw std::invalid_argument("unrecognized generator spec '" + raw + "'");
}

}  // namespace bregot
