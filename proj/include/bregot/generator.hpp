#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bregot {

enum class GeneratorFamily {
  kKl,                // U(r) = r log r
  kIncompleteGamma,   // U_alpha, alpha in (0, 1]
  kErfcScaled,        // scaled inverse-erfc generator, shape a > 1
  kFermiDiracScaled,  // scaled Fermi-Dirac entropy, shape a > 1
  kQLog,              // q-logarithm derivative, admissible only at q = 1
  kAffine,            // lambda * U + mu1 * r + mu0
  kScaled,            // domain rescaled from [0, b] to [0, a]
};

namespace detail {
class GeneratorImpl;
}

// A strictly convex generator function U on [0, domain_length], immutable
// after construction and safe for concurrent use. Copies share the
// underlying implementation.
class Generator {
 public:
  static Generator kl();
  static Generator incomplete_gamma(double alpha);   // alpha in (0, 1]
  static Generator erfc_scaled(double a);            // a > 1
  static Generator fermi_dirac_scaled(double a);     // a > 1
  static Generator q_log(double q);

  GeneratorFamily family() const;
  double domain_length() const { return domain_length_; }
  double u1_prime() const { return u1_prime_; }  // U'(domain_length), cached
  const std::string& spec() const { return spec_; }

  bool is_barrier() const;     // U'(0+) = -inf
  bool is_admissible() const;  // structurally satisfies the convexity,
                               // barrier and r U''(r) monotonicity assumptions

  double value(double r) const;          // U(r), r in [0, a]
  double prime(double r) const;          // U'(r); -inf limit at r = 0
  double second(double r) const;         // U''(r), r in (0, a)
  double inverse_prime(double tau) const;      // e_U, tau <= U'(a)
  double log_inverse_prime(double tau) const;  // log e_U(tau), underflow-safe
  double divergence(double r, double r0) const;  // d_U on [0,a]^2, may be +inf

  double prime_at_zero() const;      // limit of U' at 0
  double ru2_limit_at_zero() const;  // limit of r U''(r) as r -> 0
  // Closed-form nu over (0, r_upper] where the family admits one.
  std::optional<double> analytic_nu(double r_upper) const;

 private:
  explicit Generator(std::shared_ptr<const detail::GeneratorImpl> impl);
  std::shared_ptr<const detail::GeneratorImpl> impl_;
  double domain_length_;
  double u1_prime_;
  std::string spec_;

  friend Generator affine(const Generator&, double, double, double);
  friend Generator domain_scale(const Generator&, double, double);
};

struct AssumptionReport {
  bool convex_ok = false;
  bool barrier_ok = false;
  bool ru2_monotone_ok = false;
  std::vector<std::pair<double, double>> q_values;  // (r, q_U(r))
  double big_q_estimate = 0.0;
  bool admissible = false;
};

// Pointwise calculus, spec'd domains enforced.
double u_value(const Generator& gen, double r);
double u_prime(const Generator& gen, double r);
double u_second(const Generator& gen, double r);
double e_u(const Generator& gen, double tau);
double d_u(const Generator& gen, double r, double r0);

// Coordinatewise Bregman divergence D_U(z, w); +inf is a value, not an error.
template <typename DerivedZ, typename DerivedW>
double bregman_divergence(const Generator& gen, const Eigen::MatrixBase<DerivedZ>& z,
                          const Eigen::MatrixBase<DerivedW>& w) {
  if (z.rows() != w.rows() || z.cols() != w.cols())
    throw std::invalid_argument("bregman_divergence: shape mismatch");
  double total = 0.0;
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      total += gen.divergence(z(i, j), w(i, j));
  return total;
}

// U_{lambda,mu0,mu1}(r) = lambda U(r) + mu1 r + mu0. Nested wrappers are
// flattened and the identity wrapper collapses to the base generator.
Generator affine(const Generator& gen, double lambda, double mu0, double mu1);

// W_b^a(r) = a b^{-1} U(a^{-1} b r), carrying the domain [0, a].
// Requires gen.domain_length() == b.
Generator domain_scale(const Generator& gen, double a, double b);

// Affine wrapper restoring U(0) = U(a) = 0, U'(a) = 1; identity when the
// generator already satisfies it.
Generator normalize(const Generator& gen);

// U on [0, a] continued past a by the C^1 logarithmic tail
// r log r + (U'(1) - 1) r + (1 + U(1) - U'(1)) in the unit-domain case.
double extend_beyond_one(const Generator& gen, double r);

// Samples convexity, the barrier at 0, monotonicity of r U''(r) and the
// finite-difference q_U(r) = -r U'''(r)/U''(r). Inadmissible generators get
// admissible = false, never an exception.
AssumptionReport check_assumptions(const Generator& gen, int grid_size);

// Spec strings: kl | gamma:<alpha> | erfc:<a> | fermi:<a> | qlog:<q>
//             | affine(<spec>,<lambda>,<mu0>,<mu1>) | scale(<spec>,<a>,<b>)
Generator parse_generator(const std::string& spec);

}  // namespace bregot
