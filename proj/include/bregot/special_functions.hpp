#pragma once

namespace bregot {

// Upper incomplete gamma function Gamma(p, x) = int_x^inf t^{p-1} e^{-t} dt
// for p > 0, x >= 0. Relative accuracy ~1e-14 for p <= 30.
double upper_incomplete_gamma(double p, double x);

// Regularized incomplete gamma functions P(p,x) = gamma(p,x)/Gamma(p) and
// Q(p,x) = Gamma(p,x)/Gamma(p). P + Q = 1.
double reg_lower_gamma(double p, double x);
double reg_upper_gamma(double p, double x);

// Inverse of the complementary error function on (0, 2).
// erfc_inv(0+) = +inf, erfc_inv(1) = 0, erfc_inv(2-) = -inf.
double erfc_inv(double y);

// log(erfc(z)) for any real z, asymptotic expansion for large z so the
// result stays finite long after erfc itself underflows.
double log_erfc(double z);

}  // namespace bregot
