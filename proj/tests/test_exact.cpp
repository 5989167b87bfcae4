#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <limits>

#include "bregot/exact.hpp"
#include "bregot/random.hpp"
#include "oracles.hpp"

using bregot::Generator;
using bregot::Histogram;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2 = 0.6931471805599453094;

Histogram hist(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index k = 0;
  for (double x : vals) v[k++] = x;
  const double mass = v.sum();
  return Histogram(v, mass);
}

Histogram random_hist(bregot::Xoshiro256pp& rng, int n) {
  Eigen::VectorXd v(n);
  for (int k = 0; k < n; ++k) v[k] = rng.uniform_open01();
  v /= v.sum();
  return Histogram(v, 1.0);
}

Eigen::MatrixXd e1_cost() {
  Eigen::MatrixXd C(2, 2);
  C << 0, 1, 1, 0;
  return C;
}

}  // namespace

TEST_CASE("solve_lp: diagonal instance and constant costs") {
  const Histogram half = hist({0.5, 0.5});
  const bregot::LPResult res = solve_lp(e1_cost(), half, half);
  CHECK(res.optimal_value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(res.optimal_plan.entries(0, 0) == doctest::Approx(0.5));
  CHECK(res.optimal_plan.entries(0, 1) == doctest::Approx(0.0));
  CHECK(res.optimal_vertices.size() == 1);

  const Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(2, 2, 3.0);
  const bregot::LPResult flat = solve_lp(constant, half, half);
  CHECK(flat.optimal_value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(flat.optimal_vertices.size() == 2);  // every vertex optimal
}

TEST_CASE("solve_lp agrees with the vertex-enumeration oracle on random instances") {
  bregot::Xoshiro256pp rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int I = 2 + static_cast<int>(rng.next() % 3);
    const int J = 2 + static_cast<int>(rng.next() % 3);
    const Histogram x = random_hist(rng, I);
    const Histogram y = random_hist(rng, J);
    Eigen::MatrixXd C(I, J);
    for (int i = 0; i < I; ++i)
      for (int j = 0; j < J; ++j) C(i, j) = rng.uniform_open01();

    const bregot::VertexSet vs = enumerate_vertices(x, y);
    double best = kInf;
    for (const auto& v : vs.vertices) best = std::min(best, C.cwiseProduct(v.entries).sum());
    CHECK(solve_lp(C, x, y).optimal_value == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("weak duality: LP value below any feasible plan's objective") {
  bregot::Xoshiro256pp rng(17);
  const Histogram x = random_hist(rng, 3);
  const Histogram y = random_hist(rng, 3);
  Eigen::MatrixXd C(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) C(i, j) = rng.uniform_open01();
  const double lp = solve_lp(C, x, y).optimal_value;
  const bregot::VertexSet vs = enumerate_vertices(x, y);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd w(vs.vertices.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = rng.uniform_open01();
    w /= w.sum();
    Eigen::MatrixXd mix = Eigen::MatrixXd::Zero(3, 3);
    for (std::size_t k = 0; k < vs.vertices.size(); ++k)
      mix += w[static_cast<Eigen::Index>(k)] * vs.vertices[k].entries;
    CHECK(lp <= C.cwiseProduct(mix).sum() + 1e-12);
  }
}

TEST_CASE("network simplex matches enumeration on random instances") {
  bregot::Xoshiro256pp rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const int I = 2 + static_cast<int>(rng.next() % 4);
    const int J = 2 + static_cast<int>(rng.next() % 4);
    const Histogram x = random_hist(rng, I);
    const Histogram y = random_hist(rng, J);
    Eigen::MatrixXd C(I, J);
    for (int i = 0; i < I; ++i)
      for (int j = 0; j < J; ++j) C(i, j) = rng.uniform_open01();
    const auto ns = bregot::detail::network_simplex(C, x.values, y.values);
    const double exact = solve_lp(C, x, y).optimal_value;
    CHECK(std::abs(ns.value - exact) <= 1e-9 * (1.0 + std::abs(exact)));
    CHECK(validate_plan(bregot::TransportPlan{ns.plan}, x, y, 1e-9).ok);
  }
}

TEST_CASE("network simplex handles a larger-than-guard instance") {
  bregot::Xoshiro256pp rng(31);
  const int I = 9, J = 8;  // beyond the enumeration guard
  const Histogram x = random_hist(rng, I);
  const Histogram y = random_hist(rng, J);
  Eigen::MatrixXd C(I, J);
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j) C(i, j) = rng.uniform_open01();
  const bregot::LPResult res = solve_lp(C, x, y);
  CHECK(res.optimal_vertices.empty());
  CHECK(validate_plan(res.optimal_plan, x, y, 1e-9).ok);
  CHECK(res.optimal_value < C.cwiseProduct(product_plan(x, y).entries).sum() + 1e-12);
}

TEST_CASE("suboptimality_gap: examples") {
  const Histogram half = hist({0.5, 0.5});
  const bregot::GapReport gap = suboptimality_gap(e1_cost(), half, half);
  CHECK(gap.best_value == doctest::Approx(0.0));
  CHECK(gap.second_value == doctest::Approx(1.0));
  CHECK(gap.delta == doctest::Approx(1.0).epsilon(1e-12));

  const bregot::GapReport flat =
      suboptimality_gap(Eigen::MatrixXd::Constant(2, 2, 3.0), half, half);
  CHECK(flat.delta == kInf);

  // Uniform-random 3x3 instances: delta is small and positive.
  bregot::Xoshiro256pp rng(101);
  const Histogram px = hist({0.1, 0.2, 0.7});
  const Histogram py = hist({0.3, 0.4, 0.3});
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd C(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) C(i, j) = rng.uniform_open01();
    const bregot::GapReport g = suboptimality_gap(C, px, py);
    CHECK(g.delta > 0.0);
    CHECK(g.delta < 1.0);
  }
}

TEST_CASE("check_assumption_xy: non-constant objective required") {
  const Histogram half = hist({0.5, 0.5});
  CHECK(check_assumption_xy(e1_cost(), half, half));
  CHECK_FALSE(check_assumption_xy(Eigen::MatrixXd::Constant(2, 2, 1.0), half, half));
  // Point polytope: argmin is everything even for non-constant C.
  Eigen::MatrixXd C(1, 2);
  C << 0.2, 0.9;
  CHECK_FALSE(check_assumption_xy(C, hist({1.0}), hist({0.3, 0.7})));
}

TEST_CASE("gap positive whenever the assumption holds") {
  bregot::Xoshiro256pp rng(57);
  for (int trial = 0; trial < 20; ++trial) {
    const Histogram x = random_hist(rng, 3);
    const Histogram y = random_hist(rng, 3);
    Eigen::MatrixXd C(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) C(i, j) = rng.uniform_open01();
    if (check_assumption_xy(C, x, y)) {
      const auto gap = suboptimality_gap(C, x, y);
      CHECK(gap.delta > 0.0);
      CHECK(std::isfinite(gap.delta));
    }
  }
}

TEST_CASE("divergence_radius: closed cases and the entropy identity") {
  const Generator kl = Generator::kl();
  const Histogram half = hist({0.5, 0.5});
  CHECK(divergence_radius(kl, half, half) == doctest::Approx(kLog2).epsilon(1e-12));

  // Point polytope: only plan is x (x) y.
  CHECK(divergence_radius(kl, hist({1.0}), hist({0.3, 0.7})) == doctest::Approx(0.0));

  // D_KL(Pi, x(x)y) = -S(Pi) + S(x) + S(y) on the polytope.
  const Histogram px = hist({0.1, 0.2, 0.7});
  const Histogram py = hist({0.3, 0.4, 0.3});
  const bregot::VertexSet vs = enumerate_vertices(px, py);
  double best = -kInf;
  for (const auto& v : vs.vertices) best = std::max(best, -oracles::shannon_entropy(v.entries));
  const double identity = best + oracles::shannon_entropy(px.values) +
                          oracles::shannon_entropy(py.values);
  CHECK(divergence_radius(kl, px, py) == doctest::Approx(identity).epsilon(1e-10));

  CHECK_THROWS_AS(divergence_radius(Generator::q_log(2.0), half, half), std::invalid_argument);
}

TEST_CASE("divergence_radius dominates random mixtures (vertex attainment)") {
  bregot::Xoshiro256pp rng(71);
  const Histogram x = random_hist(rng, 3);
  const Histogram y = random_hist(rng, 3);
  const bregot::TransportPlan ref = product_plan(x, y);
  const bregot::VertexSet vs = enumerate_vertices(x, y);
  for (const Generator& gen : {Generator::kl(), Generator::incomplete_gamma(0.5),
                               Generator::erfc_scaled(2.0), Generator::fermi_dirac_scaled(2.0)}) {
    const double radius = divergence_radius(gen, x, y);
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::VectorXd w(vs.vertices.size());
      for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = rng.uniform_open01();
      w /= w.sum();
      Eigen::MatrixXd mix = Eigen::MatrixXd::Zero(3, 3);
      for (std::size_t k = 0; k < vs.vertices.size(); ++k)
        mix += w[static_cast<Eigen::Index>(k)] * vs.vertices[k].entries;
      CHECK(bregman_divergence(gen, mix, ref.entries) <= radius + 1e-10);
    }
  }
}

TEST_CASE("radius scaling: scaled generator on scaled data multiplies by a") {
  bregot::Xoshiro256pp rng(83);
  const Histogram x = random_hist(rng, 3);
  const Histogram y = random_hist(rng, 3);
  for (const Generator& gen : {Generator::kl(), Generator::incomplete_gamma(0.5)}) {
    const double base = divergence_radius(gen, x, y);
    for (double a : {2.0, 5.0}) {
      const Generator scaled = domain_scale(gen, a, 1.0);
      const Histogram ax(a * x.values, a);
      const Histogram ay(a * y.values, a);
      const double scaled_radius = divergence_radius(scaled, ax, ay);
      CHECK(std::abs(scaled_radius - a * base) <= 1e-10 * (1.0 + a * base));
    }
  }
}

TEST_CASE("suboptimality_gap: ties below the tolerance collapse into one level") {
  // Two vertices share the optimum exactly; the third sits 0.5 above.
  const Histogram x = hist({0.5, 0.5});
  const Histogram y = hist({0.25, 0.25, 0.5});
  Eigen::MatrixXd C(2, 3);
  C << 0, 0, 1, 0, 0, 0;
  const bregot::GapReport report = suboptimality_gap(C, x, y);
  CHECK(std::isfinite(report.delta));
  CHECK(report.delta > 0.0);
  // A tie tolerance wide enough swallows every vertex: delta = inf.
  const bregot::GapReport wide = suboptimality_gap(C, x, y, 10.0);
  CHECK(wide.delta == kInf);
}

TEST_CASE("network simplex copes with zero-mass bins") {
  Eigen::VectorXd xv(3), yv(3);
  xv << 0.5, 0.0, 0.5;
  yv << 0.25, 0.5, 0.25;
  Eigen::MatrixXd C(3, 3);
  C << 0.3, 0.9, 0.1, 0.8, 0.2, 0.5, 0.6, 0.7, 0.4;
  const auto ns = bregot::detail::network_simplex(C, xv, yv);
  const Histogram x(xv, 1.0), y(yv, 1.0);
  CHECK(std::abs(ns.value - solve_lp(C, x, y).optimal_value) < 1e-9);
  CHECK(validate_plan(bregot::TransportPlan{ns.plan}, x, y, 1e-9).ok);
}
