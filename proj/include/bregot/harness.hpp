#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bregot/polytope.hpp"

namespace bregot {

struct EpsGrid {
  enum class Kind { kLog, kLinear };
  Kind kind = Kind::kLog;
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;

  std::vector<double> points() const;  // ascending
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int I = 3;
  int J = 3;
  // Empty histograms select the preset x = (0.1, 0.2, 0.7), y = (0.3, 0.4, 0.3).
  std::optional<Histogram> x;
  std::optional<Histogram> y;
  // Explicit cost matrix; when absent, C is generated from the seed.
  std::optional<Eigen::MatrixXd> cost;
  std::vector<std::string> generator_specs;
  EpsGrid eps_grid;
  std::string output_path;  // empty: no CSV written
};

struct SweepRow {
  std::string generator;
  double eps = 0.0;
  double error = 0.0;                      // <C, plan> - LP value
  std::optional<double> theorem_bound;     // empty: eps outside the interval
  double naive_bound = 0.0;
  double log_error_ratio = 0.0;            // ln(error / delta)
  std::optional<double> log_bound_ratio;   // ln(bound / delta)
  bool converged = false;
};

// The built-in 3-bin benchmark marginals used by the figure protocols;
// configs select them with the preset name "paper".
Histogram preset_x();
Histogram preset_y();

// Deterministic cost matrix: xoshiro256++ stream from `seed`, row-major
// uniform (0, 1) entries.
Eigen::MatrixXd generate_instance(std::uint64_t seed, int I, int J);

// Same stream extended past the cost entries by I + J more draws,
// normalized into marginals. Used by the seeded test instances.
struct Instance {
  Eigen::MatrixXd C;
  Histogram x;
  Histogram y;
};
Instance generate_dataset(std::uint64_t seed, int I, int J);

// One LP solve plus a warm-started regularized solve per (generator, eps),
// generators running concurrently. Rows come back sorted by (generator,
// eps); eps values outside the valid interval carry empty bound fields but
// still report error and the naive bound. Writes CSV when the config names
// an output path.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config);

// Figure protocols on the preset marginals and a seeded 3x3 cost matrix:
//   1: kl plus gamma alpha in {1, 1/2, 1/3, 1/4}
//   2: kl plus erfc a in {2, 3, 4, 5}
//   3: kl plus fermi a in {2, 3, 4, 5}
// The eps grid is shared across figures (30 log points spanning three
// decades below the kl eps_max), so the kl series is identical in all three.
std::vector<SweepRow> reproduce_figure(int fig_id, std::uint64_t seed,
                                       const std::string& output_path);

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

// Minimal static line chart: ln(error/delta) solid, ln(bound/delta) dashed,
// one color per generator, log10-eps abscissa.
void write_sweep_svg(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace bregot
