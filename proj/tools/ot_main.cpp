#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "bregot/bounds.hpp"
#include "bregot/exact.hpp"
#include "bregot/generator.hpp"
#include "bregot/harness.hpp"
#include "bregot/io.hpp"
#include "bregot/polytope.hpp"
#include "bregot/regularized.hpp"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 2;
constexpr int kExitAssumption = 3;
constexpr int kExitNoConvergence = 4;

struct ProblemFiles {
  std::string cost, x, y;
};

void add_problem_flags(CLI::App* cmd, ProblemFiles& files) {
  cmd->add_option("--cost", files.cost, "cost matrix CSV (one row per line)")->required();
  cmd->add_option("--x", files.x, "row marginal CSV")->required();
  cmd->add_option("--y", files.y, "column marginal CSV")->required();
}

struct Problem {
  Eigen::MatrixXd C;
  bregot::Histogram x;
  bregot::Histogram y;
};

Problem load_problem(const ProblemFiles& files) {
  return Problem{bregot::read_cost_csv(files.cost), bregot::read_histogram_csv(files.x),
                 bregot::read_histogram_csv(files.y)};
}

json report_to_json(const bregot::BoundReport& report) {
  return json{{"delta", report.delta},
              {"radius", report.radius},
              {"r_u", report.r_u},
              {"nu_u", report.nu_u},
              {"nu_limit_dominates", report.nu_limit_dominates},
              {"u_prime_one", report.u_prime_one},
              {"eps_max", report.eps_max}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bregman-divergence regularized optimal transport with computable error bounds"};
  app.require_subcommand(1);

  ProblemFiles files;
  std::string gen_spec = "kl";
  std::string out_path;
  std::string svg_path;
  std::optional<double> tie_tol;
  bool want_json = false;

  // ot solve
  auto* solve_cmd = app.add_subcommand("solve", "solve the unregularized LP");
  ProblemFiles solve_files;
  add_problem_flags(solve_cmd, solve_files);
  std::string solve_plan_out;
  solve_cmd->add_option("--plan-out", solve_plan_out, "write the optimal plan CSV here");
  solve_cmd->add_flag("--json", want_json, "emit a JSON report");

  // ot gap
  auto* gap_cmd = app.add_subcommand("gap", "suboptimality gap over the vertex set");
  ProblemFiles gap_files;
  add_problem_flags(gap_cmd, gap_files);
  double gap_tie = -1.0;
  gap_cmd->add_option("--tie-tol", gap_tie, "tie tolerance (default 1e-9 (1 + |best|))");

  // ot radius
  auto* radius_cmd = app.add_subcommand("radius", "divergence radius sup D_U(., x (x) y)");
  ProblemFiles radius_files;
  radius_cmd->add_option("--x", radius_files.x, "row marginal CSV")->required();
  radius_cmd->add_option("--y", radius_files.y, "column marginal CSV")->required();
  radius_cmd->add_option("--gen", gen_spec, "generator spec (default kl)");

  // ot reg-solve
  auto* reg_cmd = app.add_subcommand("reg-solve", "solve the regularized problem");
  ProblemFiles reg_files;
  add_problem_flags(reg_cmd, reg_files);
  double reg_eps = 0.0;
  std::string reg_gen = "kl";
  std::string reg_plan_out;
  bregot::SolveOptions reg_opts;
  reg_cmd->add_option("--gen", reg_gen, "generator spec");
  reg_cmd->add_option("--eps", reg_eps, "regularization parameter")->required();
  reg_cmd->add_option("--tol", reg_opts.grad_tol, "gradient tolerance");
  reg_cmd->add_option("--max-iters", reg_opts.max_iters, "Newton iteration cap");
  reg_cmd->add_option("--plan-out", reg_plan_out, "write the plan CSV here");

  // ot bound
  auto* bound_cmd = app.add_subcommand("bound", "error-bound report (JSON)");
  ProblemFiles bound_files;
  add_problem_flags(bound_cmd, bound_files);
  std::string bound_gen = "kl";
  double bound_eps = -1.0;
  bound_cmd->add_option("--gen", bound_gen, "generator spec");
  bound_cmd->add_option("--eps", bound_eps, "also evaluate the bounds at this eps");
  double bound_tie = -1.0;
  bound_cmd->add_option("--tie-tol", bound_tie, "tie tolerance for the gap");

  // ot sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "error vs bound sweep over an eps grid");
  std::string config_path;
  bregot::ExperimentConfig sweep_config;
  std::string sweep_gens;
  std::string eps_kind = "log";
  double eps_lo = 0.0, eps_hi = 0.0;
  int eps_count = 0;
  std::uint64_t sweep_seed = 0;
  bool have_seed = false;
  sweep_cmd->add_option("--config", config_path, "JSON config file");
  sweep_cmd->add_option("--seed", sweep_seed, "cost matrix seed")->each([&](const std::string&) {
    have_seed = true;
  });
  sweep_cmd->add_option("--gens", sweep_gens, "semicolon-separated generator specs");
  sweep_cmd->add_option("--eps-lo", eps_lo, "eps grid lower endpoint");
  sweep_cmd->add_option("--eps-hi", eps_hi, "eps grid upper endpoint");
  sweep_cmd->add_option("--eps-count", eps_count, "eps grid size");
  sweep_cmd->add_option("--eps-kind", eps_kind, "log or linear");
  sweep_cmd->add_option("--x", files.x, "row marginal CSV (default: paper preset)");
  sweep_cmd->add_option("--y", files.y, "column marginal CSV (default: paper preset)");
  sweep_cmd->add_option("--out", out_path, "sweep CSV path");
  sweep_cmd->add_option("--svg", svg_path, "also draw an SVG chart");

  // ot reproduce
  auto* repro_cmd = app.add_subcommand("reproduce", "figure-protocol sweeps");
  int fig_id = 0;
  std::uint64_t repro_seed = 1;
  repro_cmd->add_option("--fig", fig_id, "figure number (1, 2 or 3)")->required();
  repro_cmd->add_option("--seed", repro_seed, "cost matrix seed");
  repro_cmd->add_option("--out", out_path, "CSV path (default figure<N>.csv)");
  repro_cmd->add_option("--svg", svg_path, "also draw an SVG chart");

  // ot check
  auto* check_cmd = app.add_subcommand("check", "generator admissibility report (JSON)");
  std::string check_gen;
  int check_grid = 64;
  check_cmd->add_option("--gen", check_gen, "generator spec")->required();
  check_cmd->add_option("--grid", check_grid, "sample grid size (>= 16)");

  // ot vertices
  auto* vert_cmd = app.add_subcommand("vertices", "enumerate the vertices of Pi(x, y)");
  ProblemFiles vert_files;
  vert_cmd->add_option("--x", vert_files.x, "row marginal CSV")->required();
  vert_cmd->add_option("--y", vert_files.y, "column marginal CSV")->required();
  std::string vert_out_prefix;
  vert_cmd->add_option("--out-prefix", vert_out_prefix,
                       "write each vertex as <prefix><k>.csv (plan format)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) {
      const Problem p = load_problem(solve_files);
      const bregot::LPResult result = bregot::solve_lp(p.C, p.x, p.y);
      if (!solve_plan_out.empty()) bregot::write_plan_csv(solve_plan_out, result.optimal_plan);
      json j{{"optimal_value", result.optimal_value},
             {"optimal_vertex_count", result.optimal_vertices.size()}};
      std::cout << j.dump(2) << '\n';
    } else if (*gap_cmd) {
      const Problem p = load_problem(gap_files);
      if (gap_tie >= 0.0) tie_tol = gap_tie;
      const bregot::GapReport report = bregot::suboptimality_gap(p.C, p.x, p.y, tie_tol);
      json j{{"delta", report.delta},
             {"best_value", report.best_value},
             {"second_value", report.second_value},
             {"tie_tol", report.tie_tolerance}};
      std::cout << j.dump(2) << '\n';
    } else if (*radius_cmd) {
      const bregot::Histogram x = bregot::read_histogram_csv(radius_files.x);
      const bregot::Histogram y = bregot::read_histogram_csv(radius_files.y);
      const bregot::Generator gen = bregot::parse_generator(gen_spec);
      json j{{"radius", bregot::divergence_radius(gen, x, y)}};
      std::cout << j.dump(2) << '\n';
    } else if (*reg_cmd) {
      const Problem p = load_problem(reg_files);
      const bregot::Generator gen = bregot::parse_generator(reg_gen);
      const bregot::RegularizedResult result =
          bregot::solve_regularized(gen, p.C, p.x, p.y, reg_eps, reg_opts);
      if (!reg_plan_out.empty()) bregot::write_plan_csv(reg_plan_out, result.plan);
      json j{{"linear_value", result.linear_value},
             {"divergence_value", result.divergence_value},
             {"objective", result.objective},
             {"iterations", result.iterations},
             {"grad_norm", result.grad_norm},
             {"converged", result.converged}};
      std::cout << j.dump(2) << '\n';
      if (!result.converged) return kExitNoConvergence;
    } else if (*bound_cmd) {
      const Problem p = load_problem(bound_files);
      const bregot::Generator gen = bregot::parse_generator(bound_gen);
      if (bound_tie >= 0.0) tie_tol = bound_tie;
      const bregot::BoundReport report = bregot::full_report(gen, p.C, p.x, p.y, tie_tol);
      json j = report_to_json(report);
      if (bound_eps > 0.0) {
        const bregot::BoundEvaluation eval = report.bound_at(bound_eps);
        j["eps"] = bound_eps;
        j["naive_bound"] = report.naive_at(bound_eps);
        if (eval.valid_eps) {
          j["bound"] = eval.value;
          j["log_bound"] = eval.log_value;
          j["bound_underflowed"] = eval.underflowed;
        } else {
          j["bound"] = "invalid-eps";
        }
        if (gen.family() == bregot::GeneratorFamily::kKl &&
            bound_eps <= report.delta / (1.0 + report.radius))
          j["weed_bound"] = bregot::weed_bound(report.delta, report.radius, bound_eps);
      }
      std::cout << j.dump(2) << '\n';
    } else if (*sweep_cmd) {
      bregot::ExperimentConfig config;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::invalid_argument("cannot open config '" + config_path + "'");
        json j = json::parse(in);
        config.seed = j.value("seed", std::uint64_t{1});
        config.I = j.value("I", 3);
        config.J = j.value("J", 3);
        if (j.contains("generators"))
          config.generator_specs = j["generators"].get<std::vector<std::string>>();
        if (j.contains("x") && !j["x"].is_string()) {
          const auto xv = j["x"].get<std::vector<double>>();
          config.x = bregot::Histogram(Eigen::Map<const Eigen::VectorXd>(xv.data(), xv.size()));
        }
        if (j.contains("y") && !j["y"].is_string()) {
          const auto yv = j["y"].get<std::vector<double>>();
          config.y = bregot::Histogram(Eigen::Map<const Eigen::VectorXd>(yv.data(), yv.size()));
        }
        if (j.contains("cost")) {
          const auto rows = j["cost"].get<std::vector<std::vector<double>>>();
          Eigen::MatrixXd C(rows.size(), rows.empty() ? 0 : rows.front().size());
          for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t jj = 0; jj < rows[i].size(); ++jj) C(i, jj) = rows[i][jj];
          config.cost = C;
        }
        if (j.contains("eps_grid")) {
          const auto& g = j["eps_grid"];
          config.eps_grid.kind = g.value("kind", std::string("log")) == "linear"
                                     ? bregot::EpsGrid::Kind::kLinear
                                     : bregot::EpsGrid::Kind::kLog;
          config.eps_grid.lo = g.value("lo", 0.0);
          config.eps_grid.hi = g.value("hi", 0.0);
          config.eps_grid.count = g.value("count", 0);
        }
        config.output_path = j.value("output_path", std::string{});
      }
      // Flags override config fields.
      if (have_seed) config.seed = sweep_seed;
      if (!sweep_gens.empty()) {
        config.generator_specs.clear();
        std::stringstream ss(sweep_gens);
        std::string item;
        while (std::getline(ss, item, ';')) config.generator_specs.push_back(item);
      }
      if (eps_lo > 0.0) config.eps_grid.lo = eps_lo;
      if (eps_hi > 0.0) config.eps_grid.hi = eps_hi;
      if (eps_count > 0) config.eps_grid.count = eps_count;
      config.eps_grid.kind =
          eps_kind == "linear" ? bregot::EpsGrid::Kind::kLinear : bregot::EpsGrid::Kind::kLog;
      if (!files.x.empty()) config.x = bregot::read_histogram_csv(files.x);
      if (!files.y.empty()) config.y = bregot::read_histogram_csv(files.y);
      if (!out_path.empty()) config.output_path = out_path;
      const auto rows = bregot::run_sweep(config);
      if (!svg_path.empty()) bregot::write_sweep_svg(svg_path, rows);
      std::cout << "sweep: " << rows.size() << " rows";
      if (!config.output_path.empty()) std::cout << " -> " << config.output_path;
      std::cout << '\n';
    } else if (*repro_cmd) {
      if (out_path.empty()) out_path = "figure" + std::to_string(fig_id) + ".csv";
      const auto rows = bregot::reproduce_figure(fig_id, repro_seed, out_path);
      if (!svg_path.empty()) bregot::write_sweep_svg(svg_path, rows);
      std::cout << "figure " << fig_id << ": " << rows.size() << " rows -> " << out_path << '\n';
    } else if (*check_cmd) {
      const bregot::Generator gen = bregot::parse_generator(check_gen);
      const bregot::AssumptionReport report = bregot::check_assumptions(gen, check_grid);
      json j{{"spec", gen.spec()},
             {"convex_ok", report.convex_ok},
             {"barrier_ok", report.barrier_ok},
             {"ru2_monotone_ok", report.ru2_monotone_ok},
             {"big_q_estimate", report.big_q_estimate},
             {"admissible", report.admissible}};
      std::cout << j.dump(2) << '\n';
    } else if (*vert_cmd) {
      const bregot::Histogram x = bregot::read_histogram_csv(vert_files.x);
      const bregot::Histogram y = bregot::read_histogram_csv(vert_files.y);
      const bregot::VertexSet vs = bregot::enumerate_vertices(x, y);
      std::cout << "vertices: " << vs.vertices.size() << '\n';
      if (!vert_out_prefix.empty())
        for (std::size_t k = 0; k < vs.vertices.size(); ++k)
          bregot::write_plan_csv(vert_out_prefix + std::to_string(k) + ".csv", vs.vertices[k]);
    }
  } catch (const bregot::AssumptionViolation& e) {
    std::cerr << "assumption violation: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  return kExitOk;
}
