#include "bregot/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bregot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_shapes(const Eigen::MatrixXd& C, const Histogram& x, const Histogram& y) {
  if (C.rows() != x.size() || C.cols() != y.size())
    throw std::invalid_argument("cost matrix is " + std::to_string(C.rows()) + "x" +
                                std::to_string(C.cols()) + " but marginals have sizes " +
                                std::to_string(x.size()) + ", " + std::to_string(y.size()));
  if (std::abs(x.total_mass - y.total_mass) > 1e-9 * std::max(1.0, x.total_mass))
    throw std::invalid_argument("marginals carry different total mass");
}

double objective_of(const Eigen::MatrixXd& C, const TransportPlan& plan) {
  return C.cwiseProduct(plan.entries).sum();
}

}  // namespace

double default_tie_tol(double best_value) { return 1e-9 * (1.0 + std::abs(best_value)); }

LPResult solve_lp(const Eigen::MatrixXd& C, const Histogram& x, const Histogram& y) {
  require_shapes(C, x, y);
  const int total = static_cast<int>(x.size() + y.size());
  LPResult result;
  if (total <= kEnumerationGuard) {
    const VertexSet vs = enumerate_vertices(x, y);
    int best = 0;
    double best_value = kInf;
    std::vector<double> values(vs.vertices.size());
    for (std::size_t k = 0; k < vs.vertices.size(); ++k) {
      values[k] = objective_of(C, vs.vertices[k]);
      if (values[k] < best_value) {
        best_value = values[k];
        best = static_cast<int>(k);
      }
    }
    const double tol = default_tie_tol(best_value);
    for (std::size_t k = 0; k < values.size(); ++k)
      if (values[k] <= best_value + tol) result.optimal_vertices.push_back(static_cast<int>(k));
    result.optimal_value = best_value;
    result.optimal_plan = vs.vertices[best];
    return result;
  }
  auto ns = detail::network_simplex(C, x.values, y.values);
  result.optimal_value = ns.value;
  result.optimal_plan = TransportPlan{std::move(ns.plan)};
  return result;
}

GapReport suboptimality_gap(const Eigen::MatrixXd& C, const Histogram& x, const Histogram& y,
                            std::optional<double> tie_tol) {
  require_shapes(C, x, y);
  const VertexSet vs = enumerate_vertices(x, y);
  double best = kInf;
  std::vector<double> values(vs.vertices.size());
  for (std::size_t k = 0; k < vs.vertices.size(); ++k) {
    values[k] = objective_of(C, vs.vertices[k]);
    best = std::min(best, values[k]);
  }
  GapReport report;
  report.best_value = best;
  report.tie_tolerance = tie_tol.value_or(default_tie_tol(best));
  report.second_value = kInf;  // inf of the empty set
  for (double v : values)
    if (v > best + report.tie_tolerance) report.second_value = std::min(report.second_value, v);
  report.delta = report.second_value - best;
  return report;
}

double divergence_radius(const Generator& gen, const Histogram& x, const Histogram& y) {
  if (!gen.is_admissible())
    throw std::invalid_argument("divergence_radius: generator '" + gen.spec() +
                                "' is not admissible");
  const VertexSet vs = enumerate_vertices(x, y);
  const TransportPlan ref = product_plan(x, y);
  double radius = 0.0;
  for (const TransportPlan& v : vs.vertices)
    radius = std::max(radius, bregman_divergence(gen, v.entries, ref.entries));
  return radius;
}

bool check_assumption_xy(const Eigen::MatrixXd& C, const Histogram& x, const Histogram& y,
                         std::optional<double> tie_tol) {
  const GapReport report = suboptimality_gap(C, x, y, tie_tol);
  return std::isfinite(report.delta);
}

namespace detail {

namespace {

// Spanning-tree basis over m supply + n demand nodes. Arc (i, j) has id
// i * n + j; node ids are rows then columns.
struct SimplexState {
  int m, n;
  const Eigen::MatrixXd& C;
  std::vector<double> flow;      // per arc, basic arcs only are meaningful
  std::vector<char> in_tree;     // per arc
  std::vector<int> parent;       // per node, -1 at root
  std::vector<int> parent_arc;   // arc to parent
  std::vector<int> depth;
  std::vector<double> potential;

  explicit SimplexState(const Eigen::MatrixXd& cost)
      : m(static_cast<int>(cost.rows())),
        n(static_cast<int>(cost.cols())),
        C(cost),
        flow(static_cast<std::size_t>(m) * n, 0.0),
        in_tree(static_cast<std::size_t>(m) * n, 0),
        parent(m + n, -1),
        parent_arc(m + n, -1),
        depth(m + n, 0),
        potential(m + n, 0.0) {}

  int arc_id(int i, int j) const { return i * n + j; }
  int arc_row(int a) const { return a / n; }
  int arc_col(int a) const { return a % n; }

  void rebuild_tree() {
    // BFS from node 0 over basic arcs.
    std::vector<std::vector<int>> adj(m + n);
    for (int a = 0; a < m * n; ++a)
      if (in_tree[a]) {
        adj[arc_row(a)].push_back(a);
        adj[m + arc_col(a)].push_back(a);
      }
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(parent_arc.begin(), parent_arc.end(), -1);
    std::vector<int> queue{0};
    std::vector<char> seen(m + n, 0);
    seen[0] = 1;
    depth[0] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int v = queue[head];
      for (int a : adj[v]) {
        const int other = (v < m) ? m + arc_col(a) : arc_row(a);
        if (seen[other]) continue;
        seen[other] = 1;
        parent[other] = v;
        parent_arc[other] = a;
        depth[other] = depth[v] + 1;
        queue.push_back(other);
      }
    }
    if (static_cast<int>(queue.size()) != m + n)
      throw std::logic_error("network simplex: basis is not a spanning tree");
    // Potentials: u_i + v_j = c_ij on basic arcs, root fixed to 0.
    potential[0] = 0.0;
    for (std::size_t head = 1; head < queue.size(); ++head) {
      const int v = queue[head];
      const int a = parent_arc[v];
      const double c = C(arc_row(a), arc_col(a));
      potential[v] = (v < m) ? c - potential[m + arc_col(a)] : c - potential[arc_row(a)];
    }
  }

  double reduced_cost(int a) const {
    return C(arc_row(a), arc_col(a)) - potential[arc_row(a)] - potential[m + arc_col(a)];
  }

  // Cycle created by adding arc `a`: walks both endpoints to their common
  // ancestor. Returns arcs whose flow decreases when `a` carries +theta,
  // i.e. tree arcs traversed against the row->col orientation of the cycle.
  void collect_cycle(int a, std::vector<int>& forward, std::vector<int>& backward) const {
    forward.assign(1, a);
    backward.clear();
    int u = arc_row(a);          // row endpoint
    int v = m + arc_col(a);      // column endpoint
    // Orientation bookkeeping: the cycle runs u -> v along the entering arc,
    // then v back to u through the tree. A tree arc contributes +theta when
    // the cycle traverses it row->col, -theta otherwise.
    auto step_towards_root = [&](int& node, bool from_col_side) {
      const int arc = parent_arc[node];
      const bool node_is_row = node < m;
      // Moving from `node` to parent along `arc`. On the v->u side of the
      // cycle (from_col_side), traversal direction is node -> parent.
      // On the u side we conceptually traverse parent -> node.
      bool row_to_col;
      if (from_col_side)
        row_to_col = node_is_row;  // node->parent: row->col iff node is a row
      else
        row_to_col = !node_is_row;  // parent->node reversed
      if (row_to_col)
        forward.push_back(arc);
      else
        backward.push_back(arc);
      node = parent[node];
    };
    while (depth[u] > depth[v]) step_towards_root(u, false);
    while (depth[v] > depth[u]) step_towards_root(v, true);
    while (u != v) {
      step_towards_root(u, false);
      step_towards_root(v, true);
    }
  }
};

}  // namespace

NetworkSimplexResult network_simplex(const Eigen::MatrixXd& C, const Eigen::VectorXd& supply,
                                     const Eigen::VectorXd& demand) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  if (C.rows() != m || C.cols() != n)
    throw std::invalid_argument("network_simplex: shape mismatch");

  SimplexState st(C);

  // Northwest-corner start: m + n - 1 basic arcs including degenerate zeros.
  {
    Eigen::VectorXd a = supply, b = demand;
    int i = 0, j = 0;
    while (i < m && j < n) {
      const int arc = st.arc_id(i, j);
      const double t = std::min(a[i], b[j]);
      st.flow[arc] = t;
      st.in_tree[arc] = 1;
      a[i] -= t;
      b[j] -= t;
      if (i == m - 1 && j == n - 1) break;
      if (a[i] <= b[j] && i < m - 1)
        ++i;
      else
        ++j;
    }
  }

  const double cost_scale = std::max(1.0, C.cwiseAbs().maxCoeff());
  const double enter_tol = 1e-12 * cost_scale;
  const long iter_cap = 4L * m * n * (m + n) + 1000;
  std::vector<int> forward, backward;
  int iterations = 0;

  for (long it = 0; it < iter_cap; ++it) {
    st.rebuild_tree();
    // Bland's rule: first arc (by id) with negative reduced cost.
    int entering = -1;
    for (int a = 0; a < m * n; ++a) {
      if (st.in_tree[a]) continue;
      if (st.reduced_cost(a) < -enter_tol) {
        entering = a;
        break;
      }
    }
    if (entering < 0) break;
    ++iterations;

    st.collect_cycle(entering, forward, backward);
    double theta = kInf;
    int leaving = -1;
    for (int a : backward)
      if (st.flow[a] < theta || (st.flow[a] == theta && (leaving < 0 || a < leaving))) {
        theta = st.flow[a];
        leaving = a;
      }
    if (leaving < 0) throw std::logic_error("network simplex: unbounded pivot on a bounded polytope");
    for (int a : forward) st.flow[a] += theta;
    for (int a : backward) st.flow[a] -= theta;
    st.flow[leaving] = 0.0;
    st.in_tree[leaving] = 0;
    st.in_tree[entering] = 1;
  }

  // Optimality certificate.
  st.rebuild_tree();
  for (int a = 0; a < m * n; ++a)
    if (!st.in_tree[a] && st.reduced_cost(a) < -1e-7 * cost_scale)
      throw std::logic_error("network simplex: terminated without optimality certificate");

  NetworkSimplexResult result;
  result.plan = Eigen::MatrixXd::Zero(m, n);
  for (int a = 0; a < m * n; ++a)
    if (st.in_tree[a]) result.plan(st.arc_row(a), st.arc_col(a)) = std::max(0.0, st.flow[a]);
  result.value = C.cwiseProduct(result.plan).sum();
  result.iterations = iterations;
  return result;
}

}  // namespace detail

}  // namespace bregot
