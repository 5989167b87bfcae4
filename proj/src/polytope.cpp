#include "bregot/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace bregot {

namespace {

std::string cell_str(int i, int j) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "(%d,%d)", i + 1, j + 1);
  return buf;
}

}  // namespace

Histogram::Histogram(Eigen::VectorXd v, double mass) : values(std::move(v)), total_mass(mass) {
  if (values.size() == 0) throw std::invalid_argument("histogram: empty vector");
  if (!(total_mass > 0.0)) throw std::invalid_argument("histogram: total mass must be positive");
  double sum = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    double& e = values[k];
    if (e < 0.0) {
      if (e < -kSupportEpsilon)
        throw std::invalid_argument("histogram: negative entry at index " + std::to_string(k + 1));
      e = 0.0;
    }
    sum += e;
  }
  if (std::abs(sum - total_mass) > 1e-12 * std::max(1.0, total_mass))
    throw std::invalid_argument("histogram: entries sum to " + std::to_string(sum) +
                                ", declared mass " + std::to_string(total_mass));
}

std::vector<int> Histogram::support() const {
  std::vector<int> s;
  for (Eigen::Index k = 0; k < values.size(); ++k)
    if (values[k] > kSupportEpsilon) s.push_back(static_cast<int>(k));
  return s;
}

Histogram TransportPlan::row_marginal() const {
  Eigen::VectorXd r = entries.rowwise().sum();
  return Histogram(std::move(r), entries.sum());
}

Histogram TransportPlan::col_marginal() const {
  Eigen::VectorXd c = entries.colwise().sum().transpose();
  return Histogram(std::move(c), entries.sum());
}

TransportPlan product_plan(const Histogram& x, const Histogram& y) {
  if (std::abs(x.total_mass - y.total_mass) > 1e-9 * std::max(1.0, x.total_mass))
    throw std::invalid_argument("product_plan: marginals carry different total mass");
  TransportPlan plan;
  plan.entries = (x.values * y.values.transpose()) / x.total_mass;
  return plan;
}

PlanDiagnostics validate_plan(const TransportPlan& plan, const Histogram& x, const Histogram& y,
                              double tol) {
  PlanDiagnostics diag;
  auto fail = [&diag](std::string msg) {
    diag.ok = false;
    diag.violations.push_back(std::move(msg));
  };
  const int I = static_cast<int>(x.size());
  const int J = static_cast<int>(y.size());
  if (plan.rows() != I || plan.cols() != J) {
    fail("shape mismatch: plan is " + std::to_string(plan.rows()) + "x" +
         std::to_string(plan.cols()) + ", marginals need " + std::to_string(I) + "x" +
         std::to_string(J));
    return diag;
  }
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j) {
      const double v = plan.entries(i, j);
      if (v < -tol) fail("negative entry " + std::to_string(v) + " at " + cell_str(i, j));
      if (v > tol && (x.values[i] <= kSupportEpsilon || y.values[j] <= kSupportEpsilon))
        fail("support violation: mass " + std::to_string(v) + " at " + cell_str(i, j) +
             " outside spt(x) x spt(y)");
    }
  const double scale = std::max(1.0, x.total_mass);
  for (int i = 0; i < I; ++i) {
    const double rs = plan.entries.row(i).sum();
    if (std::abs(rs - x.values[i]) > tol * scale)
      fail("row " + std::to_string(i + 1) + " sums to " + std::to_string(rs) + ", expected " +
           std::to_string(x.values[i]));
  }
  for (int j = 0; j < J; ++j) {
    const double cs = plan.entries.col(j).sum();
    if (std::abs(cs - y.values[j]) > tol * scale)
      fail("column " + std::to_string(j + 1) + " sums to " + std::to_string(cs) + ", expected " +
           std::to_string(y.values[j]));
  }
  return diag;
}

namespace {

// Spanning-tree enumeration by contraction/deletion over the (multi)graph
// left after support restriction. Node ids: rows 0..p-1, columns p..p+q-1.
struct TreeEnumerator {
  int n_nodes;
  std::vector<std::pair<int, int>> edge_ends;  // per original edge id
  std::vector<int> chosen;

  // Union-find over contracted nodes.
  std::vector<int> parent;
  int find(int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }

  std::function<void(const std::vector<int>&)> emit;

  bool connected(const std::vector<int>& edges, int components_needed) {
    // Count components among DSU class representatives using the edge list.
    std::vector<int> local(parent);
    auto lfind = [&local](int v) {
      while (local[v] != v) v = local[v] = local[local[v]];
      return v;
    };
    int merges = 0;
    for (int e : edges) {
      int a = lfind(find(edge_ends[e].first));
      int b = lfind(find(edge_ends[e].second));
      if (a != b) {
        local[a] = b;
        ++merges;
      }
    }
    return merges == components_needed - 1;
  }

  int component_count() {
    std::vector<char> seen(n_nodes, 0);
    int c = 0;
    for (int v = 0; v < n_nodes; ++v) {
      int r = find(v);
      if (!seen[r]) {
        seen[r] = 1;
        ++c;
      }
    }
    return c;
  }

  void recurse(std::vector<int> edges) {
    const int comps = component_count();
    if (comps == 1) {
      emit(chosen);
      return;
    }
    // Drop self-loops created by contraction.
    std::vector<int> live;
    live.reserve(edges.size());
    for (int e : edges)
      if (find(edge_ends[e].first) != find(edge_ends[e].second)) live.push_back(e);
    if (live.empty()) return;
    const int e = live.front();
    std::vector<int> rest(live.begin() + 1, live.end());

    // Branch 1: contract e.
    std::vector<int> saved_parent = parent;
    parent[find(edge_ends[e].first)] = find(edge_ends[e].second);
    chosen.push_back(e);
    recurse(rest);
    chosen.pop_back();
    parent = std::move(saved_parent);

    // Branch 2: delete e, viable only if the rest still connects everything.
    if (connected(rest, comps)) recurse(std::move(rest));
  }
};

std::string plan_key(const Eigen::MatrixXd& m) {
  std::string key;
  key.reserve(static_cast<std::size_t>(m.size()) * sizeof(std::int64_t));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto r = static_cast<std::int64_t>(std::llround(m(i, j) * 1e9));
      key.append(reinterpret_cast<const char*>(&r), sizeof(r));
    }
  return key;
}

}  // namespace

VertexSet enumerate_vertices(const Histogram& x, const Histogram& y) {
  const int I = static_cast<int>(x.size());
  const int J = static_cast<int>(y.size());
  if (I + J > kEnumerationGuard)
    throw std::invalid_argument("enumerate_vertices: I + J = " + std::to_string(I + J) +
                                " exceeds the enumeration limit " +
                                std::to_string(kEnumerationGuard));
  if (std::abs(x.total_mass - y.total_mass) > 1e-9 * std::max(1.0, x.total_mass))
    throw std::invalid_argument("enumerate_vertices: marginal masses differ");

  const std::vector<int> rows = x.support();
  const std::vector<int> cols = y.support();
  const int p = static_cast<int>(rows.size());
  const int q = static_cast<int>(cols.size());

  TreeEnumerator enumerator;
  enumerator.n_nodes = p + q;
  for (int u = 0; u < p; ++u)
    for (int v = 0; v < q; ++v) enumerator.edge_ends.emplace_back(u, p + v);
  enumerator.parent.resize(p + q);
  std::iota(enumerator.parent.begin(), enumerator.parent.end(), 0);

  VertexSet out;
  std::unordered_set<std::string> seen;

  enumerator.emit = [&](const std::vector<int>& tree) {
    // Back-substitute basic flows by repeated leaf elimination.
    std::vector<double> residual(p + q);
    for (int u = 0; u < p; ++u) residual[u] = x.values[rows[u]];
    for (int v = 0; v < q; ++v) residual[p + v] = y.values[cols[v]];
    std::vector<std::vector<std::pair<int, int>>> adj(p + q);  // (neighbor, tree slot)
    for (std::size_t t = 0; t < tree.size(); ++t) {
      auto [u, v] = enumerator.edge_ends[tree[t]];
      adj[u].emplace_back(v, static_cast<int>(t));
      adj[v].emplace_back(u, static_cast<int>(t));
    }
    std::vector<int> degree(p + q);
    std::vector<int> stack;
    for (int v = 0; v < p + q; ++v) {
      degree[v] = static_cast<int>(adj[v].size());
      if (degree[v] == 1) stack.push_back(v);
    }
    std::vector<double> flow(tree.size(), 0.0);
    std::vector<char> done(tree.size(), 0);
    bool feasible = true;
    for (int processed = 0; processed + 1 < p + q && !stack.empty(); ++processed) {
      const int leaf = stack.back();
      stack.pop_back();
      int slot = -1, other = -1;
      for (auto [nb, t] : adj[leaf])
        if (!done[t]) {
          slot = t;
          other = nb;
          break;
        }
      if (slot < 0) continue;
      double f = residual[leaf];
      if (f < -1e-11) {
        feasible = false;
        break;
      }
      if (f < 0.0) f = 0.0;
      flow[slot] = f;
      done[slot] = 1;
      residual[other] -= f;
      if (--degree[other] == 1) stack.push_back(other);
      degree[leaf] = 0;
    }
    if (!feasible) return;

    Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(I, J);
    for (std::size_t t = 0; t < tree.size(); ++t) {
      auto [u, v] = enumerator.edge_ends[tree[t]];
      entries(rows[u], cols[v - p]) = flow[t];
    }
    if (!seen.insert(plan_key(entries)).second) return;

    std::vector<std::pair<int, int>> cells;
    for (int e : tree) {
      auto [u, v] = enumerator.edge_ends[e];
      cells.emplace_back(rows[u], cols[v - p]);
    }
    out.vertices.push_back(TransportPlan{std::move(entries)});
    out.tree_supports.push_back(std::move(cells));
  };

  std::vector<int> all_edges(enumerator.edge_ends.size());
  std::iota(all_edges.begin(), all_edges.end(), 0);
  enumerator.recurse(std::move(all_edges));

  // Deterministic order independent of enumeration details.
  std::vector<std::size_t> order(out.vertices.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::string> keys(out.vertices.size());
  for (std::size_t k = 0; k < keys.size(); ++k) keys[k] = plan_key(out.vertices[k].entries);
  std::sort(order.begin(), order.end(),
            [&keys](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  VertexSet sorted;
  sorted.vertices.reserve(out.vertices.size());
  sorted.tree_supports.reserve(out.vertices.size());
  for (std::size_t k : order) {
    sorted.vertices.push_back(std::move(out.vertices[k]));
    sorted.tree_supports.push_back(std::move(out.tree_supports[k]));
  }
  return sorted;
}

std::vector<Eigen::MatrixXd> null_space_basis(const Histogram& x, const Histogram& y) {
  const std::vector<int> rows = x.support();
  const std::vector<int> cols = y.support();
  const int I = static_cast<int>(x.size());
  const int J = static_cast<int>(y.size());
  std::vector<Eigen::MatrixXd> basis;
  for (std::size_t u = 0; u + 1 < rows.size(); ++u)
    for (std::size_t v = 0; v + 1 < cols.size(); ++v) {
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(I, J);
      b(rows[u], cols[v]) = 1.0;
      b(rows[u], cols[v + 1]) = -1.0;
      b(rows[u + 1], cols[v]) = -1.0;
      b(rows[u + 1], cols[v + 1]) = 1.0;
      basis.push_back(std::move(b));
    }
  return basis;
}

}  // namespace bregot
