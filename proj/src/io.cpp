#include "bregot/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace bregot {

namespace {

std::vector<std::vector<double>> read_numeric_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t,") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(field, &pos));
      } catch (const std::exception&) {
        throw std::invalid_argument("'" + path + "': non-numeric field '" + field + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("'" + path + "': no data rows");
  return rows;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Eigen::MatrixXd read_cost_csv(const std::string& path) {
  const auto rows = read_numeric_rows(path);
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd C(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols)
      throw std::invalid_argument("'" + path + "': ragged rows (" + std::to_string(rows[i].size()) +
                                  " vs " + std::to_string(cols) + " fields)");
    for (std::size_t j = 0; j < cols; ++j) C(i, j) = rows[i][j];
  }
  return C;
}

void write_cost_csv(const std::string& path, const Eigen::MatrixXd& C) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  for (Eigen::Index i = 0; i < C.rows(); ++i) {
    for (Eigen::Index j = 0; j < C.cols(); ++j) {
      if (j) out << ',';
      out << format_double(C(i, j));
    }
    out << '\n';
  }
}

Histogram read_histogram_csv(const std::string& path) {
  const auto rows = read_numeric_rows(path);
  std::vector<double> flat;
  if (rows.size() == 1) {
    flat = rows.front();
  } else {
    for (const auto& r : rows) {
      if (r.size() != 1)
        throw std::invalid_argument("'" + path + "': a histogram is one row or one column");
      flat.push_back(r.front());
    }
  }
  Eigen::VectorXd v(flat.size());
  for (std::size_t k = 0; k < flat.size(); ++k) v[k] = flat[k];
  const double mass = v.sum();
  return Histogram(std::move(v), mass);
}

void write_plan_csv(const std::string& path, const TransportPlan& plan) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << "i,j,value\n";
  for (Eigen::Index i = 0; i < plan.rows(); ++i)
    for (Eigen::Index j = 0; j < plan.cols(); ++j)
      out << (i + 1) << ',' << (j + 1) << ',' << format_double(plan.entries(i, j)) << '\n';
}

TransportPlan read_plan_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header) || header.rfind("i,j,value", 0) != 0)
    throw std::invalid_argument("'" + path + "': expected header 'i,j,value'");
  std::vector<std::tuple<int, int, double>> cells;
  int max_i = 0, max_j = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t,\r") == std::string::npos) continue;
    int i = 0, j = 0;
    double v = 0.0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf", &i, &j, &v) != 3)
      throw std::invalid_argument("'" + path + "': bad plan row '" + line + "'");
    cells.emplace_back(i, j, v);
    max_i = std::max(max_i, i);
    max_j = std::max(max_j, j);
  }
  TransportPlan plan;
  plan.entries = Eigen::MatrixXd::Zero(max_i, max_j);
  for (auto [i, j, v] : cells) plan.entries(i - 1, j - 1) = v;
  return plan;
}

}  // namespace bregot
