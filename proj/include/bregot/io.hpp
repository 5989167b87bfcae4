#pragma once

#include <Eigen/Core>
#include <string>

#include "bregot/polytope.hpp"

namespace bregot {

// Cost matrices: one row per line, comma-separated decimals, no header.
Eigen::MatrixXd read_cost_csv(const std::string& path);
void write_cost_csv(const std::string& path, const Eigen::MatrixXd& C);

// Histograms: a single comma-separated line (a single column also works).
// The total mass is inferred from the entry sum.
Histogram read_histogram_csv(const std::string& path);

// Plans: header row "i,j,value", 1-based indices, full double precision.
void write_plan_csv(const std::string& path, const TransportPlan& plan);
TransportPlan read_plan_csv(const std::string& path);

std::string format_double(double v);  // %.17g, round-trip exact

}  // namespace bregot
