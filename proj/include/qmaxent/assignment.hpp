#pragma once

#include <vector>

#include <Eigen/Dense>

namespace qmaxent {

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
/// Returns `col` with row i matched to column col[i].
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace qmaxent
