#pragma once

#include <vector>

#include <Eigen/Core>

namespace cogbench::fa {

// Sum over columns of the variance of squared loadings.
double varimax_criterion(const Eigen::MatrixXd& loadings);

struct VarimaxResult {
  Eigen::MatrixXd loadings;        // lambda * rotation, signs fixed
  Eigen::MatrixXd rotation;        // orthogonal I x I
  std::vector<double> criterion;   // on row-normalized loadings, one entry per sweep plus start
  int sweeps = 0;
};

// Pairwise-angle varimax with Kaiser row normalization. Fewer than two
// columns returns the identity rotation. Each output column is flipped so its
// largest-magnitude loading is positive.
VarimaxResult varimax(const Eigen::MatrixXd& lambda, double tolerance = 1e-8,
                      int max_sweeps = 1000);

}  // namespace cogbench::fa
