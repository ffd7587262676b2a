#pragma once

#include <Eigen/Core>

namespace lexclust {

/// Row-per-item dense matrix (points, feature rows, embeddings).
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Square matrices (affinities, operators).
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace lexclust
