#pragma once

// Data-parallel inner loops. Every kernel in `par` has a plain serial twin
// in `ref` with identical semantics; tests compare the two and the
// bench_kernels target times them against each other.

#include "anthro/metric.hpp"

#include <Eigen/Core>

#include <vector>

namespace anthro {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace par {

/// Symmetric n x n matrix of metric distances between the rows of X.
Eigen::MatrixXd pairwise_distances(const RowMatrix& X, const Metric& m);

/// For each probe row p, the 1-based rank of gallery row mate[p] when the
/// gallery is sorted by distance to p. Ties with the mate count against it.
std::vector<int> mate_ranks(const RowMatrix& gallery, const RowMatrix& probes, const std::vector<int>& mate,
                            const Metric& m);

/// X * X^T.
Eigen::MatrixXd gram(const RowMatrix& X);

/// A^T A and A^T b for a tall design matrix A.
void normal_equations(const RowMatrix& A, const Eigen::VectorXd& b, Eigen::MatrixXd& AtA, Eigen::VectorXd& Atb);

} // namespace par

namespace ref {

Eigen::MatrixXd pairwise_distances(const RowMatrix& X, const Metric& m);
std::vector<int> mate_ranks(const RowMatrix& gallery, const RowMatrix& probes, const std::vector<int>& mate,
                            const Metric& m);
Eigen::MatrixXd gram(const RowMatrix& X);
void normal_equations(const RowMatrix& A, const Eigen::VectorXd& b, Eigen::MatrixXd& AtA, Eigen::VectorXd& Atb);

} // namespace ref

} // namespace anthro
