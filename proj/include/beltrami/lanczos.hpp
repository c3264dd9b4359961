#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace beltrami {

struct KrylovOptions {
  int count = 6;          // wanted eigenpairs
  int block = 0;          // block width; 0 picks count + 6
  int steps = 12;         // block Krylov steps per restart
  int max_restarts = 60;
  double tolerance = 1e-9;
  std::uint64_t seed = 1;
};

struct KrylovResult {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns, M-orthonormal
  Eigen::VectorXd residuals;
  int restarts = 0;
  bool converged = false;
};

/// Largest eigenpairs of an operator T that is self-adjoint in the inner
/// product <x, y> = x^T M y (M symmetric positive definite).
///
/// Restarted block Krylov with full M-reorthogonalisation and Rayleigh-Ritz.
/// `deflate` vectors (M-orthonormal) are projected out of every iterate.
/// `residual(vectors, values)` measures convergence on the caller's original
/// problem; iteration stops once the leading `count` residuals are all at or
/// below the tolerance.
KrylovResult block_krylov_largest(
    const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& apply, const Eigen::SparseMatrix<double>& M,
    const std::vector<Eigen::VectorXd>& deflate, const KrylovOptions& options,
    const std::function<Eigen::VectorXd(const Eigen::MatrixXd&, const Eigen::VectorXd&)>& residual);

}  // namespace beltrami
