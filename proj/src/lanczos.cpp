#include "beltrami/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "beltrami/error.hpp"

namespace beltrami {

namespace {

// M-orthogonalise the columns of X against Q (first `used` columns) and
// against each other; columns that collapse are replaced by fresh random
// directions. Two passes of classical Gram-Schmidt.
void orthonormalise(Eigen::MatrixXd& X, const Eigen::MatrixXd& Q, int used, const Eigen::SparseMatrix<double>& M,
                    const std::vector<Eigen::VectorXd>& deflate, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  auto project = [&](Eigen::VectorXd& x) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& d : deflate) x -= d * d.dot(M * x);
      if (used > 0) {
        const Eigen::VectorXd mx = M * x;
        x -= Q.leftCols(used) * (Q.leftCols(used).transpose() * mx);
      }
    }
  };
  for (int c = 0; c < X.cols(); ++c) {
    Eigen::VectorXd x = X.col(c);
    const double before = std::sqrt(std::max(0.0, x.dot(M * x)));
    for (int attempt = 0;; ++attempt) {
      project(x);
      for (int p = 0; p < 2; ++p) {
        for (int j = 0; j < c; ++j) x -= X.col(j) * X.col(j).dot(M * x);
      }
      const double nrm = std::sqrt(std::max(0.0, x.dot(M * x)));
      if (nrm > 1e-10 * std::max(before, 1e-300) && nrm > 0.0) {
        X.col(c) = x / nrm;
        break;
      }
      if (attempt > 5) throw Error(ErrorKind::SolverFailure, "Krylov basis cannot be extended");
      for (int i = 0; i < x.size(); ++i) x[i] = gauss(rng);
    }
  }
}

}  // namespace

KrylovResult block_krylov_largest(
    const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& apply, const Eigen::SparseMatrix<double>& M,
    const std::vector<Eigen::VectorXd>& deflate, const KrylovOptions& options,
    const std::function<Eigen::VectorXd(const Eigen::MatrixXd&, const Eigen::VectorXd&)>& residual) {
  const int n = static_cast<int>(M.rows());
  const int available = n - static_cast<int>(deflate.size());
  if (options.count < 1 || options.count > available) {
    throw Error(ErrorKind::InvalidParameter, "requested eigenpair count outside [1, " + std::to_string(available) + "]");
  }
  int block = options.block > 0 ? options.block : options.count + 6;
  block = std::min(block, available);
  int steps = std::max(2, options.steps);
  if (block * steps > available) steps = std::max(1, available / block);
  const int basis = block * steps;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd start(n, block);
  for (int j = 0; j < block; ++j) {
    for (int i = 0; i < n; ++i) start(i, j) = gauss(rng);
  }

  KrylovResult result;
  Eigen::MatrixXd Q(n, basis), TQ(n, basis);
  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    Eigen::MatrixXd X = start;
    orthonormalise(X, Q, 0, M, deflate, rng);
    int used = 0;
    for (int s = 0; s < steps; ++s) {
      Q.middleCols(used, block) = X;
      TQ.middleCols(used, block) = apply(X);
      used += block;
      if (s + 1 == steps) break;
      X = TQ.middleCols(used - block, block);
      orthonormalise(X, Q, used, M, deflate, rng);
    }
    Eigen::MatrixXd H = Q.leftCols(used).transpose() * (M * TQ.leftCols(used));
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
    if (eig.info() != Eigen::Success) throw Error(ErrorKind::SolverFailure, "Rayleigh-Ritz eigensolve failed");
    // descending order
    const Eigen::VectorXd theta = eig.eigenvalues().reverse();
    const Eigen::MatrixXd S = eig.eigenvectors().rowwise().reverse();
    const Eigen::MatrixXd ritz = Q.leftCols(used) * S.leftCols(block);

    result.values = theta.head(options.count);
    result.vectors = ritz.leftCols(options.count);
    result.residuals = residual(result.vectors, result.values);
    result.restarts = restart;
    if ((result.residuals.array() <= options.tolerance).all()) {
      result.converged = true;
      return result;
    }
    start = ritz;
  }
  return result;
}

}  // namespace beltrami
