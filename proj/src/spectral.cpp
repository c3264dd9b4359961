#include "beltrami/spectral.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "beltrami/error.hpp"
#include "beltrami/lanczos.hpp"

namespace beltrami {

namespace {

// Connected components of the sparsity graph of S.
std::vector<int> graph_components(const SparseMatrix& S, int& count) {
  const int n = static_cast<int>(S.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int col = 0; col < S.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(S, col); it; ++it) {
      if (it.value() == 0.0) continue;
      const int a = find(static_cast<int>(it.row())), b = find(static_cast<int>(it.col()));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<int> label(n, -1), comp(n);
  count = 0;
  for (int v = 0; v < n; ++v) {
    const int r = find(v);
    if (label[r] < 0) label[r] = count++;
    comp[v] = label[r];
  }
  return comp;
}

void assign_clusters(std::vector<EigenPair>& pairs, double gap) {
  int id = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i > 0) {
      const double a = pairs[i - 1].eigenvalue, b = pairs[i].eigenvalue;
      if (std::abs(b - a) > gap * std::max(std::abs(a), std::abs(b))) ++id;
    }
    pairs[i].cluster = id;
  }
}

}  // namespace

std::vector<EigenPair> solve_scalar_spectrum(const SparseMatrix& S, const SparseMatrix& M, const SpectrumRequest& req) {
  const int n = static_cast<int>(S.rows());
  if (S.cols() != n || M.rows() != n || M.cols() != n) throw Error(ErrorKind::InvalidArgument, "S and M sizes differ");
  if (!(req.tolerance > 0.0)) throw Error(ErrorKind::InvalidParameter, "tolerance must be positive");
  if (req.shift > 0.0) throw Error(ErrorKind::InvalidParameter, "spectral shift must be <= 0");

  int ncomp = 0;
  const std::vector<int> comp = graph_components(S, ncomp);
  if (req.count < 1 || req.count > n - ncomp) {
    throw Error(ErrorKind::InvalidParameter, "eigenpair count must lie in [1, V - components]");
  }
  std::vector<Eigen::VectorXd> constants(ncomp, Eigen::VectorXd::Zero(n));
  for (int v = 0; v < n; ++v) constants[comp[v]][v] = 1.0;
  for (auto& c : constants) c /= std::sqrt(c.dot(M * c));

  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> apply;
  Eigen::SimplicialLLT<SparseMatrix> llt;
  std::vector<int> reduced_of(n, -1);
  if (req.shift == 0.0) {
    std::vector<char> pinned(ncomp, 0);
    int r = 0;
    for (int v = 0; v < n; ++v) {
      if (!pinned[comp[v]]) {
        pinned[comp[v]] = 1;
        continue;
      }
      reduced_of[v] = r++;
    }
    std::vector<Eigen::Triplet<double>> t;
    for (int col = 0; col < S.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(S, col); it; ++it) {
        const int a = reduced_of[it.row()], b = reduced_of[it.col()];
        if (a >= 0 && b >= 0) t.emplace_back(a, b, it.value());
      }
    }
    SparseMatrix reduced(r, r);
    reduced.setFromTriplets(t.begin(), t.end());
    llt.compute(reduced);
    if (llt.info() != Eigen::Success) throw SolverFailure("pinned stiffness factorisation failed", std::nan(""));
    apply = [&](const Eigen::MatrixXd& X) {
      Eigen::MatrixXd rhs = M * X;
      for (const auto& c : constants) rhs -= (M * c) * (c.transpose() * rhs);
      Eigen::MatrixXd red(llt.rows(), X.cols());
      for (int v = 0; v < n; ++v) {
        if (reduced_of[v] >= 0) red.row(reduced_of[v]) = rhs.row(v);
      }
      const Eigen::MatrixXd sol = llt.solve(red);
      Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, X.cols());
      for (int v = 0; v < n; ++v) {
        if (reduced_of[v] >= 0) out.row(v) = sol.row(reduced_of[v]);
      }
      return out;
    };
  } else {
    const SparseMatrix shifted = S - req.shift * M;
    llt.compute(shifted);
    if (llt.info() != Eigen::Success) throw SolverFailure("shifted stiffness factorisation failed", std::nan(""));
    apply = [&](const Eigen::MatrixXd& X) { return Eigen::MatrixXd(llt.solve(M * X)); };
  }

  const double shift = req.shift;
  auto residual = [&](const Eigen::MatrixXd& vecs, const Eigen::VectorXd& theta) {
    Eigen::VectorXd res(vecs.cols());
    for (int j = 0; j < vecs.cols(); ++j) {
      const double nu = shift + 1.0 / theta[j];
      const Eigen::VectorXd mv = M * vecs.col(j);
      res[j] = (S * vecs.col(j) - nu * mv).norm() / (mv.norm() * std::abs(nu));
    }
    return res;
  };

  KrylovOptions opt;
  opt.count = req.count;
  opt.tolerance = req.tolerance;
  opt.seed = req.seed;
  const KrylovResult kr = block_krylov_largest(apply, M, constants, opt, residual);
  if (!kr.converged) throw SolverFailure("scalar eigensolver hit the restart cap", kr.residuals.maxCoeff());

  std::vector<EigenPair> pairs(req.count);
  for (int j = 0; j < req.count; ++j) {
    pairs[j].eigenvalue = shift + 1.0 / kr.values[j];
    Eigen::VectorXd v = kr.vectors.col(j);
    // fix the sign: largest-magnitude entry positive
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    pairs[j].vector = v / std::sqrt(v.dot(M * v));
    pairs[j].residual = kr.residuals[j];
  }
  assign_clusters(pairs, req.cluster_gap);
  return pairs;
}

std::vector<EigenPair> solve_scalar_spectrum(const OperatorSet& ops, const SpectrumRequest& req) {
  const ScalarLaplacian lap = scalar_laplacian(ops);
  return solve_scalar_spectrum(lap.stiffness, lap.mass, req);
}

int cluster_size(const std::vector<EigenPair>& pairs, int index) {
  const int id = pairs.at(index).cluster;
  int size = 0;
  for (const auto& p : pairs) size += (p.cluster == id);
  return size;
}

double rayleigh_quotient(const SparseMatrix& S, const SparseMatrix& M, const Eigen::VectorXd& v) {
  const double den = v.dot(M * v);
  if (!(den > 0.0)) throw Error(ErrorKind::InvalidArgument, "Rayleigh quotient of the zero vector");
  return v.dot(S * v) / den;
}

std::vector<Cochain1> harmonic_basis(const OneFormLaplacian& laplacian, const OperatorSet& ops, int genus, double nu1,
                                     std::uint64_t seed) {
  if (genus < 0) throw Error(ErrorKind::InvalidParameter, "genus must be nonnegative");
  const int want = 2 * genus;
  const int draws = want + 3;
  const HodgeDecomposer hodge(ops);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<Eigen::VectorXd> parts;
  for (int k = 0; k < draws; ++k) {
    Eigen::VectorXd b(ops.num_edges());
    for (int i = 0; i < b.size(); ++i) b[i] = gauss(rng);
    b /= std::sqrt(b.dot(ops.star1() * b));
    parts.push_back(hodge({b}).harmonic.values);
  }
  // numerical rank from the star1 Gram matrix
  Eigen::MatrixXd gram(draws, draws);
  for (int i = 0; i < draws; ++i) {
    for (int j = 0; j < draws; ++j) gram(i, j) = parts[i].dot(ops.star1() * parts[j]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double top = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  int rank = 0;
  for (int i = 0; i < draws; ++i) rank += eig.eigenvalues()[i] > 1e-10 * std::max(top, 1e-300) && top > 1e-20;
  if (rank != want) {
    throw Error(ErrorKind::TopologyMismatch, "harmonic space has dimension " + std::to_string(rank) + ", expected " +
                                                 std::to_string(want));
  }
  std::vector<Cochain1> basis;
  for (int i = draws - 1; i >= draws - want; --i) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(ops.num_edges());
    for (int j = 0; j < draws; ++j) h += eig.eigenvectors()(j, i) * parts[j];
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) h -= q.values * q.values.dot(ops.star1() * h);
    }
    h /= std::sqrt(h.dot(ops.star1() * h));
    const double rq = laplacian.rayleigh({h});
    if (rq > 1e-6 * nu1) {
      throw Error(ErrorKind::TopologyMismatch, "harmonic candidate has Rayleigh quotient " + std::to_string(rq));
    }
    basis.push_back({h});
  }
  return basis;
}

void write_spectrum_csv(std::ostream& out, const std::vector<EigenPair>& pairs) {
  out << "index,eigenvalue,residual,cluster_id\n" << std::setprecision(17);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out << i + 1 << ',' << pairs[i].eigenvalue << ',' << pairs[i].residual << ',' << pairs[i].cluster << '\n';
  }
}

}  // namespace beltrami
