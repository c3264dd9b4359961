#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "beltrami/dec.hpp"

namespace beltrami {

struct EigenPair {
  double eigenvalue = 0.0;
  Eigen::VectorXd vector;  // M-normalised
  double residual = 0.0;   // |S v - nu M v| / (|M v| nu)
  int cluster = 0;         // pairs with equal id form a flagged cluster
};

struct SpectrumRequest {
  int count = 6;
  double tolerance = 1e-9;
  /// Spectral transform shift; must be <= 0 (0 targets the bottom of the
  /// deflated spectrum directly).
  double shift = 0.0;
  std::uint64_t seed = 0x5eed;
  /// Relative gap under which consecutive eigenvalues share a cluster id.
  double cluster_gap = 1e-6;
};

/// The `count` smallest nonzero eigenvalues of S v = nu M v, ascending, with
/// locally constant functions deflated. Throws SolverFailure with the best
/// residual when the iteration cap is hit.
std::vector<EigenPair> solve_scalar_spectrum(const SparseMatrix& S, const SparseMatrix& M, const SpectrumRequest& req);
std::vector<EigenPair> solve_scalar_spectrum(const OperatorSet& ops, const SpectrumRequest& req);

/// Number of distinct cluster ids and the size of the cluster containing the
/// first pair.
int cluster_size(const std::vector<EigenPair>& pairs, int index);

/// (v^T S v)/(v^T M v); throws InvalidArgument for the zero vector.
double rayleigh_quotient(const SparseMatrix& S, const SparseMatrix& M, const Eigen::VectorXd& v);

/// star1-orthonormal basis of the discrete harmonic 1-forms (dimension 2*genus).
/// Throws TopologyMismatch when the numerical kernel has another dimension or
/// a basis vector has Rayleigh quotient above 1e-6 * nu1.
std::vector<Cochain1> harmonic_basis(const OneFormLaplacian& laplacian, const OperatorSet& ops, int genus,
                                     double nu1, std::uint64_t seed = 0x4a7);

/// CSV with header "index,eigenvalue,residual,cluster_id".
void write_spectrum_csv(std::ostream& out, const std::vector<EigenPair>& pairs);

}  // namespace beltrami
