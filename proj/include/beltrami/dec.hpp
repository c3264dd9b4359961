#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "beltrami/mesh.hpp"

namespace beltrami {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Discrete function: one value per vertex.
struct Cochain0 {
  Eigen::VectorXd values;
};

/// Discrete 1-form: one value per edge, integrated along the stored edge
/// orientation (smaller vertex index -> larger).
struct Cochain1 {
  Eigen::VectorXd values;
};

namespace detail {
struct Factorizations;
}

/// Exterior derivatives, Hodge stars and derived solvers for one mesh and
/// conformal factor. Immutable after assembly; copies share the factorizations.
///
///   d0     E x V  signed incidence
///   d1     F x E  signed incidence
///   star0  V      lumped (barycentric) vertex areas
///   star1  E x E  Whitney 1-form mass matrix, SPD
///   star2  F      inverse face areas
///   wedge  E x E  antisymmetric pairing  int W_a ^ W_b  (metric independent)
///
/// The surface Hodge star on primal 1-cochains is the Galerkin projection
///   rot1 = -star1^{-1} wedge,
/// i.e. <rot1 a, c>_{star1} = int a ^ c, which realises *dx = dy for a
/// counterclockwise face orientation.
class OperatorSet {
 public:
  static OperatorSet assemble(const TriangleMesh& mesh, const ConformalFactor& factor);

  const TriangleMesh& mesh() const { return *mesh_; }
  int num_vertices() const { return static_cast<int>(star0_.size()); }
  int num_edges() const { return static_cast<int>(d0_.rows()); }
  int num_faces() const { return static_cast<int>(d1_.rows()); }

  const SparseMatrix& d0() const { return d0_; }
  const SparseMatrix& d1() const { return d1_; }
  const Eigen::VectorXd& star0() const { return star0_; }
  const SparseMatrix& star1() const { return star1_; }
  const Eigen::VectorXd& star2() const { return star2_; }
  const SparseMatrix& wedge() const { return wedge_; }
  /// Scalar stiffness d0^T star1 d0 (the cotangent Laplacian).
  const SparseMatrix& stiffness() const { return stiffness_; }
  const Eigen::VectorXd& edge_lengths() const { return lengths_; }
  const Eigen::VectorXd& face_areas() const { return areas_; }
  double total_area() const { return areas_.sum(); }
  /// Longest conformal edge length (mesh size h).
  double mesh_size() const { return lengths_.maxCoeff(); }

  Eigen::VectorXd star1_solve(const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd rot1(const Eigen::VectorXd& w) const;

  /// Solution x of stiffness * x = rhs with x star0-orthogonal to the locally
  /// constant functions; rhs is first projected onto the consistent subspace.
  Eigen::VectorXd scalar_solve(const Eigen::VectorXd& rhs) const;

  /// star0-orthogonal projection removing the locally constant part.
  Eigen::VectorXd remove_constants(const Eigen::VectorXd& f) const;
  /// star0-orthonormal indicator vectors, one per connected component.
  const std::vector<Eigen::VectorXd>& constant_modes() const { return constants_; }

 private:
  std::shared_ptr<const TriangleMesh> mesh_;
  SparseMatrix d0_, d1_, star1_, wedge_, stiffness_;
  Eigen::VectorXd star0_, star2_, lengths_, areas_;
  std::vector<Eigen::VectorXd> constants_;
  std::shared_ptr<const detail::Factorizations> fact_;
};

/// Stiffness/mass pair of the scalar Laplacian, S v = nu M v.
struct ScalarLaplacian {
  SparseMatrix stiffness;
  SparseMatrix mass;
};

ScalarLaplacian scalar_laplacian(const OperatorSet& ops);

/// Hodge Laplacian on 1-cochains,
///   Delta1 = d0 star0^{-1} d0^T star1 + star1^{-1} d1^T star2 d1,
/// which is self-adjoint in the star1 inner product. `weak()` is star1*Delta1.
class OneFormLaplacian {
 public:
  explicit OneFormLaplacian(const OperatorSet& ops);
  Cochain1 apply(const Cochain1& b) const;
  /// Symmetric PSD matrix star1 * Delta1.
  const SparseMatrix& weak() const { return weak_; }
  /// (Delta1 b, b)/(b, b) in the star1 inner product.
  double rayleigh(const Cochain1& b) const;

 private:
  const OperatorSet* ops_;
  SparseMatrix weak_;
};

OneFormLaplacian one_form_laplacian(const OperatorSet& ops);

/// rot1 * d0 * f, the discrete *_Sigma d f. Co-closed by construction.
Cochain1 rotated_differential(const OperatorSet& ops, const Cochain0& f);

struct HodgeParts {
  Cochain1 exact;
  Cochain1 coexact;
  Cochain1 harmonic;
};

/// Reusable Hodge splitter: one factorisation of the mixed system for the
/// co-exact part, plus the scalar solver for the exact part.
class HodgeDecomposer {
 public:
  explicit HodgeDecomposer(const OperatorSet& ops);
  ~HodgeDecomposer();
  HodgeDecomposer(HodgeDecomposer&&) noexcept;
  HodgeParts operator()(const Cochain1& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// b = d0 phi + star1^{-1} d1^T psi + h, mutually star1-orthogonal.
HodgeParts hodge_decompose(const OperatorSet& ops, const Cochain1& b);

double inner_product(const OperatorSet& ops, const Cochain0& a, const Cochain0& b);
double inner_product(const OperatorSet& ops, const Cochain1& a, const Cochain1& b);
double norm(const OperatorSet& ops, const Cochain0& a);
double norm(const OperatorSet& ops, const Cochain1& a);

/// Coordinate-format text: header "rows cols nnz", then "i j value" lines (0-based).
void write_coo(std::ostream& out, const SparseMatrix& m);
void export_operators(const OperatorSet& ops, const std::string& directory);

}  // namespace beltrami
