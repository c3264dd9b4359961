#include "beltrami/dec.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "beltrami/error.hpp"

namespace beltrami {

namespace detail {

struct Factorizations {
  Eigen::SimplicialLLT<SparseMatrix> star1;
  Eigen::SimplicialLLT<SparseMatrix> stiffness_pinned;
  std::vector<int> pinned;     // one vertex per component
  std::vector<int> reduced_of; // vertex -> reduced index or -1
};

}  // namespace detail

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(int rows, int cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// Local Whitney quantities of one triangle with lengths opposite each vertex.
struct LocalForms {
  double mass[3][3];
  double wedge[3][3];
};

LocalForms local_whitney(double area, const std::array<double, 3>& opposite) {
  double grad[3][3];
  const double a2 = area * area;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) {
        grad[i][i] = opposite[i] * opposite[i] / (4.0 * a2);
      } else {
        const int k = 3 - i - j;
        grad[i][j] = (opposite[k] * opposite[k] - opposite[i] * opposite[i] - opposite[j] * opposite[j]) / (8.0 * a2);
      }
    }
  }
  auto lam = [area](int a, int b) { return area * (a == b ? 2.0 : 1.0) / 12.0; };
  auto wed = [area](int a, int b) {
    if (b == (a + 1) % 3) return 1.0 / (2.0 * area);
    if (a == (b + 1) % 3) return -1.0 / (2.0 * area);
    return 0.0;
  };
  LocalForms out{};
  for (int p = 0; p < 3; ++p) {
    const int i = p, j = (p + 1) % 3;
    for (int q = 0; q < 3; ++q) {
      const int k = q, m = (q + 1) % 3;
      out.mass[p][q] = lam(i, k) * grad[j][m] - lam(i, m) * grad[j][k] - lam(j, k) * grad[i][m] + lam(j, m) * grad[i][k];
      out.wedge[p][q] = lam(i, k) * wed(j, m) - lam(i, m) * wed(j, k) - lam(j, k) * wed(i, m) + lam(j, m) * wed(i, k);
    }
  }
  return out;
}

}  // namespace

OperatorSet OperatorSet::assemble(const TriangleMesh& mesh, const ConformalFactor& factor) {
  OperatorSet ops;
  ops.mesh_ = std::make_shared<const TriangleMesh>(mesh);
  const int nv = mesh.num_vertices(), ne = mesh.num_edges(), nf = mesh.num_faces();
  ops.lengths_ = effective_edge_lengths(mesh, factor);

  Triplets t0;
  t0.reserve(2 * ne);
  for (int e = 0; e < ne; ++e) {
    t0.emplace_back(e, mesh.edges()[e][0], -1.0);
    t0.emplace_back(e, mesh.edges()[e][1], 1.0);
  }
  ops.d0_ = from_triplets(ne, nv, t0);

  Triplets t1, tm, tw;
  t1.reserve(3 * nf);
  tm.reserve(9 * nf);
  tw.reserve(6 * nf);
  ops.star0_ = Eigen::VectorXd::Zero(nv);
  ops.areas_.resize(nf);
  ops.star2_.resize(nf);
  for (int f = 0; f < nf; ++f) {
    std::array<int, 3> eid{}, sg{};
    std::array<double, 3> len{};
    for (int k = 0; k < 3; ++k) {
      eid[k] = mesh.face_edge(f, k);
      sg[k] = mesh.face_edge_sign(f, k);
      len[k] = ops.lengths_[eid[k]];
      t1.emplace_back(f, eid[k], static_cast<double>(sg[k]));
    }
    const double area = triangle_area(len[0], len[1], len[2]);
    ops.areas_[f] = area;
    ops.star2_[f] = 1.0 / area;
    for (int k = 0; k < 3; ++k) ops.star0_[mesh.faces()[f][k]] += area / 3.0;
    // vertex i is opposite local edge (i+1)%3
    const std::array<double, 3> opposite{len[1], len[2], len[0]};
    const auto local = local_whitney(area, opposite);
    for (int p = 0; p < 3; ++p) {
      for (int q = 0; q < 3; ++q) {
        tm.emplace_back(eid[p], eid[q], sg[p] * sg[q] * local.mass[p][q]);
        if (p != q) tw.emplace_back(eid[p], eid[q], sg[p] * sg[q] * local.wedge[p][q]);
      }
    }
  }
  ops.d1_ = from_triplets(nf, ne, t1);
  ops.star1_ = from_triplets(ne, ne, tm);
  ops.wedge_ = from_triplets(ne, ne, tw);
  ops.wedge_.prune(0.0);
  ops.stiffness_ = SparseMatrix(ops.d0_.transpose() * ops.star1_ * ops.d0_);
  ops.stiffness_.makeCompressed();

  // Constant modes per component, star0-normalised.
  const int nc = mesh.num_components();
  ops.constants_.assign(nc, Eigen::VectorXd::Zero(nv));
  for (int v = 0; v < nv; ++v) ops.constants_[mesh.vertex_component()[v]][v] = 1.0;
  for (auto& c : ops.constants_) c /= std::sqrt(c.dot(ops.star0_.asDiagonal() * c));

  auto fact = std::make_shared<detail::Factorizations>();
  fact->star1.compute(ops.star1_);
  if (fact->star1.info() != Eigen::Success) {
    throw Error(ErrorKind::InternalConsistency, "Whitney mass matrix is not positive definite");
  }
  fact->pinned.assign(nc, -1);
  for (int v = 0; v < nv; ++v) {
    int& p = fact->pinned[mesh.vertex_component()[v]];
    if (p < 0) p = v;
  }
  fact->reduced_of.assign(nv, -1);
  int r = 0;
  for (int v = 0; v < nv; ++v) {
    if (fact->pinned[mesh.vertex_component()[v]] != v) fact->reduced_of[v] = r++;
  }
  Triplets ts;
  ts.reserve(ops.stiffness_.nonZeros());
  for (int col = 0; col < ops.stiffness_.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(ops.stiffness_, col); it; ++it) {
      const int ri = fact->reduced_of[it.row()], ci = fact->reduced_of[it.col()];
      if (ri >= 0 && ci >= 0) ts.emplace_back(ri, ci, it.value());
    }
  }
  const SparseMatrix reduced = from_triplets(r, r, ts);
  fact->stiffness_pinned.compute(reduced);
  if (fact->stiffness_pinned.info() != Eigen::Success) {
    throw Error(ErrorKind::InternalConsistency, "pinned scalar stiffness is not positive definite");
  }
  ops.fact_ = std::move(fact);
  return ops;
}

Eigen::VectorXd OperatorSet::star1_solve(const Eigen::VectorXd& rhs) const { return fact_->star1.solve(rhs); }

Eigen::VectorXd OperatorSet::rot1(const Eigen::VectorXd& w) const { return -star1_solve(wedge_ * w); }

Eigen::VectorXd OperatorSet::remove_constants(const Eigen::VectorXd& f) const {
  Eigen::VectorXd out = f;
  for (const auto& c : constants_) out -= c * c.dot(star0_.cwiseProduct(f));
  return out;
}

Eigen::VectorXd OperatorSet::scalar_solve(const Eigen::VectorXd& rhs) const {
  // Make rhs consistent: remove star0 * (constant component) for each component.
  Eigen::VectorXd r = rhs;
  for (const auto& c : constants_) r -= star0_.cwiseProduct(c) * c.dot(rhs);
  Eigen::VectorXd reduced(fact_->stiffness_pinned.rows());
  for (int v = 0; v < num_vertices(); ++v) {
    if (fact_->reduced_of[v] >= 0) reduced[fact_->reduced_of[v]] = r[v];
  }
  const Eigen::VectorXd y = fact_->stiffness_pinned.solve(reduced);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(num_vertices());
  for (int v = 0; v < num_vertices(); ++v) {
    if (fact_->reduced_of[v] >= 0) x[v] = y[fact_->reduced_of[v]];
  }
  return remove_constants(x);
}

ScalarLaplacian scalar_laplacian(const OperatorSet& ops) {
  SparseMatrix mass(ops.num_vertices(), ops.num_vertices());
  mass = ops.star0().asDiagonal();
  return {ops.stiffness(), mass};
}

OneFormLaplacian::OneFormLaplacian(const OperatorSet& ops) : ops_(&ops) {
  const SparseMatrix m1d0 = ops.star1() * ops.d0();
  const Eigen::VectorXd inv0 = ops.star0().cwiseInverse();
  weak_ = SparseMatrix(m1d0 * inv0.asDiagonal() * m1d0.transpose());
  weak_ += SparseMatrix(ops.d1().transpose() * ops.star2().asDiagonal() * ops.d1());
  weak_.makeCompressed();
}

Cochain1 OneFormLaplacian::apply(const Cochain1& b) const {
  return {ops_->star1_solve(weak_ * b.values)};
}

double OneFormLaplacian::rayleigh(const Cochain1& b) const {
  const double den = b.values.dot(ops_->star1() * b.values);
  if (!(den > 0.0)) throw Error(ErrorKind::InvalidArgument, "Rayleigh quotient of the zero cochain");
  return b.values.dot(weak_ * b.values) / den;
}

OneFormLaplacian one_form_laplacian(const OperatorSet& ops) { return OneFormLaplacian(ops); }

Cochain1 rotated_differential(const OperatorSet& ops, const Cochain0& f) {
  return {ops.rot1(ops.d0() * f.values)};
}

struct HodgeDecomposer::Impl {
  const OperatorSet* ops;
  Eigen::SparseLU<SparseMatrix> mixed;
  std::vector<int> face_reduced;  // face -> unknown index (after E edge unknowns) or -1
  int unknowns = 0;
};

HodgeDecomposer::HodgeDecomposer(const OperatorSet& ops) : impl_(std::make_unique<Impl>()) {
  impl_->ops = &ops;
  const auto& mesh = ops.mesh();
  const int ne = ops.num_edges(), nf = ops.num_faces();
  // ker d1^T = constants on the faces of each component; pin one face each.
  std::vector<char> pinned_comp(mesh.num_components(), 0);
  impl_->face_reduced.assign(nf, -1);
  int next = ne;
  for (int f = 0; f < nf; ++f) {
    const int c = mesh.vertex_component()[mesh.faces()[f][0]];
    if (!pinned_comp[c]) {
      pinned_comp[c] = 1;
      continue;
    }
    impl_->face_reduced[f] = next++;
  }
  impl_->unknowns = next;
  // [ star1  d1^T ] [ c   ]   [ 0    ]
  // [ d1     0    ] [ -psi] = [ d1 b ]
  Triplets t;
  t.reserve(ops.star1().nonZeros() + 2 * ops.d1().nonZeros());
  for (int col = 0; col < ops.star1().outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(ops.star1(), col); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  }
  for (int col = 0; col < ops.d1().outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(ops.d1(), col); it; ++it) {
      const int fr = impl_->face_reduced[it.row()];
      if (fr < 0) continue;
      t.emplace_back(fr, it.col(), it.value());
      t.emplace_back(it.col(), fr, it.value());
    }
  }
  const SparseMatrix k = from_triplets(next, next, t);
  impl_->mixed.analyzePattern(k);
  impl_->mixed.factorize(k);
  if (impl_->mixed.info() != Eigen::Success) {
    throw SolverFailure("Hodge mixed system factorisation failed", std::nan(""));
  }
}

HodgeDecomposer::~HodgeDecomposer() = default;
HodgeDecomposer::HodgeDecomposer(HodgeDecomposer&&) noexcept = default;

HodgeParts HodgeDecomposer::operator()(const Cochain1& b) const {
  const auto& ops = *impl_->ops;
  if (b.values.size() != ops.num_edges()) throw Error(ErrorKind::InvalidArgument, "cochain size mismatch");
  HodgeParts parts;
  const Eigen::VectorXd phi = ops.scalar_solve(ops.d0().transpose() * (ops.star1() * b.values));
  parts.exact.values = ops.d0() * phi;

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(impl_->unknowns);
  const Eigen::VectorXd db = ops.d1() * b.values;
  for (int f = 0; f < ops.num_faces(); ++f) {
    if (impl_->face_reduced[f] >= 0) rhs[impl_->face_reduced[f]] = db[f];
  }
  const Eigen::VectorXd sol = impl_->mixed.solve(rhs);
  parts.coexact.values = sol.head(ops.num_edges());
  parts.harmonic.values = b.values - parts.exact.values - parts.coexact.values;

  const double scale = std::max(1.0, std::sqrt(b.values.dot(ops.star1() * b.values)));
  const double resid = (ops.d1() * parts.coexact.values - db).norm();
  if (!std::isfinite(resid) || resid > 1e-8 * scale * std::max(1.0, db.norm())) {
    throw SolverFailure("co-exact projection did not converge", resid);
  }
  return parts;
}

HodgeParts hodge_decompose(const OperatorSet& ops, const Cochain1& b) { return HodgeDecomposer(ops)(b); }

double inner_product(const OperatorSet& ops, const Cochain0& a, const Cochain0& b) {
  return a.values.dot(ops.star0().cwiseProduct(b.values));
}

double inner_product(const OperatorSet& ops, const Cochain1& a, const Cochain1& b) {
  return a.values.dot(ops.star1() * b.values);
}

double norm(const OperatorSet& ops, const Cochain0& a) { return std::sqrt(inner_product(ops, a, a)); }
double norm(const OperatorSet& ops, const Cochain1& a) { return std::sqrt(inner_product(ops, a, a)); }

void write_coo(std::ostream& out, const SparseMatrix& m) {
  out << std::setprecision(17) << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (int col = 0; col < m.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  }
}

void export_operators(const OperatorSet& ops, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  auto dump = [&](const std::string& name, const SparseMatrix& m) {
    std::ofstream out(fs::path(directory) / name);
    if (!out) throw Error(ErrorKind::Io, "cannot write operator file " + name);
    write_coo(out, m);
  };
  SparseMatrix s0(ops.num_vertices(), ops.num_vertices());
  s0 = ops.star0().asDiagonal();
  SparseMatrix s2(ops.num_faces(), ops.num_faces());
  s2 = ops.star2().asDiagonal();
  dump("d0.coo", ops.d0());
  dump("d1.coo", ops.d1());
  dump("star0.coo", s0);
  dump("star1.coo", ops.star1());
  dump("star2.coo", s2);
  dump("wedge.coo", ops.wedge());
}

}  // namespace beltrami
