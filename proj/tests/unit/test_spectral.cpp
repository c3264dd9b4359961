#include <doctest.h>

#include <cmath>
#include <numbers>

#include "beltrami/error.hpp"
#include "beltrami/lanczos.hpp"
#include "beltrami/mesh_io.hpp"
#include "beltrami/spectral.hpp"

using namespace beltrami;

TEST_CASE("block Krylov finds the top of a diagonal spectrum") {
  const int n = 200;
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = 1.0 / (1.0 + i);
  SparseMatrix I(n, n);
  I.setIdentity();
  auto apply = [&](const Eigen::MatrixXd& X) { return Eigen::MatrixXd(d.asDiagonal() * X); };
  auto residual = [&](const Eigen::MatrixXd& V, const Eigen::VectorXd& th) {
    Eigen::VectorXd r(V.cols());
    for (int j = 0; j < V.cols(); ++j) r[j] = (d.asDiagonal() * V.col(j) - th[j] * V.col(j)).norm() / th[j];
    return r;
  };
  KrylovOptions opt;
  opt.count = 4;
  const KrylovResult res = block_krylov_largest(apply, I, {}, opt, residual);
  REQUIRE(res.converged);
  for (int j = 0; j < 4; ++j) CHECK(res.values[j] == doctest::Approx(1.0 / (1.0 + j)).epsilon(1e-10));
}

TEST_CASE("flat torus spectrum: clusters of 4 at 1 and 2") {
  const TriangleMesh m = generate_flat_torus(2.0 * std::numbers::pi, 32);
  const OperatorSet ops = OperatorSet::assemble(m, ConformalFactor::zero(m));
  SpectrumRequest req;
  req.count = 8;
  const auto pairs = solve_scalar_spectrum(ops, req);
  REQUIRE(pairs.size() == 8);
  CHECK(pairs[0].eigenvalue == doctest::Approx(1.0).epsilon(0.01));
  CHECK(cluster_size(pairs, 0) == 4);
  CHECK(pairs[4].eigenvalue == doctest::Approx(2.0).epsilon(0.02));
  for (const auto& p : pairs) {
    CHECK(p.residual <= 1e-9);
    const double rq = rayleigh_quotient(ops.stiffness(), scalar_laplacian(ops).mass, p.vector);
    CHECK(rq == doctest::Approx(p.eigenvalue).epsilon(1e-9));
    CHECK(std::abs(p.vector.dot(ops.star0())) < 1e-9);
  }
}

TEST_CASE("sphere spectrum and same result for the same seed") {
  const TriangleMesh m = generate_icosphere(1.0, 3);
  const OperatorSet ops = OperatorSet::assemble(m, ConformalFactor::zero(m));
  SpectrumRequest req;
  req.count = 4;
  const auto a = solve_scalar_spectrum(ops, req);
  const auto b = solve_scalar_spectrum(ops, req);
  CHECK(a[0].eigenvalue == doctest::Approx(2.0).epsilon(0.02));
  CHECK(cluster_size(a, 0) == 3);
  for (int j = 0; j < 4; ++j) {
    CHECK(a[j].eigenvalue == b[j].eigenvalue);
    CHECK((a[j].vector - b[j].vector).norm() == 0.0);
  }
}

TEST_CASE("invalid spectrum requests") {
  const TriangleMesh m = generate_icosphere(1.0, 1);
  const OperatorSet ops = OperatorSet::assemble(m, ConformalFactor::zero(m));
  SpectrumRequest req;
  req.shift = 0.5;
  CHECK_THROWS_AS(solve_scalar_spectrum(ops, req), Error);
  req.shift = 0.0;
  req.count = 0;
  CHECK_THROWS_AS(solve_scalar_spectrum(ops, req), Error);
}

TEST_CASE("harmonic basis has dimension 2g") {
  const TriangleMesh torus = generate_flat_torus(2.0 * std::numbers::pi, 12);
  const OperatorSet t = OperatorSet::assemble(torus, ConformalFactor::zero(torus));
  CHECK(harmonic_basis(OneFormLaplacian(t), t, 1, 1.0).size() == 2);
  const TriangleMesh g2 = load_mesh(std::string(BELTRAMI_FIXTURES) + "/genus2.obj");
  const OperatorSet o2 = OperatorSet::assemble(g2, ConformalFactor::zero(g2));
  SpectrumRequest req;
  req.count = 1;
  const double nu1 = solve_scalar_spectrum(o2, req)[0].eigenvalue;
  CHECK(harmonic_basis(OneFormLaplacian(o2), o2, 2, nu1).size() == 4);
  const TriangleMesh s = generate_icosphere(1.0, 2);
  const OperatorSet so = OperatorSet::assemble(s, ConformalFactor::zero(s));
  CHECK(harmonic_basis(OneFormLaplacian(so), so, 0, 2.0).empty());
  CHECK_THROWS_AS(harmonic_basis(OneFormLaplacian(so), so, 1, 2.0), Error);
}

TEST_CASE("requests that end inside a cluster still converge") {
  const TriangleMesh m = generate_flat_torus(2.0 * std::numbers::pi, 64);
  const OperatorSet ops = OperatorSet::assemble(m, ConformalFactor::zero(m));
  SpectrumRequest req;
  req.count = 6;
  const auto six = solve_scalar_spectrum(ops, req);
  req.count = 8;
  const auto eight = solve_scalar_spectrum(ops, req);
  CHECK(cluster_size(six, 4) == 2);
  CHECK(cluster_size(eight, 4) == 4);
  for (const auto& p : eight) CHECK(p.residual <= req.tolerance);
}
