#include <doctest.h>

#include <cmath>
#include <numbers>

#include "beltrami/bundle.hpp"
#include "beltrami/error.hpp"
#include "beltrami/spectral.hpp"

using namespace beltrami;

TEST_CASE("principal branch selection") {
  CHECK(principal_branch(2.0, 1.0) == Branch::Nu1);
  CHECK(principal_branch(2.0, 100.0) == Branch::Fiber);
  CHECK(fiber_eigenvalue(100.0) == doctest::Approx(std::pow(2.0 * std::numbers::pi / 100.0, 2)));
  CHECK(fourier_eigenvalue(0, 3.0) == 0.0);
}

TEST_CASE("product spectrum is sorted and starts at min(nu1, (2 pi / l)^2)") {
  const std::vector<double> eigs{1.0, 1.0, 2.0};
  for (double l : {0.5, 2.0 * std::numbers::pi, 30.0}) {
    const auto s = assemble_product_spectrum(BundleSpec::product(l, 1), eigs, 3);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i - 1].value_sq <= s[i].value_sq);
    CHECK(s.front().value_sq == std::min(1.0, fiber_eigenvalue(l)));
  }
  CHECK_THROWS_AS(assemble_product_spectrum(BundleSpec::product(1.0, 0), {}, 3), Error);
  CHECK_THROWS_AS(assemble_product_spectrum(BundleSpec::product(-1.0, 0), eigs, 3), Error);
}

TEST_CASE("Chandrasekhar lift is a curl eigenform with the right sign and the residual shrinks with h") {
  double previous = 0.0;
  for (int n : {16, 32}) {
    const TriangleMesh m = generate_flat_torus(2.0 * std::numbers::pi, n);
    const OperatorSet ops = OperatorSet::assemble(m, ConformalFactor::zero(m));
    SpectrumRequest req;
    req.count = 1;
    const EigenPair p = solve_scalar_spectrum(ops, req)[0];
    const BundleSpec spec = BundleSpec::product(1.0, 1);
    const double mu = std::sqrt(p.eigenvalue);
    const double plus = curl_residual(spec, ops, chandrasekhar_lift(ops, {p.vector}, p.eigenvalue, 1), mu);
    const double minus = curl_residual(spec, ops, chandrasekhar_lift(ops, {p.vector}, p.eigenvalue, -1), -mu);
    CHECK(plus == doctest::Approx(minus).epsilon(1e-9));
    CHECK(curl_residual(spec, ops, chandrasekhar_lift(ops, {p.vector}, p.eigenvalue, 1), -mu) > 1.0);
    if (previous > 0.0) CHECK(previous / plus > 3.0);
    previous = plus;
  }
  CHECK(previous < 0.01);
}

TEST_CASE("product inner product scales with l") {
  const TriangleMesh m = generate_flat_torus(1.0, 6);
  const OperatorSet ops = OperatorSet::assemble(m, ConformalFactor::zero(m));
  InvariantOneForm a{{Eigen::VectorXd::Ones(ops.num_vertices())}, {Eigen::VectorXd::Zero(ops.num_edges())}};
  CHECK(product_inner(BundleSpec::product(2.0, 1), ops, a, a) ==
        doctest::Approx(2.0 * product_inner(BundleSpec::product(1.0, 1), ops, a, a)));
  CHECK(product_norm(BundleSpec::product(1.0, 1), ops, a) == doctest::Approx(1.0));
  CHECK(min_pointwise_norm_sq(ops, a) == doctest::Approx(1.0));
}
