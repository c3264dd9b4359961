#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "beltrami/energy.hpp"
#include "beltrami/error.hpp"
#include "beltrami/metric_search.hpp"
#include "beltrami/surface_flow.hpp"

using namespace beltrami;

namespace {
struct Fixture {
  TriangleMesh mesh = generate_flat_torus(2.0 * std::numbers::pi, 24);
  OperatorSet ops = OperatorSet::assemble(mesh, *bump_factor(mesh, {1.0, 0.8, 0}).factor);
  BundleSpec spec = BundleSpec::product(1.0, 1);
  std::vector<EigenPair> pairs = [this] {
    SpectrumRequest req;
    req.count = 6;
    return solve_scalar_spectrum(ops, req);
  }();
  InvariantOneForm alpha = chandrasekhar_lift(ops, {pairs[0].vector}, pairs[0].eigenvalue, 1);
};

double value_at(const OperatorSet& ops, const Cochain0& H, const SurfacePoint& p) {
  const auto& f = ops.mesh().faces()[p.face];
  return p.bary[0] * H.values[f[0]] + p.bary[1] * H.values[f[1]] + p.bary[2] * H.values[f[2]];
}
}  // namespace

TEST_CASE("helicity bound holds with equality at the principal curl eigenform") {
  Fixture fx;
  const CurlInverse inverse(fx.spec, fx.ops);
  const CurlEigenforms eig = principal_curl_eigenforms(inverse, 6, 5);
  for (std::size_t j = 1; j < eig.mu.size(); ++j) CHECK(eig.mu[j - 1] <= eig.mu[j]);
  const HelicityBoundReport rep = helicity_bound_check(inverse, 25, 9, eig);
  CHECK(rep.violations == 0);
  CHECK(rep.min_slack >= -1e-6);
  CHECK(std::abs(rep.alpha1_slack) <= 1e-9);
  CHECK(rep.second_slack == doctest::Approx(rep.expected_second_slack).epsilon(1e-6));
  CHECK(rep.max_kernel_fraction < 1e-8);
  // T is the inverse of the curl: T alpha_1 = alpha_1 / mu_1
  const InvariantOneForm t = inverse.apply(eig.forms[0]);
  CHECK(product_norm(fx.spec, fx.ops, t - eig.forms[0] * (1.0 / eig.mu[0])) < 1e-8);
}

TEST_CASE("kernel forms carry no helicity and are reported") {
  Fixture fx;
  const CurlInverse inverse(fx.spec, fx.ops);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::VectorXd psi(fx.ops.num_vertices());
  for (auto& x : psi) x = g(rng);
  const InvariantOneForm exact{{Eigen::VectorXd::Zero(fx.ops.num_vertices())}, {fx.ops.d0() * psi}};
  const HelicityResult h = helicity(inverse, exact);
  CHECK(std::abs(h.helicity) < 1e-10 * energy(fx.spec, fx.ops, exact));
  CHECK(h.kernel_fraction == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(h.kernel_warning);
}

TEST_CASE("fibre shears add exactly l |fbar dpsi|^2 to the energy of alpha_+") {
  Fixture fx;
  const CurlInverse inverse(fx.spec, fx.ops);
  const Cochain0 zero{Eigen::VectorXd::Zero(fx.ops.num_vertices())};
  CHECK(energy(fx.spec, fx.ops, fiber_shear_pullback(fx.alpha, zero, fx.ops)) ==
        energy(fx.spec, fx.ops, fx.alpha));
  const auto family = random_orbit_family(fx.ops, fx.pairs, 10, 0, 1);
  const OrbitReport rep = orbit_minimization_test(fx.alpha, family, inverse);
  CHECK(rep.violations == 0);
  CHECK(rep.min_ratio_shear >= 1.0 - 1e-12);
  CHECK(rep.max_helicity_change_shear < 1e-10);
  for (const auto& p : family) {
    const InvariantOneForm moved = fiber_shear_pullback(fx.alpha, p.field, fx.ops);
    const Eigen::VectorXd delta = moved.b.values - fx.alpha.b.values;
    const double expected = energy(fx.spec, fx.ops, fx.alpha) + fx.spec.fiber_length * delta.dot(fx.ops.star1() * delta);
    CHECK(energy(fx.spec, fx.ops, moved) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("Hamiltonian flow conserves H along trajectories and preserves area") {
  Fixture fx;
  const Cochain0 H{fx.pairs[1].vector};
  const HamiltonianFlow flow(fx.ops, H);
  const double t = 0.2 * 0.5 * fx.ops.edge_lengths().minCoeff() / flow.max_speed();
  for (int v = 0; v < fx.ops.num_vertices(); v += 7) {
    const SurfacePoint p = flow.trace(flow.at_vertex(v), 5.0 * t);
    CHECK(value_at(fx.ops, H, p) == doctest::Approx(H.values[v]).epsilon(1e-9).scale(1.0));
  }
  const FlowPullback fp = hamiltonian_pushforward(fx.alpha, H, t, 64, fx.ops);
  CHECK(fp.tau_vol <= 1e-3);
  CHECK(fp.usable);
  const double ratio = energy(fx.spec, fx.ops, fp.form) / energy(fx.spec, fx.ops, fx.alpha);
  CHECK(ratio >= 1.0 - 1e-2);
}

TEST_CASE("time-zero flow is the identity and long steps are refused") {
  Fixture fx;
  const Cochain0 H{fx.pairs[2].vector};
  const FlowPullback id = hamiltonian_pushforward(fx.alpha, H, 0.0, 4, fx.ops);
  CHECK((id.form.f.values - fx.alpha.f.values).norm() < 1e-12 * fx.alpha.f.values.norm());
  CHECK((id.form.b.values - fx.alpha.b.values).norm() < 1e-12 * fx.alpha.b.values.norm());
  CHECK(id.tau_vol < 1e-9);
  const double limit = 0.5 * fx.ops.edge_lengths().minCoeff() / HamiltonianFlow(fx.ops, H).max_speed();
  CHECK_THROWS_AS(hamiltonian_pushforward(fx.alpha, H, 1.5 * limit, 4, fx.ops), Error);
  CHECK_THROWS_AS(hamiltonian_pushforward(fx.alpha, H, -1.0, 4, fx.ops), Error);
}

TEST_CASE("orbit families are reproducible from the seed") {
  Fixture fx;
  const auto a = random_orbit_family(fx.ops, fx.pairs, 3, 2, 77);
  const auto b = random_orbit_family(fx.ops, fx.pairs, 3, 2, 77);
  const auto c = random_orbit_family(fx.ops, fx.pairs, 3, 2, 78);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].field.values == b[i].field.values);
    CHECK(a[i].t == b[i].t);
  }
  CHECK(a[0].field.values != c[0].field.values);
}
