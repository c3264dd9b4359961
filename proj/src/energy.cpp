#include "beltrami/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "beltrami/error.hpp"
#include "beltrami/lanczos.hpp"
#include "beltrami/random.hpp"
#include "beltrami/surface_flow.hpp"

namespace beltrami {

double energy(const BundleSpec& spec, const OperatorSet& ops, const InvariantOneForm& a) {
  return product_inner(spec, ops, a, a);
}

CurlInverse::CurlInverse(const BundleSpec& spec, const OperatorSet& ops)
    : spec_(spec), ops_(&ops), hodge_(std::make_unique<HodgeDecomposer>(ops)) {}

CurlInverse::~CurlInverse() = default;

InvariantOneForm CurlInverse::apply(const InvariantOneForm& a) const {
  const auto& ops = *ops_;
  InvariantOneForm out;
  out.f.values = ops.scalar_solve(ops.d0().transpose() * (ops.wedge() * a.b.values));
  out.b.values = ops.rot1(ops.d0() * ops.scalar_solve(ops.star0().cwiseProduct(a.f.values)));
  return out;
}

double CurlInverse::helicity(const InvariantOneForm& a) const { return product_inner(spec_, *ops_, apply(a), a); }

double CurlInverse::kernel_norm(const InvariantOneForm& a) const {
  const auto& ops = *ops_;
  const Eigen::VectorXd fk = a.f.values - ops.remove_constants(a.f.values);
  const HodgeParts parts = (*hodge_)(a.b);
  const Eigen::VectorXd closed = parts.exact.values + parts.harmonic.values;
  return std::sqrt(spec_.fiber_length * (fk.dot(ops.star0().cwiseProduct(fk)) + closed.dot(ops.star1() * closed)));
}

HelicityResult helicity(const CurlInverse& inverse, const InvariantOneForm& a) {
  HelicityResult r;
  r.helicity = inverse.helicity(a);
  const double n = product_norm(inverse.spec(), inverse.ops(), a);
  r.kernel_fraction = n > 0.0 ? inverse.kernel_norm(a) / n : 0.0;
  r.kernel_warning = r.kernel_fraction > 0.01;
  return r;
}

HelicityResult helicity(const BundleSpec& spec, const OperatorSet& ops, const InvariantOneForm& a) {
  return helicity(CurlInverse(spec, ops), a);
}

CurlEigenforms principal_curl_eigenforms(const CurlInverse& inverse, int count, std::uint64_t seed) {
  const auto& ops = inverse.ops();
  const auto& spec = inverse.spec();
  auto apply_one = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd y = ops.d0() * ops.scalar_solve(ops.star0().cwiseProduct(x));
    const Eigen::VectorXd u = ops.star1_solve(ops.wedge() * y);
    return Eigen::VectorXd(ops.scalar_solve(-(ops.d0().transpose() * (ops.wedge() * u))));
  };
  auto apply = [&](const Eigen::MatrixXd& X) {
    Eigen::MatrixXd out(X.rows(), X.cols());
    for (int j = 0; j < X.cols(); ++j) out.col(j) = apply_one(X.col(j));
    return out;
  };
  SparseMatrix M(ops.num_vertices(), ops.num_vertices());
  M = ops.star0().asDiagonal();
  auto residual = [&](const Eigen::MatrixXd& V, const Eigen::VectorXd& theta) {
    Eigen::VectorXd res(V.cols());
    for (int j = 0; j < V.cols(); ++j) {
      const Eigen::VectorXd r = apply_one(V.col(j)) - theta[j] * V.col(j);
      res[j] = std::sqrt(r.dot(ops.star0().cwiseProduct(r))) / std::abs(theta[j]);
    }
    return res;
  };
  KrylovOptions opt;
  opt.count = count;
  opt.seed = split_seed(seed, stream::kEigensolver, 0);
  const KrylovResult kr = block_krylov_largest(apply, M, ops.constant_modes(), opt, residual);
  if (!kr.converged) throw SolverFailure("curl eigensolver hit the restart cap", kr.residuals.maxCoeff());
  CurlEigenforms out;
  int cluster = 0;
  for (int j = 0; j < count; ++j) {
    const double mu = 1.0 / std::sqrt(kr.values[j]);
    if (j > 0 && std::abs(mu - out.mu.back()) > 1e-6 * mu) ++cluster;
    InvariantOneForm a;
    a.f.values = kr.vectors.col(j);
    a.b.values = mu * ops.rot1(ops.d0() * ops.scalar_solve(ops.star0().cwiseProduct(a.f.values)));
    a = a * (1.0 / product_norm(spec, ops, a));
    out.mu.push_back(mu);
    out.forms.push_back(std::move(a));
    out.cluster.push_back(cluster);
  }
  return out;
}

HelicityBoundReport helicity_bound_check(const CurlInverse& inverse, int samples, std::uint64_t seed,
                                         const CurlEigenforms& eig) {
  if (samples < 1) throw Error(ErrorKind::InvalidParameter, "samples must be positive");
  if (eig.mu.empty()) throw Error(ErrorKind::InvalidArgument, "no curl eigenforms supplied");
  const auto& ops = inverse.ops();
  const auto& spec = inverse.spec();
  HelicityBoundReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.mu1 = eig.mu.front();
  rep.min_slack = std::numeric_limits<double>::infinity();
  auto slack = [&](const InvariantOneForm& a) {
    const double e = energy(spec, ops, a);
    return (e - rep.mu1 * std::abs(inverse.helicity(a))) / e;
  };
  for (int i = 0; i < samples; ++i) {
    auto rng = make_rng(seed, stream::kHelicitySamples, i);
    std::normal_distribution<double> gauss;
    InvariantOneForm x;
    x.f.values.resize(ops.num_vertices());
    x.b.values.resize(ops.num_edges());
    for (int v = 0; v < x.f.values.size(); ++v) x.f.values[v] = gauss(rng);
    for (int e = 0; e < x.b.values.size(); ++e) x.b.values[e] = gauss(rng);
    InvariantOneForm beta = inverse.apply(x);
    beta = beta * (1.0 / product_norm(spec, ops, beta));
    const double e = energy(spec, ops, beta);
    const double h = inverse.helicity(beta);
    const double s = (e - rep.mu1 * std::abs(h)) / e;
    rep.energies.push_back(e);
    rep.helicities.push_back(h);
    rep.slacks.push_back(s);
    rep.min_slack = std::min(rep.min_slack, s);
    rep.max_kernel_fraction = std::max(rep.max_kernel_fraction, inverse.kernel_norm(beta) / std::sqrt(e));
    if (s < -1e-6) ++rep.violations;
  }
  rep.alpha1_slack = slack(eig.forms.front());
  for (std::size_t j = 1; j < eig.mu.size(); ++j) {
    if (eig.cluster[j] != eig.cluster.front()) {
      rep.second_mu = eig.mu[j];
      rep.second_slack = slack(eig.forms[j]);
      rep.expected_second_slack = 1.0 - rep.mu1 / rep.second_mu;
      break;
    }
  }
  if (rep.violations > 0) {
    throw Error(ErrorKind::PropertyViolation, std::to_string(rep.violations) +
                                                  " samples violate E >= mu1 |H| (min slack " +
                                                  std::to_string(rep.min_slack) + ")");
  }
  return rep;
}

InvariantOneForm fiber_shear_pullback(const InvariantOneForm& a, const Cochain0& psi, const OperatorSet& ops) {
  const auto& mesh = ops.mesh();
  const Eigen::VectorXd dpsi = ops.d0() * psi.values;
  InvariantOneForm out = a;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& ev = mesh.edges()[e];
    out.b.values[e] += 0.5 * (a.f.values[ev[0]] + a.f.values[ev[1]]) * dpsi[e];
  }
  return out;
}

OrbitReport orbit_minimization_test(const InvariantOneForm& alpha, const std::vector<OrbitPerturbation>& family,
                                    const CurlInverse& inverse) {
  const auto& ops = inverse.ops();
  const auto& spec = inverse.spec();
  OrbitReport rep;
  rep.base_energy = energy(spec, ops, alpha);
  if (!(rep.base_energy > 0.0)) throw Error(ErrorKind::InvalidArgument, "orbit test of the zero form");
  const double base_helicity = inverse.helicity(alpha);
  for (const auto& p : family) {
    OrbitSample s;
    s.kind = p.kind;
    InvariantOneForm moved;
    double tol = 1e-9;
    if (p.kind == OrbitPerturbation::Kind::FiberShear) {
      moved = fiber_shear_pullback(alpha, p.field, ops);
    } else {
      const FlowPullback fp = hamiltonian_pushforward(alpha, p.field, p.t, p.steps, ops);
      moved = fp.form;
      s.tau_vol = fp.tau_vol;
      s.usable = fp.usable;
      tol = std::max(1e-9, 10.0 * fp.tau_vol);
    }
    s.energy = energy(spec, ops, moved);
    s.ratio = s.energy / rep.base_energy;
    s.helicity_change = std::abs(inverse.helicity(moved) - base_helicity) / rep.base_energy;
    s.violation = s.ratio < 1.0 - tol;
    if (p.kind == OrbitPerturbation::Kind::FiberShear) {
      rep.min_ratio_shear = std::min(rep.min_ratio_shear, s.ratio);
      rep.max_helicity_change_shear = std::max(rep.max_helicity_change_shear, s.helicity_change);
      if (s.violation) {
        throw Error(ErrorKind::PropertyViolation,
                    "fibre shear lowers the energy: ratio " + std::to_string(s.ratio));
      }
    } else {
      rep.min_ratio_flow = std::min(rep.min_ratio_flow, s.ratio);
      rep.max_tau_vol = std::max(rep.max_tau_vol, s.tau_vol);
      rep.unusable += !s.usable;
    }
    rep.violations += s.violation;
    rep.samples.push_back(s);
  }
  return rep;
}

std::vector<OrbitPerturbation> random_orbit_family(const OperatorSet& ops, const std::vector<EigenPair>& modes,
                                                   int shears, int flows, std::uint64_t seed, double flow_fraction,
                                                   int steps) {
  if (modes.empty()) throw Error(ErrorKind::InvalidArgument, "no modes for the orbit family");
  auto combo = [&](std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(ops.num_vertices());
    for (const auto& m : modes) v += gauss(rng) * m.vector;
    return Cochain0{v / std::sqrt(static_cast<double>(modes.size()))};
  };
  std::vector<OrbitPerturbation> out;
  for (int i = 0; i < shears; ++i) {
    auto rng = make_rng(seed, stream::kShears, i);
    out.push_back({OrbitPerturbation::Kind::FiberShear, combo(rng), 0.0, steps});
  }
  const double limit = 0.5 * ops.edge_lengths().minCoeff();
  for (int i = 0; i < flows; ++i) {
    auto rng = make_rng(seed, stream::kFlows, i);
    OrbitPerturbation p{OrbitPerturbation::Kind::HamiltonianFlow, combo(rng), 0.0, steps};
    const double speed = HamiltonianFlow(ops, p.field).max_speed();
    p.t = speed > 0.0 ? flow_fraction * limit / speed : 0.0;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace beltrami
