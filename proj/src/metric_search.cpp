#include "beltrami/metric_search.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "beltrami/error.hpp"
#include "beltrami/random.hpp"

namespace beltrami {

std::vector<double> graph_distances(const TriangleMesh& mesh, int source) {
  if (source < 0 || source >= mesh.num_vertices()) {
    throw Error(ErrorKind::InvalidParameter, "bump centre " + std::to_string(source) + " is not a vertex");
  }
  std::vector<std::vector<std::pair<int, double>>> adj(mesh.num_vertices());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& ev = mesh.edges()[e];
    adj[ev[0]].push_back({ev[1], mesh.base_edge_lengths()[e]});
    adj[ev[1]].push_back({ev[0], mesh.base_edge_lengths()[e]});
  }
  std::vector<double> dist(mesh.num_vertices(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (const auto& [w, len] : adj[v]) {
      if (d + len < dist[w]) {
        dist[w] = d + len;
        queue.push({dist[w], w});
      }
    }
  }
  return dist;
}

BumpResult bump_factor(const TriangleMesh& mesh, const BumpParams& params) {
  if (!(params.sigma > 0.0) || !std::isfinite(params.sigma)) {
    throw Error(ErrorKind::InvalidParameter, "bump width must be positive");
  }
  if (!std::isfinite(params.amplitude)) throw Error(ErrorKind::InvalidParameter, "bump amplitude must be finite");
  const std::vector<double> dist = graph_distances(mesh, params.center);
  Eigen::VectorXd u(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const double r = dist[v] / params.sigma;
    u[v] = params.amplitude * std::exp(-r * r);
  }
  BumpResult out;
  try {
    out.factor = ConformalFactor::validated(mesh, std::move(u));
  } catch (const DegenerateMetric& e) {
    out.skip_reason = e.what();
  }
  return out;
}

bool certify(const CertificateReport& r) {
  if (r.skipped || r.branch != Branch::Nu1) return false;
  if (r.verdict.classification != Classification::Overtwisted || !r.disc_witness) return false;
  if (r.members.empty() || !r.members[r.selected_member].witness_valid) return false;
  if (!(r.curl_residual_plus <= r.curl_tolerance && r.curl_residual_minus <= r.curl_tolerance)) return false;
  return r.orbit.ran && r.orbit.passed && r.helicity.ran && r.helicity.passed;
}

namespace {

bool witness_valid(const NodalDomainSet& domains, const std::optional<int>& witness) {
  if (!witness) return false;
  for (const auto& reg : domains.regions) {
    if (reg.region_id != *witness) continue;
    return reg.euler_characteristic == 1 && reg.boundary_loop_count == 1 && reg.boundary_curves.size() == 1;
  }
  return false;
}

void run_helicity(CertificateReport& rep, const CurlInverse& inverse, const SweepConfig& config) {
  HelicitySummary& h = rep.helicity;
  h.ran = true;
  h.samples = config.helicity_samples;
  try {
    const CurlEigenforms eig = principal_curl_eigenforms(inverse, config.curl_eigenforms, config.seed);
    const HelicityBoundReport b = helicity_bound_check(inverse, config.helicity_samples, config.seed, eig);
    h.violations = b.violations;
    h.mu1 = b.mu1;
    h.min_slack = b.min_slack;
    h.alpha1_slack = b.alpha1_slack;
    h.max_kernel_fraction = b.max_kernel_fraction;
    h.passed = b.violations == 0 && std::abs(b.alpha1_slack) <= 1e-6;
    if (!h.passed) h.failure = "equality slack at alpha_1 exceeds 1e-6";
  } catch (const Error& e) {
    if (!e.is_property_violation()) throw;
    h.failure = e.what();
  }
}

void run_orbit(CertificateReport& rep, const CurlInverse& inverse, const InvariantOneForm& alpha,
               const std::vector<EigenPair>& pairs, const SweepConfig& config) {
  OrbitSummary& o = rep.orbit;
  o.ran = true;
  const auto& ops = inverse.ops();
  const int nm = std::min<int>(config.orbit_modes, static_cast<int>(pairs.size()));
  const std::vector<EigenPair> modes(pairs.begin(), pairs.begin() + nm);
  try {
    const auto family =
        random_orbit_family(ops, modes, config.shears, config.flows, config.seed, config.flow_fraction, config.flow_steps);
    const OrbitReport r = orbit_minimization_test(alpha, family, inverse);
    o.shears = config.shears;
    o.flows = config.flows;
    o.min_ratio_shear = r.min_ratio_shear;
    o.max_helicity_change_shear = r.max_helicity_change_shear;
    o.max_tau_vol = r.max_tau_vol;
    for (const auto& s : r.samples) {
      if (s.kind != OrbitPerturbation::Kind::HamiltonianFlow) continue;
      o.flagged_flows += s.violation;
      if (!s.usable) continue;
      ++o.usable_flows;
      o.min_ratio_flow = std::min(o.min_ratio_flow, s.ratio);
    }
    o.passed = o.min_ratio_shear >= 1.0 - 1e-9 && (config.flows == 0 || o.usable_flows > 0) &&
               o.min_ratio_flow >= 1.0 - config.flow_ratio_floor;
    if (!o.passed) {
      o.failure = o.usable_flows == 0 && config.flows > 0 ? "no flow sample within the area distortion limit"
                                                          : "flow pullback lowers the energy beyond the floor";
    }
  } catch (const Error& e) {
    if (!e.is_property_violation() && e.kind() != ErrorKind::StepSize) throw;
    o.failure = e.what();
  }
}

}  // namespace

CertificateReport evaluate_bump(const TriangleMesh& mesh, const BumpParams& params, const SweepConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  CertificateReport rep;
  rep.params = params;
  rep.fiber_length = config.fiber_length;
  rep.fiber_eigenvalue = fiber_eigenvalue(config.fiber_length);
  rep.curl_tolerance = config.curl_tolerance;
  auto finish = [&]() -> CertificateReport& {
    rep.complete = certify(rep);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
  };
  const BumpResult bump = bump_factor(mesh, params);
  if (!bump.factor) {
    rep.skipped = true;
    rep.skip_reason = bump.skip_reason;
    return finish();
  }
  try {
    const SurfaceTopology topo = topology(mesh);
    const BundleSpec spec = BundleSpec::product(config.fiber_length, topo.genus);
    const OperatorSet ops = OperatorSet::assemble(mesh, *bump.factor);
    SpectrumRequest req = config.spectrum;
    req.count = std::max(req.count, config.orbit_modes);
    const std::vector<EigenPair> pairs = solve_scalar_spectrum(ops, req);
    rep.nu1 = pairs.front().eigenvalue;
    rep.branch = principal_branch(rep.nu1, config.fiber_length);
    rep.cluster_size = cluster_size(pairs, 0);
    rep.cluster_ambiguity = rep.cluster_size > 1;

    int best = -1;
    for (int j = 0; j < rep.cluster_size; ++j) {
      MemberReport m;
      m.index = j;
      m.eigenvalue = pairs[j].eigenvalue;
      m.residual = pairs[j].residual;
      const Cochain0 f{pairs[j].vector};
      const auto curves = characteristic_projection(mesh, f);
      const NodalDomainSet domains = nodal_domains(mesh, f, curves);
      m.nodal_components = domains.curve_components;
      m.verdict = giroux_classify({topo, spec.euler_number, domains});
      m.disc_witness = m.verdict.witness_region;
      m.witness_valid = witness_valid(domains, m.disc_witness);
      const double mu = std::sqrt(m.eigenvalue);
      m.curl_residual_plus = curl_residual(spec, ops, chandrasekhar_lift(ops, f, m.eigenvalue, 1), mu);
      m.curl_residual_minus = curl_residual(spec, ops, chandrasekhar_lift(ops, f, m.eigenvalue, -1), -mu);
      const bool candidate = m.verdict.classification == Classification::Overtwisted && m.witness_valid;
      if (best < 0 && candidate) best = j;
      rep.members.push_back(m);
    }
    rep.selected_member = std::max(best, 0);
    const MemberReport& sel = rep.members[rep.selected_member];
    rep.nodal_components = sel.nodal_components;
    rep.disc_witness = sel.disc_witness;
    rep.verdict = sel.verdict;
    rep.curl_residual_plus = sel.curl_residual_plus;
    rep.curl_residual_minus = sel.curl_residual_minus;
    rep.f1 = pairs[rep.selected_member].vector;

    if (rep.verdict.classification == Classification::Overtwisted) {
      const CurlInverse inverse(spec, ops);
      run_helicity(rep, inverse, config);
      const InvariantOneForm alpha = chandrasekhar_lift(ops, {rep.f1}, sel.eigenvalue, 1);
      run_orbit(rep, inverse, alpha, pairs, config);
    }
  } catch (const Error& e) {
    if (e.is_property_violation()) throw;
    rep.skipped = true;
    rep.skip_reason = e.what();
  }
  return finish();
}

std::vector<CertificateReport> sweep(const TriangleMesh& mesh, const BumpFamily& family, const SweepConfig& config) {
  const SurfaceTopology topo = topology(mesh);
  if (topo.genus < 1) {
    throw Error(ErrorKind::InvalidArgument, "the bump sweep needs genus >= 1; genus-0 surfaces give only tight structures");
  }
  if (family.amplitudes.empty() || family.widths.empty()) {
    throw Error(ErrorKind::InvalidParameter, "empty amplitude or width grid");
  }
  std::vector<double> amps = family.amplitudes;
  std::sort(amps.begin(), amps.end());
  std::vector<CertificateReport> out;
  for (double sigma : family.widths) {
    std::vector<CertificateReport> row;
    for (double a : amps) row.push_back(evaluate_bump(mesh, {a, sigma, family.center}, config));
    auto overtwisted = [](const CertificateReport& r) {
      return !r.skipped && r.verdict.classification == Classification::Overtwisted;
    };
    for (std::size_t i = 0; i + 1 < amps.size() && config.bisection_steps > 0; ++i) {
      if (row[i].skipped || row[i + 1].skipped || overtwisted(row[i]) == overtwisted(row[i + 1])) continue;
      double lo = amps[i], hi = amps[i + 1];
      const bool lo_state = overtwisted(row[i]);
      for (int k = 0; k < config.bisection_steps; ++k) {
        const double mid = 0.5 * (lo + hi);
        CertificateReport r = evaluate_bump(mesh, {mid, sigma, family.center}, config);
        if (r.skipped) break;
        (overtwisted(r) == lo_state ? lo : hi) = mid;
        out.push_back(std::move(r));
      }
    }
    for (auto& r : row) out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const CertificateReport& x, const CertificateReport& y) {
    if (x.complete != y.complete) return x.complete;
    if (x.params.sigma != y.params.sigma) return x.params.sigma < y.params.sigma;
    return x.params.amplitude < y.params.amplitude;
  });
  return out;
}

ConformalFactor random_conformal_factor(const TriangleMesh& mesh, std::uint64_t seed, int index, double amplitude) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw Error(ErrorKind::InvalidParameter, "amplitude must be >= 0");
  auto rng = make_rng(seed, stream::kMetrics, static_cast<std::uint64_t>(index));
  std::normal_distribution<double> gauss;
  std::vector<std::array<int, 3>> powers;
  for (int d = 1; d <= 3; ++d) {
    for (int i = 0; i <= d; ++i) {
      for (int j = 0; i + j <= d; ++j) powers.push_back({i, j, d - i - j});
    }
  }
  std::vector<double> coef(powers.size());
  for (double& c : coef) c = gauss(rng);
  Eigen::VectorXd u(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Eigen::Vector3d& x = mesh.positions()[v];
    double val = 0.0;
    for (std::size_t k = 0; k < powers.size(); ++k) {
      val += coef[k] * std::pow(x.x(), powers[k][0]) * std::pow(x.y(), powers[k][1]) * std::pow(x.z(), powers[k][2]);
    }
    u[v] = val;
  }
  const double peak = u.cwiseAbs().maxCoeff();
  if (peak > 0.0) u *= amplitude / peak;
  return ConformalFactor::validated(mesh, std::move(u));
}

std::vector<S2Trial> s2_audit_trials(int subdivisions, int trials, std::uint64_t seed, double fiber_length,
                                     double amplitude) {
  if (trials < 1) throw Error(ErrorKind::InvalidParameter, "trials must be positive");
  const TriangleMesh mesh = generate_icosphere(1.0, subdivisions);
  const BundleSpec spec = BundleSpec::product(fiber_length, 0);
  std::vector<S2Trial> out;
  for (int i = 0; i < trials; ++i) {
    S2Trial t;
    t.index = i;
    const ConformalFactor u = random_conformal_factor(mesh, seed, i, amplitude);
    t.max_abs_u = u.u.cwiseAbs().maxCoeff();
    const OperatorSet ops = OperatorSet::assemble(mesh, u);
    SpectrumRequest req;
    req.count = 4;
    req.seed = split_seed(seed, stream::kEigensolver, static_cast<std::uint64_t>(i));
    const auto pairs = solve_scalar_spectrum(ops, req);
    std::vector<double> eigs;
    for (const auto& p : pairs) eigs.push_back(p.eigenvalue);
    t.report = s2_cross_s1_audit(spec, mesh, eigs, {pairs.front().vector});
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace beltrami
