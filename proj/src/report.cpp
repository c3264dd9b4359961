#include "beltrami/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <iomanip>

#include "beltrami/error.hpp"

namespace beltrami {

std::string config_hash(const std::string& canonical_config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_config) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

Json artifact_envelope(const std::string& kind, const std::string& hash, std::uint64_t seed, Json result) {
  Json j;
  j["artifact"] = kind;
  j["format_version"] = 1;
  j["config_hash"] = hash;
  j["seed"] = seed;
  j["result"] = std::move(result);
  return j;
}

namespace {

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json to_json(const Verdict& v) {
  return {{"classification", to_string(v.classification)},
          {"rule_fired", to_string(v.rule_fired)},
          {"witness_region", optional_json(v.witness_region)},
          {"curve_components", v.curve_components},
          {"empty_gamma_flag", v.empty_gamma_flag}};
}

Json to_json(const RegionTopology& r) {
  return {{"region_id", r.region_id},
          {"sign", r.sign},
          {"vertex_count", r.vertex_count},
          {"euler_characteristic", r.euler_characteristic},
          {"boundary_loop_count", r.boundary_loop_count},
          {"boundary_curves", r.boundary_curves},
          {"is_disc", r.is_disc}};
}

Json to_json(const NodalDomainSet& d) {
  Json regions = Json::array();
  for (const auto& r : d.regions) regions.push_back(to_json(r));
  return {{"curve_components", d.curve_components}, {"regions", regions}};
}

Json to_json(const std::vector<EigenPair>& pairs) {
  Json out = Json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out.push_back({{"index", i + 1},
                   {"eigenvalue", pairs[i].eigenvalue},
                   {"residual", pairs[i].residual},
                   {"cluster_id", pairs[i].cluster}});
  }
  return out;
}

Json to_json(const OrbitSummary& o) {
  return {{"ran", o.ran},
          {"shears", o.shears},
          {"flows", o.flows},
          {"usable_flows", o.usable_flows},
          {"min_ratio_shear", o.min_ratio_shear},
          {"min_ratio_flow", o.min_ratio_flow},
          {"max_tau_vol", o.max_tau_vol},
          {"max_helicity_change_shear", o.max_helicity_change_shear},
          {"flagged_flows", o.flagged_flows},
          {"passed", o.passed},
          {"failure", o.failure}};
}

Json to_json(const HelicitySummary& h) {
  return {{"ran", h.ran},
          {"samples", h.samples},
          {"violations", h.violations},
          {"mu1", h.mu1},
          {"min_slack", h.min_slack},
          {"alpha1_slack", h.alpha1_slack},
          {"max_kernel_fraction", h.max_kernel_fraction},
          {"passed", h.passed},
          {"failure", h.failure}};
}

Json to_json(const MemberReport& m) {
  return {{"index", m.index},
          {"eigenvalue", m.eigenvalue},
          {"residual", m.residual},
          {"nodal_components", m.nodal_components},
          {"verdict", to_json(m.verdict)},
          {"disc_witness", optional_json(m.disc_witness)},
          {"witness_valid", m.witness_valid},
          {"curl_residual_plus", m.curl_residual_plus},
          {"curl_residual_minus", m.curl_residual_minus}};
}

Json to_json(const CertificateReport& r) {
  Json members = Json::array();
  for (const auto& m : r.members) members.push_back(to_json(m));
  return {{"metric_params", {{"amplitude", r.params.amplitude}, {"sigma", r.params.sigma}, {"center", r.params.center}}},
          {"skipped", r.skipped},
          {"skip_reason", r.skip_reason},
          {"fiber_length", r.fiber_length},
          {"nu1", r.nu1},
          {"fiber_eigenvalue", r.fiber_eigenvalue},
          {"branch", to_string(r.branch)},
          {"cluster_size", r.cluster_size},
          {"cluster_ambiguity", r.cluster_ambiguity},
          {"selected_member", r.selected_member},
          {"members", members},
          {"nodal_components", r.nodal_components},
          {"disc_witness", optional_json(r.disc_witness)},
          {"verdict", to_json(r.verdict)},
          {"curl_residual_plus", r.curl_residual_plus},
          {"curl_residual_minus", r.curl_residual_minus},
          {"curl_tolerance", r.curl_tolerance},
          {"orbit_test", to_json(r.orbit)},
          {"helicity_bound", to_json(r.helicity)},
          {"complete", r.complete}};
}

Json to_json(const OrbitReport& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples) {
    samples.push_back({{"kind", s.kind == OrbitPerturbation::Kind::FiberShear ? "fiber_shear" : "hamiltonian_flow"},
                       {"energy", s.energy},
                       {"ratio", s.ratio},
                       {"tau_vol", s.tau_vol},
                       {"usable", s.usable},
                       {"helicity_change", s.helicity_change},
                       {"violation", s.violation}});
  }
  return {{"base_energy", r.base_energy},
          {"min_ratio_shear", r.min_ratio_shear},
          {"min_ratio_flow", r.min_ratio_flow},
          {"max_tau_vol", r.max_tau_vol},
          {"max_helicity_change_shear", r.max_helicity_change_shear},
          {"violations", r.violations},
          {"unusable", r.unusable},
          {"samples", samples}};
}

Json to_json(const S2AuditReport& r) {
  return {{"nu1", r.nu1},
          {"fiber_eigenvalue", r.fiber_eigenvalue},
          {"branch", to_string(r.branch)},
          {"has_zeros", r.has_zeros},
          {"courant", optional_json(r.courant)},
          {"nodal_domains", r.domains.regions.size()},
          {"curve_components", r.domains.curve_components},
          {"verdict", r.verdict ? to_json(*r.verdict) : Json(nullptr)}};
}

CertificateReport certificate_from_json(const Json& j) {
  try {
    const Json& r = j.contains("result") ? j.at("result") : j;
    CertificateReport out;
    const Json& p = r.at("metric_params");
    out.params = {p.at("amplitude").get<double>(), p.at("sigma").get<double>(), p.at("center").get<int>()};
    out.fiber_length = r.at("fiber_length").get<double>();
    out.nu1 = r.at("nu1").get<double>();
    out.selected_member = r.at("selected_member").get<int>();
    out.complete = r.at("complete").get<bool>();
    out.skipped = r.at("skipped").get<bool>();
    out.curl_tolerance = r.at("curl_tolerance").get<double>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed certificate: ") + e.what());
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<CertificateReport>& reports) {
  out << std::setprecision(17);
  out << "A,sigma,nu1,branch,components,verdict,complete,skipped\n";
  for (const auto& r : reports) {
    out << r.params.amplitude << ',' << r.params.sigma << ',' << r.nu1 << ',' << to_string(r.branch) << ','
        << r.nodal_components << ',' << (r.skipped ? "skipped" : to_string(r.verdict.classification)) << ','
        << (r.complete ? 1 : 0) << ',' << (r.skipped ? 1 : 0) << '\n';
  }
}

void write_scalar_obj(std::ostream& out, const TriangleMesh& mesh, const Eigen::VectorXd& values) {
  if (values.size() != mesh.num_vertices()) throw Error(ErrorKind::InvalidArgument, "scalar size differs from V");
  const double peak = std::max(values.cwiseAbs().maxCoeff(), 1e-300);
  out << std::setprecision(17);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const double s = values[v] / peak;
    const double r = s > 0 ? 1.0 : 1.0 + s, b = s < 0 ? 1.0 : 1.0 - s, g = 1.0 - std::abs(s);
    const auto& x = mesh.positions()[v];
    out << "v " << x.x() << ' ' << x.y() << ' ' << x.z() << ' ' << r << ' ' << g << ' ' << b << '\n';
  }
  for (const auto& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  for (int v = 0; v < mesh.num_vertices(); ++v) out << "# f " << values[v] << '\n';
}

}  // namespace beltrami
