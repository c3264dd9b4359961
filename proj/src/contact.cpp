#include "beltrami/contact.hpp"

#include "beltrami/error.hpp"

namespace beltrami {

const char* to_string(Classification c) {
  return c == Classification::UniversallyTight ? "universally_tight" : "overtwisted";
}

const char* to_string(GirouxRule r) {
  switch (r) {
    case GirouxRule::I: return "i";
    case GirouxRule::II: return "ii";
    case GirouxRule::III: return "iii";
  }
  return "unknown";
}

std::vector<NodalCurve> characteristic_projection(const TriangleMesh& mesh, const Cochain0& f1) {
  return extract_nodal_set(mesh, f1);
}

namespace {

std::optional<int> first_disc(const NodalDomainSet& d) {
  for (const auto& r : d.regions) {
    if (r.is_disc) return r.region_id;
  }
  return std::nullopt;
}

}  // namespace

Verdict giroux_classify(const ClassificationInput& input) {
  Verdict v;
  v.curve_components = input.regions.curve_components;
  const bool empty = input.regions.curve_components == 0;
  if (!input.topology.is_sphere) {
    v.rule_fired = GirouxRule::I;
    v.witness_region = first_disc(input.regions);
    v.classification = v.witness_region ? Classification::Overtwisted : Classification::UniversallyTight;
    return v;
  }
  if (input.euler_number < 0) {
    v.rule_fired = GirouxRule::II;
    v.classification = empty ? Classification::UniversallyTight : Classification::Overtwisted;
    return v;
  }
  v.rule_fired = GirouxRule::III;
  v.empty_gamma_flag = empty;
  if (input.regions.curve_components == 1) {
    v.classification = Classification::UniversallyTight;
  } else {
    v.classification = Classification::Overtwisted;
    v.witness_region = first_disc(input.regions);
  }
  return v;
}

S2AuditReport s2_cross_s1_audit(const BundleSpec& spec, const TriangleMesh& mesh, const std::vector<double>& scalar_eigs,
                                const Cochain0& f1) {
  const SurfaceTopology topo = topology(mesh);
  if (!topo.is_sphere || spec.euler_number != 0) {
    throw Error(ErrorKind::InvalidArgument, "the S^2 x S^1 audit needs a genus-0 base and e = 0");
  }
  if (scalar_eigs.empty()) throw Error(ErrorKind::InvalidArgument, "empty scalar spectrum");
  S2AuditReport rep;
  rep.nu1 = scalar_eigs.front();
  rep.fiber_eigenvalue = fiber_eigenvalue(spec.fiber_length);
  rep.branch = principal_branch(rep.nu1, spec.fiber_length);
  if (rep.branch == Branch::Fiber) {
    rep.has_zeros = true;
    return rep;
  }
  const auto curves = characteristic_projection(mesh, f1);
  rep.domains = nodal_domains(mesh, f1, curves);
  rep.courant = courant_check(rep.domains);
  rep.verdict = giroux_classify({topo, spec.euler_number, rep.domains});
  if (rep.verdict->classification == Classification::Overtwisted) {
    throw Error(ErrorKind::PropositionViolation,
                "principal eigenform on S^2 x S^1 classified overtwisted with " +
                    std::to_string(rep.domains.curve_components) + " nodal components");
  }
  return rep;
}

}  // namespace beltrami
