#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "beltrami/contact.hpp"
#include "beltrami/energy.hpp"
#include "beltrami/spectral.hpp"

namespace beltrami {

struct BumpParams {
  double amplitude = 0.0;
  double sigma = 1.0;
  int center = 0;
};

struct BumpFamily {
  int center = 0;
  std::vector<double> amplitudes;
  std::vector<double> widths;
};

/// Graph-geodesic distances from `source` along base edge lengths (Dijkstra).
std::vector<double> graph_distances(const TriangleMesh& mesh, int source);

struct BumpResult {
  std::optional<ConformalFactor> factor;
  std::string skip_reason;  // set when the factor breaks a triangle inequality
};

/// u_i = A exp(-d(i, center)^2 / sigma^2).
BumpResult bump_factor(const TriangleMesh& mesh, const BumpParams& params);

struct SweepConfig {
  double fiber_length = 1.0;
  SpectrumRequest spectrum;
  double curl_tolerance = 0.05;
  int helicity_samples = 100;
  int curl_eigenforms = 6;
  int shears = 100;
  int flows = 20;
  int orbit_modes = 6;  // eigenfunctions mixed into shear and flow fields
  int flow_steps = 64;
  double flow_fraction = 0.2;
  double flow_ratio_floor = 1e-2;
  std::uint64_t seed = 0;
  int bisection_steps = 0;  // refinements per tight/overtwisted transition in A
};

struct MemberReport {
  int index = 0;
  double eigenvalue = 0.0;
  double residual = 0.0;
  int nodal_components = 0;
  Verdict verdict;
  std::optional<int> disc_witness;
  bool witness_valid = false;
  double curl_residual_plus = 0.0;
  double curl_residual_minus = 0.0;
};

struct OrbitSummary {
  bool ran = false;
  int shears = 0;
  int flows = 0;
  int usable_flows = 0;
  double min_ratio_shear = 1.0;
  double min_ratio_flow = 1.0;  // over usable flows
  double max_tau_vol = 0.0;
  double max_helicity_change_shear = 0.0;
  int flagged_flows = 0;  // ratio below 1 - 10 tau_vol
  bool passed = false;
  std::string failure;
};

struct HelicitySummary {
  bool ran = false;
  int samples = 0;
  int violations = 0;
  double mu1 = 0.0;
  double min_slack = 0.0;
  double alpha1_slack = 0.0;
  double max_kernel_fraction = 0.0;
  bool passed = false;
  std::string failure;
};

struct CertificateReport {
  BumpParams params;
  bool skipped = false;
  std::string skip_reason;
  double fiber_length = 0.0;
  double nu1 = 0.0;
  double fiber_eigenvalue = 0.0;
  Branch branch = Branch::Nu1;
  int cluster_size = 1;
  bool cluster_ambiguity = false;
  std::vector<MemberReport> members;
  int selected_member = 0;
  // copies of the selected member's fields
  int nodal_components = 0;
  std::optional<int> disc_witness;
  Verdict verdict;
  double curl_residual_plus = 0.0;
  double curl_residual_minus = 0.0;
  double curl_tolerance = 0.05;
  OrbitSummary orbit;
  HelicitySummary helicity;
  bool complete = false;
  double seconds = 0.0;
  Eigen::VectorXd f1;  // selected eigenfunction, kept for export
};

/// Completeness: overtwisted with a valid disc witness, nu1 branch, both curl
/// residuals within tolerance, orbit and helicity tests passed.
bool certify(const CertificateReport& report);

/// Full pipeline at one metric. Failures other than property violations
/// mark the report skipped.
CertificateReport evaluate_bump(const TriangleMesh& mesh, const BumpParams& params, const SweepConfig& config);

/// Grid sweep over amplitudes x widths, complete certificates first, then
/// parameter order. Refuses genus 0.
std::vector<CertificateReport> sweep(const TriangleMesh& mesh, const BumpFamily& family, const SweepConfig& config);

/// Smooth random factor: a Gaussian combination of the monomials of degree
/// 1 to 3 in the embedding coordinates, scaled to max |u| = amplitude.
/// Draw `index` of the metrics stream of `seed`.
ConformalFactor random_conformal_factor(const TriangleMesh& mesh, std::uint64_t seed, int index, double amplitude);

struct S2Trial {
  int index = 0;
  double max_abs_u = 0.0;
  S2AuditReport report;
};

/// S^2 x S^1 audit over `trials` random conformal metrics on the unit
/// icosphere. An overtwisted verdict throws PropositionViolation.
std::vector<S2Trial> s2_audit_trials(int subdivisions, int trials, std::uint64_t seed, double fiber_length,
                                     double amplitude = 0.5);

}  // namespace beltrami
