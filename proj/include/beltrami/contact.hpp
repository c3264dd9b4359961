#pragma once

#include <optional>
#include <string>
#include <vector>

#include "beltrami/bundle.hpp"
#include "beltrami/nodal.hpp"

namespace beltrami {

struct ClassificationInput {
  SurfaceTopology topology;
  int euler_number = 0;
  NodalDomainSet regions;  // Gamma is empty iff regions.curve_components == 0
};

enum class Classification { UniversallyTight, Overtwisted };
enum class GirouxRule { I, II, III };
const char* to_string(Classification c);
const char* to_string(GirouxRule r);

struct Verdict {
  Classification classification = Classification::UniversallyTight;
  GirouxRule rule_fired = GirouxRule::I;
  std::optional<int> witness_region;
  int curve_components = 0;
  /// Set when Gamma is empty on the sphere with e >= 0, where the empty set
  /// is read as not connected.
  bool empty_gamma_flag = false;
};

/// The projection of the characteristic surface of alpha_{+-}: the zero set
/// of the generating eigenfunction.
std::vector<NodalCurve> characteristic_projection(const TriangleMesh& mesh, const Cochain0& f1);

/// Giroux's criterion for S^1-invariant structures.
///   genus >= 1: tight iff no region of Sigma minus Gamma is a disc (rule i).
///   genus 0, e < 0: tight iff Gamma is empty (rule ii).
///   genus 0, e >= 0: tight iff Gamma has exactly one component (rule iii).
Verdict giroux_classify(const ClassificationInput& input);

struct S2AuditReport {
  double nu1 = 0.0;
  double fiber_eigenvalue = 0.0;
  Branch branch = Branch::Nu1;
  bool has_zeros = false;  // fibre branch: the principal eigenforms vanish somewhere
  std::optional<bool> courant;
  std::optional<Verdict> verdict;
  NodalDomainSet domains;
};

/// Audit of the S^2 x S^1 case. On the nu1 branch the first eigenfunction is
/// classified and must be tight; an overtwisted verdict throws
/// PropositionViolation.
S2AuditReport s2_cross_s1_audit(const BundleSpec& spec, const TriangleMesh& mesh, const std::vector<double>& scalar_eigs,
                                const Cochain0& f1);

}  // namespace beltrami
