#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "beltrami/bundle.hpp"
#include "beltrami/spectral.hpp"

namespace beltrami {

/// E(a) = l * (|f|^2_star0 + |b|^2_star1).
double energy(const BundleSpec& spec, const OperatorSet& ops, const InvariantOneForm& a);

/// Inverse of the curl on the complement of its kernel, through the scalar
/// Laplacian:  T(f, b) = (S^+ d0^T W b,  rot1 d0 S^+ star0 f),
/// with S^+ the pseudo-inverse of the stiffness onto mean-free functions.
/// T is symmetric in the product inner product and
///   helicity(a) = <T a, a> = 2 l f^T star0 S^+ d0^T W b.
class CurlInverse {
 public:
  CurlInverse(const BundleSpec& spec, const OperatorSet& ops);
  ~CurlInverse();

  InvariantOneForm apply(const InvariantOneForm& a) const;
  double helicity(const InvariantOneForm& a) const;

  /// Product norm of the part of a in the curl kernel that helicity ignores:
  /// the locally constant part of f plus the closed (exact and harmonic)
  /// Hodge parts of b.
  double kernel_norm(const InvariantOneForm& a) const;

  const BundleSpec& spec() const { return spec_; }
  const OperatorSet& ops() const { return *ops_; }

 private:
  BundleSpec spec_;
  const OperatorSet* ops_;
  std::unique_ptr<HodgeDecomposer> hodge_;
};

struct HelicityResult {
  double helicity = 0.0;
  double kernel_fraction = 0.0;  // discarded kernel norm / |a|
  bool kernel_warning = false;   // kernel_fraction > 1%
};

HelicityResult helicity(const BundleSpec& spec, const OperatorSet& ops, const InvariantOneForm& a);
HelicityResult helicity(const CurlInverse& inverse, const InvariantOneForm& a);

/// Eigenforms of T with the largest |1/mu|, i.e. the principal curl
/// eigenvalues mu > 0 of the helicity-consistent curl:
///   alpha = (f, mu rot1 d0 S^+ star0 f),  T alpha = alpha / mu,
/// where f runs over the top eigenvectors of S^+ K S^+ star0 and
/// K = d0^T W^T star1^{-1} W d0. E(alpha) >= mu_1 |helicity(alpha)| holds
/// for every invariant form, with equality at alpha_1.
struct CurlEigenforms {
  std::vector<double> mu;  // ascending
  std::vector<InvariantOneForm> forms;  // unit product norm
  std::vector<int> cluster;
};

CurlEigenforms principal_curl_eigenforms(const CurlInverse& inverse, int count, std::uint64_t seed);

struct HelicityBoundReport {
  int samples = 0;
  int violations = 0;
  double mu1 = 0.0;
  double min_slack = 0.0;       // min over samples of (E - mu1 |H|)/E
  double alpha1_slack = 0.0;    // at the principal eigenform
  double second_slack = 0.0;    // at the first eigenform outside the mu1 cluster
  double second_mu = 0.0;
  double expected_second_slack = 0.0;  // 1 - mu1/mu2
  double max_kernel_fraction = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> energies;
  std::vector<double> helicities;
  std::vector<double> slacks;
};

/// Draws `samples` random invariant forms T x (x Gaussian), which are
/// orthogonal to the curl kernel, and checks E >= mu1 |H| - 1e-6 E.
/// Throws PropertyViolation on any violation.
HelicityBoundReport helicity_bound_check(const CurlInverse& inverse, int samples, std::uint64_t seed,
                                         const CurlEigenforms& eig);

/// (f, b + fbar * d0 psi), fbar the edge-midpoint average of f: the pullback
/// of f eta + beta under the fibre shear (t, x) -> (t + psi(x), x).
InvariantOneForm fiber_shear_pullback(const InvariantOneForm& a, const Cochain0& psi, const OperatorSet& ops);

struct OrbitPerturbation {
  enum class Kind { FiberShear, HamiltonianFlow };
  Kind kind = Kind::FiberShear;
  Cochain0 field;  // psi for shears, H for flows
  double t = 0.0;
  int steps = 64;
};

struct OrbitSample {
  OrbitPerturbation::Kind kind;
  double energy = 0.0;
  double ratio = 0.0;
  double tau_vol = 0.0;
  bool usable = true;
  double helicity_change = 0.0;  // |H(pullback) - H(a)| / E(a)
  bool violation = false;
};

struct OrbitReport {
  double base_energy = 0.0;
  std::vector<OrbitSample> samples;
  double min_ratio_shear = 1.0;
  double min_ratio_flow = 1.0;
  double max_tau_vol = 0.0;
  double max_helicity_change_shear = 0.0;
  int violations = 0;
  int unusable = 0;
};

/// E(pullback) >= E(a) (1 - tol) for each perturbation with
/// tol = 1e-9 for shears and max(1e-9, 10 tau_vol) for flows. A shear
/// violation throws PropertyViolation; flow violations are counted.
OrbitReport orbit_minimization_test(const InvariantOneForm& alpha, const std::vector<OrbitPerturbation>& family,
                                    const CurlInverse& inverse);

/// Seeded family: shears by random combinations of the given modes, and flows
/// of random combinations with t set to `flow_fraction` of the step limit.
std::vector<OrbitPerturbation> random_orbit_family(const OperatorSet& ops, const std::vector<EigenPair>& modes,
                                                   int shears, int flows, std::uint64_t seed,
                                                   double flow_fraction = 0.2, int steps = 64);

}  // namespace beltrami
