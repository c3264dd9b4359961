#pragma once

#include <string>
#include <vector>

#include "beltrami/dec.hpp"

namespace beltrami {

/// Circle bundle over the surface. Only the product (e = 0) is discretised;
/// the Euler number is carried through to the contact classifier.
struct BundleSpec {
  double fiber_length = 1.0;
  int euler_number = 0;
  int genus = 0;

  static BundleSpec product(double fiber_length, int genus);
};

/// The S^1-invariant 1-form  f*eta + beta  on P, as a vertex cochain f and an
/// edge cochain b on the base.
struct InvariantOneForm {
  Cochain0 f;
  Cochain1 b;

  InvariantOneForm operator+(const InvariantOneForm& o) const { return {{f.values + o.f.values}, {b.values + o.b.values}}; }
  InvariantOneForm operator-(const InvariantOneForm& o) const { return {{f.values - o.f.values}, {b.values - o.b.values}}; }
  InvariantOneForm operator*(double s) const { return {{s * f.values}, {s * b.values}}; }
};

/// Product L2 pairing  l * (f_a^T star0 f_b + b_a^T star1 b_b).
double product_inner(const BundleSpec& spec, const OperatorSet& ops, const InvariantOneForm& a,
                     const InvariantOneForm& b);
double product_norm(const BundleSpec& spec, const OperatorSet& ops, const InvariantOneForm& a);

enum class SpectrumOrigin { Normal, Tangential, Harmonic };
const char* to_string(SpectrumOrigin o);

/// Candidate squared curl eigenvalue on P.
struct ProductEigenvalue {
  double value_sq = 0.0;
  SpectrumOrigin origin = SpectrumOrigin::Normal;
  int n = 0;  // Fourier index along the fibre
  int m = 0;  // surface index (1-based), 0 for harmonic origin
  int multiplicity = 1;
};

/// Candidates  nu_m  (normal),  (2 pi n/l)^2 + nu_m  for n >= 0 (tangential,
/// co-exact beta_m), and  (2 pi n/l)^2  for n >= 1 (harmonic beta, only when
/// genus >= 1), sorted ascending; ties keep the order normal, tangential,
/// harmonic and then increasing (n, m).
std::vector<ProductEigenvalue> assemble_product_spectrum(const BundleSpec& spec, const std::vector<double>& scalar_eigs,
                                                         int n_max);

/// Which candidate realises mu_1^2 = min{nu_1, (2 pi/l)^2}.
enum class Branch { Nu1, Fiber };
const char* to_string(Branch b);
Branch principal_branch(double nu1, double fiber_length);
/// (2 pi / l)^2.
double fiber_eigenvalue(double fiber_length);
/// (2 pi n / l)^2.
double fourier_eigenvalue(int n, double fiber_length);

/// alpha_{+-} = (f, +- rot1 d0 f / sqrt(nu)). Throws InvalidArgument for nu <= 0.
InvariantOneForm chandrasekhar_lift(const OperatorSet& ops, const Cochain0& f, double nu, int sign);

/// Discrete curl on invariant forms:
///   curl(f, b) = (star0^{-1} d0^T wedge b, rot1 d0 f).
/// The first component equals minus the area-weighted face-to-vertex average
/// of d1 b / area; the map is symmetric in the product inner product.
InvariantOneForm invariant_curl(const BundleSpec& spec, const OperatorSet& ops, const InvariantOneForm& a);

/// |curl(a) - mu a| / |a| in the product norm. Throws InvalidArgument for a = 0.
double curl_residual(const BundleSpec& spec, const OperatorSet& ops, const InvariantOneForm& a, double mu);

/// min over vertices of f^2 + |b|^2, with |b|^2 the pointwise squared norm
/// of the Whitney interpolant averaged over the faces around the vertex.
double min_pointwise_norm_sq(const OperatorSet& ops, const InvariantOneForm& a);

}  // namespace beltrami
