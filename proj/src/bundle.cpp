#include "beltrami/bundle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "beltrami/error.hpp"

namespace beltrami {

BundleSpec BundleSpec::product(double fiber_length, int genus) {
  if (!(fiber_length > 0.0) || !std::isfinite(fiber_length)) {
    throw Error(ErrorKind::InvalidParameter, "fibre length must be positive");
  }
  return {fiber_length, 0, genus};
}

double product_inner(const BundleSpec& spec, const OperatorSet& ops, const InvariantOneForm& a,
                     const InvariantOneForm& b) {
  return spec.fiber_length * (inner_product(ops, a.f, b.f) + inner_product(ops, a.b, b.b));
}

double product_norm(const BundleSpec& spec, const OperatorSet& ops, const InvariantOneForm& a) {
  return std::sqrt(product_inner(spec, ops, a, a));
}

const char* to_string(SpectrumOrigin o) {
  switch (o) {
    case SpectrumOrigin::Normal: return "normal";
    case SpectrumOrigin::Tangential: return "tangential";
    case SpectrumOrigin::Harmonic: return "harmonic";
  }
  return "unknown";
}

const char* to_string(Branch b) { return b == Branch::Nu1 ? "nu1" : "fiber"; }

double fiber_eigenvalue(double fiber_length) { return fourier_eigenvalue(1, fiber_length); }

double fourier_eigenvalue(int n, double fiber_length) {
  const double k = 2.0 * std::numbers::pi * n / fiber_length;
  return k * k;
}

Branch principal_branch(double nu1, double fiber_length) {
  return nu1 <= fiber_eigenvalue(fiber_length) ? Branch::Nu1 : Branch::Fiber;
}

std::vector<ProductEigenvalue> assemble_product_spectrum(const BundleSpec& spec, const std::vector<double>& scalar_eigs,
                                                         int n_max) {
  if (scalar_eigs.empty()) throw Error(ErrorKind::InvalidArgument, "empty scalar spectrum");
  if (n_max < 1) throw Error(ErrorKind::InvalidParameter, "n_max must be at least 1");
  if (!(spec.fiber_length > 0.0)) throw Error(ErrorKind::InvalidParameter, "fibre length must be positive");
  std::vector<ProductEigenvalue> out;
  const int k = static_cast<int>(scalar_eigs.size());
  for (int m = 1; m <= k; ++m) out.push_back({scalar_eigs[m - 1], SpectrumOrigin::Normal, 0, m, 1});
  for (int n = 0; n <= n_max; ++n) {
    const double q = fourier_eigenvalue(n, spec.fiber_length);
    for (int m = 1; m <= k; ++m) {
      out.push_back({q + scalar_eigs[m - 1], SpectrumOrigin::Tangential, n, m, n == 0 ? 1 : 2});
    }
  }
  if (spec.genus >= 1) {
    for (int n = 1; n <= n_max; ++n) {
      out.push_back({fourier_eigenvalue(n, spec.fiber_length), SpectrumOrigin::Harmonic, n, 0, 4 * spec.genus});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ProductEigenvalue& a, const ProductEigenvalue& b) { return a.value_sq < b.value_sq; });
  return out;
}

InvariantOneForm chandrasekhar_lift(const OperatorSet& ops, const Cochain0& f, double nu, int sign) {
  if (!(nu > 0.0)) throw Error(ErrorKind::InvalidArgument, "eigenvalue must be positive");
  if (sign != 1 && sign != -1) throw Error(ErrorKind::InvalidArgument, "sign must be +1 or -1");
  const Cochain1 star_df = rotated_differential(ops, f);
  return {f, {(sign / std::sqrt(nu)) * star_df.values}};
}

InvariantOneForm invariant_curl(const BundleSpec& /*spec*/, const OperatorSet& ops, const InvariantOneForm& a) {
  InvariantOneForm out;
  out.f.values = (ops.d0().transpose() * (ops.wedge() * a.b.values)).cwiseQuotient(ops.star0());
  out.b.values = ops.rot1(ops.d0() * a.f.values);
  return out;
}

double curl_residual(const BundleSpec& spec, const OperatorSet& ops, const InvariantOneForm& a, double mu) {
  const double n = product_norm(spec, ops, a);
  if (!(n > 0.0)) throw Error(ErrorKind::InvalidArgument, "curl residual of the zero form");
  return product_norm(spec, ops, invariant_curl(spec, ops, a) - a * mu) / n;
}

double min_pointwise_norm_sq(const OperatorSet& ops, const InvariantOneForm& a) {
  const auto& mesh = ops.mesh();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(mesh.num_vertices());
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(mesh.num_vertices());
  const auto& len = ops.edge_lengths();
  for (int t = 0; t < mesh.num_faces(); ++t) {
    const double area = ops.face_areas()[t];
    std::array<double, 3> lo{};
    for (int i = 0; i < 3; ++i) lo[i] = len[mesh.face_edge(t, (i + 1) % 3)];
    auto grad = [&](int i, int j) {
      if (i == j) return lo[i] * lo[i] / (4 * area * area);
      const int k = 3 - i - j;
      return (lo[k] * lo[k] - lo[i] * lo[i] - lo[j] * lo[j]) / (8 * area * area);
    };
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      // value of b along i->j and i->k; local edge i is i->j, local edge k is k->i
      const double cij = mesh.face_edge_sign(t, i) * a.b.values[mesh.face_edge(t, i)];
      const double cik = -mesh.face_edge_sign(t, k) * a.b.values[mesh.face_edge(t, k)];
      const double b2 = cij * cij * grad(j, j) + 2 * cij * cik * grad(j, k) + cik * cik * grad(k, k);
      const int v = mesh.faces()[t][i];
      acc[v] += area * b2;
      weight[v] += area;
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    best = std::min(best, a.f.values[v] * a.f.values[v] + acc[v] / weight[v]);
  }
  return best;
}

}  // namespace beltrami
