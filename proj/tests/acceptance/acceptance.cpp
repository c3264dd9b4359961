// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "beltrami/contact.hpp"
#include "beltrami/energy.hpp"
#include "beltrami/error.hpp"
#include "beltrami/mesh_io.hpp"
#include "beltrami/metric_search.hpp"
#include "beltrami/nodal.hpp"
#include "beltrami/random.hpp"
#include "beltrami/spectral.hpp"

using namespace beltrami;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Spectrum {
  std::vector<EigenPair> pairs;
  double seconds = 0.0;
};

Spectrum torus_spectrum(int n, int count = 6) {
  const auto t0 = std::chrono::steady_clock::now();
  const TriangleMesh m = generate_flat_torus(2.0 * kPi, n);
  const OperatorSet ops = OperatorSet::assemble(m, ConformalFactor::zero(m));
  SpectrumRequest req;
  req.count = count;
  Spectrum s{solve_scalar_spectrum(ops, req), 0.0};
  s.seconds = seconds_since(t0);
  return s;
}

// ---------------------------------------------------------------- C1
Outcome c1() {
  const Spectrum torus = torus_spectrum(64);
  const auto t0 = std::chrono::steady_clock::now();
  const TriangleMesh s = generate_icosphere(1.0, 4);
  const OperatorSet sops = OperatorSet::assemble(s, ConformalFactor::zero(s));
  SpectrumRequest req;
  req.count = 6;
  const auto sphere = solve_scalar_spectrum(sops, req);
  const double sphere_seconds = seconds_since(t0);

  const double et = std::abs(torus.pairs[0].eigenvalue - 1.0);
  const double es = std::abs(sphere[0].eigenvalue - 2.0) / 2.0;
  const int ct = cluster_size(torus.pairs, 0), cs = cluster_size(sphere, 0);
  const bool pass = et <= 0.02 && es <= 0.02 && ct == 4 && cs == 3 && torus.seconds < 60 && sphere_seconds < 60;
  return {pass, fmt("torus nu1=%.6f cluster=%d (%.1fs); sphere nu1=%.6f cluster=%d (%.1fs)", torus.pairs[0].eigenvalue,
                    ct, torus.seconds, sphere[0].eigenvalue, cs, sphere_seconds)};
}

// ---------------------------------------------------------------- C2
// Every basis function of the invariant ansatz, listed one at a time:
// normal f_m eta (n = 0), tangential cos/sin(2 pi n s/l) * beta_m (a single
// function at n = 0) and harmonic cos/sin * h_j for j < 2g, n >= 1.
struct Candidate {
  double value;
  int origin;  // 0 normal, 1 tangential, 2 harmonic
  int n;
  int m;
  auto key() const { return std::tie(value, origin, n, m); }
};

std::vector<Candidate> brute_force(const std::vector<double>& nu, double l, int genus, int n_max) {
  std::vector<Candidate> out;
  auto fourier = [&](int n) {
    const double w = 2.0 * kPi * n / l;
    return w * w;
  };
  for (int m = 1; m <= static_cast<int>(nu.size()); ++m) out.push_back({nu[m - 1], 0, 0, m});
  for (int n = 0; n <= n_max; ++n) {
    for (int m = 1; m <= static_cast<int>(nu.size()); ++m) {
      for (int phase = 0; phase < (n == 0 ? 1 : 2); ++phase) out.push_back({fourier(n) + nu[m - 1], 1, n, m});
    }
  }
  for (int n = 1; n <= n_max; ++n) {
    for (int j = 0; j < 2 * genus; ++j) {
      for (int phase = 0; phase < 2; ++phase) out.push_back({fourier(n), 2, n, 0});
    }
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.key() < b.key(); });
  return out;
}

Outcome c2() {
  std::vector<double> torus_nu, sphere_nu;
  for (const auto& p : torus_spectrum(32).pairs) torus_nu.push_back(p.eigenvalue);
  const TriangleMesh s = generate_icosphere(1.0, 3);
  const OperatorSet sops = OperatorSet::assemble(s, ConformalFactor::zero(s));
  SpectrumRequest req;
  req.count = 6;
  for (const auto& p : solve_scalar_spectrum(sops, req)) sphere_nu.push_back(p.eigenvalue);

  int cases = 0, mismatches = 0;
  for (const double l : {kPi / 2.0, 2.0 * kPi, 8.0 * kPi}) {
    for (const auto& [genus, nu] : {std::pair{1, torus_nu}, std::pair{0, sphere_nu}}) {
      ++cases;
      const BundleSpec spec = BundleSpec::product(l, genus);
      const auto got = assemble_product_spectrum(spec, nu, 3);
      std::vector<Candidate> expanded;
      for (const auto& g : got) {
        for (int k = 0; k < g.multiplicity; ++k) expanded.push_back({g.value_sq, static_cast<int>(g.origin), g.n, g.m});
      }
      const auto want = brute_force(nu, l, genus, 3);
      bool same = expanded.size() == want.size();
      for (std::size_t i = 0; same && i < want.size(); ++i) same = expanded[i].key() == want[i].key();
      const double w1 = 2.0 * kPi / l;
      // without harmonic 1-forms (genus 0) the fibre value is not a candidate
      const double mu1_sq = genus >= 1 ? std::min(nu[0], w1 * w1) : nu[0];
      same = same && got.front().value_sq == mu1_sq && want.front().value == mu1_sq;
      same = same && principal_branch(nu[0], l) == (nu[0] <= w1 * w1 ? Branch::Nu1 : Branch::Fiber);
      if (!same) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%d (surface, l) cases, %d mismatches against the enumeration", cases, mismatches)};
}

// ---------------------------------------------------------------- C3
Outcome c3() {
  const BundleSpec spec = BundleSpec::product(1.0, 1);
  double res[2][2];
  for (int i = 0; i < 2; ++i) {
    const int n = i == 0 ? 32 : 64;
    const TriangleMesh m = generate_flat_torus(2.0 * kPi, n);
    const OperatorSet ops = OperatorSet::assemble(m, ConformalFactor::zero(m));
    SpectrumRequest req;
    req.count = 4;
    const auto pairs = solve_scalar_spectrum(ops, req);
    const double nu = pairs[0].eigenvalue;
    for (int s = 0; s < 2; ++s) {
      const int sign = s == 0 ? 1 : -1;
      res[i][s] = curl_residual(spec, ops, chandrasekhar_lift(ops, {pairs[0].vector}, nu, sign), sign * std::sqrt(nu));
    }
  }
  const double rp = res[0][0] / res[1][0], rm = res[0][1] / res[1][1];
  const bool pass = res[1][0] <= 0.05 && res[1][1] <= 0.05 && rp >= 1.7 && rm >= 1.7;
  return {pass, fmt("residual(+) %.5f -> %.5f (x%.2f), residual(-) %.5f -> %.5f (x%.2f)", res[0][0], res[1][0], rp,
                    res[0][1], res[1][1], rm)};
}

// ---------------------------------------------------------------- C7 (run first; C4/C5 use its certificate)
struct SweepRun {
  std::vector<CertificateReport> reports;
  double seconds = 0.0;
  std::optional<CertificateReport> best;
};

SweepRun run_sweep() {
  const auto t0 = std::chrono::steady_clock::now();
  const TriangleMesh m = generate_flat_torus(2.0 * kPi, 48);
  SweepConfig cfg;
  cfg.fiber_length = 1.0;
  cfg.seed = kSeed;
  const BumpFamily family{0, {0.0, 1.0, 2.0, 3.0}, {0.5, 0.8, 1.2}};
  SweepRun run;
  run.reports = sweep(m, family, cfg);
  run.seconds = seconds_since(t0);
  for (const auto& r : run.reports) {
    if (r.complete) {
      run.best = r;
      break;
    }
  }
  return run;
}

Outcome c4(const SweepRun& run) {
  // flat torus at the certification resolution plus the certified bump metric
  const TriangleMesh m = generate_flat_torus(2.0 * kPi, 48);
  const OperatorSet ops = OperatorSet::assemble(m, ConformalFactor::zero(m));
  const CurlInverse inverse(BundleSpec::product(1.0, 1), ops);
  const CurlEigenforms eig = principal_curl_eigenforms(inverse, 6, split_seed(kSeed, stream::kEigensolver, 0));
  const HelicityBoundReport flat = helicity_bound_check(inverse, 100, split_seed(kSeed, stream::kHelicitySamples, 0), eig);
  const bool flat_ok = flat.samples == 100 && flat.violations == 0 && std::abs(flat.alpha1_slack) <= 1e-6;
  if (!run.best) return {false, "no complete certificate to test"};
  const HelicitySummary& h = run.best->helicity;
  const bool cert_ok = h.ran && h.samples == 100 && h.violations == 0 && std::abs(h.alpha1_slack) <= 1e-6;
  return {flat_ok && cert_ok,
          fmt("flat: %d samples, %d violations, alpha1 slack %.1e; certificate (A=%g, sigma=%g): %d samples, %d "
              "violations, alpha1 slack %.1e, min slack %.3f",
              flat.samples, flat.violations, flat.alpha1_slack, run.best->params.amplitude, run.best->params.sigma,
              h.samples, h.violations, h.alpha1_slack, h.min_slack)};
}

Outcome c5(const SweepRun& run) {
  if (!run.best) return {false, "no complete certificate to test"};
  const OrbitSummary& o = run.best->orbit;
  const bool pass = o.ran && o.shears == 100 && o.flows == 20 && o.min_ratio_shear >= 1.0 - 1e-9 &&
                    o.usable_flows >= 1 && o.max_tau_vol <= 1e-3 && o.min_ratio_flow >= 1.0 - 1e-2;
  return {pass, fmt("%d shears min ratio %.12f; %d flows (%d usable, max tau_vol %.1e) min ratio %.6f", o.shears,
                    o.min_ratio_shear, o.flows, o.usable_flows, o.max_tau_vol, o.min_ratio_flow)};
}

Outcome c7(const SweepRun& run) {
  int complete = 0, zero_points = 0, zero_tight = 0;
  for (const auto& r : run.reports) {
    complete += r.complete;
    if (r.params.amplitude == 0.0) {
      ++zero_points;
      zero_tight += !r.skipped && r.verdict.classification == Classification::UniversallyTight;
    }
  }
  bool best_ok = false;
  if (run.best) {
    const auto& b = *run.best;
    best_ok = b.branch == Branch::Nu1 && b.nodal_components == 1 && b.disc_witness.has_value() &&
              b.verdict.classification == Classification::Overtwisted && b.curl_residual_plus <= 0.05 &&
              b.curl_residual_minus <= 0.05;
  }
  const bool pass = complete >= 1 && best_ok && zero_points == 3 && zero_tight == 3 && run.seconds < 600;
  return {pass, fmt("%zu grid points, %d complete certificates, A=0 tight at %d/%d widths, %.1fs", run.reports.size(),
                    complete, zero_tight, zero_points, run.seconds)};
}

// ---------------------------------------------------------------- C6
Outcome c6() {
  const auto trials = s2_audit_trials(3, 20, kSeed, 1.0);
  int ok = 0, overtwisted = 0;
  for (const auto& t : trials) {
    const auto& r = t.report;
    const bool tight = r.verdict && r.verdict->classification == Classification::UniversallyTight;
    overtwisted += r.verdict && r.verdict->classification == Classification::Overtwisted;
    ok += r.branch == Branch::Nu1 && r.domains.regions.size() == 2 && r.domains.curve_components == 1 && tight;
  }
  return {trials.size() == 20 && ok == 20 && overtwisted == 0,
          fmt("%d/%zu metrics with 2 domains, one circle and a tight verdict; %d overtwisted", ok, trials.size(),
              overtwisted)};
}

// ---------------------------------------------------------------- C8
struct TruthCase {
  std::string name;
  const TriangleMesh* mesh;
  std::function<double(int)> f;
  int e;
  Classification expected;
  int expected_curves;
};

Outcome c8() {
  const TriangleMesh sphere = generate_icosphere(1.0, 3);
  const TriangleMesh torus = generate_flat_torus(2.0 * kPi, 32);
  const TriangleMesh genus2 = load_mesh(std::string(BELTRAMI_FIXTURES) + "/genus2.obj");
  const auto pos = [](const TriangleMesh& m) { return [&m](int v) { return m.positions()[v]; }; };
  const auto sp = pos(sphere);
  const auto positive = [&](int v) { return 2.0 + sp(v).z(); };
  const auto equator = [&](int v) { return sp(v).z() + 0.013; };
  const auto two_circles = [&](int v) { return sp(v).z() * sp(v).z() - 1.0 / 3.0 + 0.007; };
  const auto disc = [&](int v) { return std::cos(torus.uv()[v].x() + 0.1) + std::cos(torus.uv()[v].y() + 0.2) - 1.5; };
  const auto meridians = [&](int v) { return std::cos(torus.uv()[v].x() + 0.1); };
  const auto separating = [&](int v) { return genus2.positions()[v].x() - 3.0; };

  using C = Classification;
  const C T = C::UniversallyTight, O = C::Overtwisted;
  // Expected verdicts written out by hand from Giroux's criterion:
  //   sphere, e < 0: tight iff Gamma is empty
  //   sphere, e >= 0: tight iff Gamma is a single circle
  //   genus >= 1: tight iff no component of the complement of Gamma is a disc
  const std::vector<TruthCase> cases = {
      {"S2 e=-1 empty", &sphere, positive, -1, T, 0},     {"S2 e=0 empty", &sphere, positive, 0, O, 0},
      {"S2 e=1 empty", &sphere, positive, 1, O, 0},       {"S2 e=-1 one circle", &sphere, equator, -1, O, 1},
      {"S2 e=0 one circle", &sphere, equator, 0, T, 1},   {"S2 e=1 one circle", &sphere, equator, 1, T, 1},
      {"S2 e=-1 two circles", &sphere, two_circles, -1, O, 2}, {"S2 e=0 two circles", &sphere, two_circles, 0, O, 2},
      {"S2 e=1 two circles", &sphere, two_circles, 1, O, 2},
      {"T2 e=1 contractible circle", &torus, disc, 1, O, 1},
      {"T2 e=-1 two essential circles", &torus, meridians, -1, T, 2},
      {"genus2 e=-1 separating circle", &genus2, separating, -1, T, 1},
  };
  int matched = 0;
  std::string failures;
  for (const auto& c : cases) {
    Cochain0 f{Eigen::VectorXd(c.mesh->num_vertices())};
    for (int v = 0; v < c.mesh->num_vertices(); ++v) f.values[v] = c.f(v);
    ClassificationInput in;
    in.topology = topology(*c.mesh);
    in.euler_number = c.e;
    in.regions = nodal_domains(*c.mesh, f, extract_nodal_set(*c.mesh, f));
    const Verdict v = giroux_classify(in);
    bool ok = v.classification == c.expected && in.regions.curve_components == c.expected_curves;
    if (v.witness_region) {
      const auto& r = in.regions.regions.at(*v.witness_region);
      ok = ok && r.euler_characteristic == 1 && r.boundary_loop_count == 1;
    }
    if (ok) {
      ++matched;
    } else {
      failures += " [" + c.name + "]";
    }
  }
  return {matched == static_cast<int>(cases.size()),
          fmt("%d/%zu fixtures match%s", matched, cases.size(), failures.c_str())};
}

Outcome guarded(const std::function<Outcome()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  const char* names[] = {"analytic spectra",      "product spectrum enumeration", "eigenform residual",
                         "helicity bound",        "orbit minimality",             "S2xS1 audit",
                         "sweep certificate",     "classifier truth table"};
  SweepRun run;
  Outcome sweep_failure;
  try {
    run = run_sweep();
  } catch (const std::exception& e) {
    sweep_failure = {false, std::string("sweep failed: ") + e.what()};
  }
  const bool sweep_ran = sweep_failure.detail.empty();
  const std::function<Outcome()> checks[] = {
      c1, c2, c3,
      [&] { return sweep_ran ? c4(run) : sweep_failure; },
      [&] { return sweep_ran ? c5(run) : sweep_failure; },
      c6,
      [&] { return sweep_ran ? c7(run) : sweep_failure; },
      c8,
  };
  int failed = 0;
  for (int i = 0; i < 8; ++i) {
    const Outcome o = guarded(checks[i]);
    failed += !o.pass;
    std::printf("%s C%d %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, names[i], o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
