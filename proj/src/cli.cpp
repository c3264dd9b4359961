#include "beltrami/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "beltrami/error.hpp"
#include "beltrami/mesh_io.hpp"
#include "beltrami/random.hpp"
#include "beltrami/report.hpp"

namespace beltrami {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidParameter, "cannot parse " + what + " from '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& what) {
  const double v = parse_double(s, what);
  if (v != std::floor(v)) throw Error(ErrorKind::InvalidParameter, what + " must be an integer");
  return static_cast<int>(v);
}

std::vector<double> parse_grid(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& p : split(s, ',')) {
    if (!p.empty()) out.push_back(parse_double(p, what));
  }
  if (out.empty()) throw Error(ErrorKind::InvalidParameter, what + " is empty");
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  f << content;
  if (!f) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

void write_json(const std::filesystem::path& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

// Canonical "command;name=value;..." over the resolved options, excluding
// output location and config file, so equal runs hash equally.
std::string canonical_config(const CLI::App* sub) {
  std::map<std::string, std::string> kv;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name.empty() || name == "--help" || name == "--out" || name == "--config") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += r + ",";
    } else {
      value = opt->get_default_str();
    }
    kv[name] = value;
  }
  std::string s = sub->get_name();
  for (const auto& [k, v] : kv) s += ";" + k + "=" + v;
  return s;
}

struct Common {
  std::string mesh;
  std::string metric = "flat";
  std::string out = ".";
  std::uint64_t seed = 0;
};

std::string csv_header(const std::string& hash, std::uint64_t seed) {
  return "# config_hash=" + hash + " seed=" + std::to_string(seed) + "\n";
}

}  // namespace

TriangleMesh mesh_from_spec(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (!parts.empty() && parts[0] == "torus") {
    if (parts.size() < 2 || parts.size() > 3) throw Error(ErrorKind::InvalidParameter, "expected torus:n[:L]");
    const double L = parts.size() == 3 ? parse_double(parts[2], "torus side") : 2.0 * std::numbers::pi;
    TriangleMesh m = generate_flat_torus(L, parse_int(parts[1], "torus resolution"));
    m.set_source(spec);
    return m;
  }
  if (!parts.empty() && parts[0] == "icosphere") {
    if (parts.size() < 2 || parts.size() > 3) throw Error(ErrorKind::InvalidParameter, "expected icosphere:s[:R]");
    const double R = parts.size() == 3 ? parse_double(parts[2], "sphere radius") : 1.0;
    TriangleMesh m = generate_icosphere(R, parse_int(parts[1], "subdivisions"));
    m.set_source(spec);
    return m;
  }
  return load_mesh(spec);
}

ConformalFactor metric_from_spec(const TriangleMesh& mesh, const std::string& spec) {
  if (spec.empty() || spec == "flat") return ConformalFactor::zero(mesh);
  const auto parts = split(spec, ':');
  if (parts[0] == "bump") {
    if (parts.size() < 3 || parts.size() > 4) throw Error(ErrorKind::InvalidParameter, "expected bump:A:sigma[:center]");
    BumpParams p{parse_double(parts[1], "bump amplitude"), parse_double(parts[2], "bump width"),
                 parts.size() == 4 ? parse_int(parts[3], "bump centre") : 0};
    BumpResult r = bump_factor(mesh, p);
    if (!r.factor) throw Error(ErrorKind::DegenerateMetric, r.skip_reason);
    return *r.factor;
  }
  std::ifstream in(spec);
  if (!in) throw Error(ErrorKind::Io, "cannot open metric file '" + spec + "'");
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    values.push_back(parse_double(line, "conformal factor value"));
  }
  if (static_cast<int>(values.size()) != mesh.num_vertices()) {
    throw Error(ErrorKind::InvalidArgument, "metric file has " + std::to_string(values.size()) + " values for " +
                                                std::to_string(mesh.num_vertices()) + " vertices");
  }
  return ConformalFactor::validated(mesh, Eigen::Map<Eigen::VectorXd>(values.data(), values.size()));
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curl eigenfields on circle bundles over surfaces: spectra, nodal topology, contact classification"};
  app.set_config("--config", "", "TOML-style key = value file; keys are the long option names");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);

  Common c;
  int k = 6, eig_index = 0, euler = 0, center = 0, bisect = 0, shears = 100, flows = 20, samples = 100;
  int subdiv = 3, trials = 20;
  double tol = 1e-9, fiber_length = 1.0, amplitude = 0.5, curl_tol = 0.05;
  std::string a_grid, sigma_grid, certificate;

  auto add_out = [&](CLI::App* s) { s->add_option("--out", c.out, "output directory")->capture_default_str(); };

  CLI::App* spectrum = app.add_subcommand("spectrum", "lowest scalar Laplacian eigenpairs");
  spectrum->add_option("--mesh", c.mesh, "torus:n[:L], icosphere:s[:R] or OBJ path")->required();
  spectrum->add_option("--metric", c.metric, "flat, bump:A:sigma[:center] or u file")->capture_default_str();
  spectrum->add_option("--k", k, "number of nonzero eigenpairs")->capture_default_str()->check(CLI::PositiveNumber);
  spectrum->add_option("--tol", tol, "relative residual tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  spectrum->add_option("--seed", c.seed, "eigensolver seed")->capture_default_str();
  add_out(spectrum);

  CLI::App* nodal = app.add_subcommand("nodal", "nodal set and domains of one eigenfunction");
  nodal->add_option("--mesh", c.mesh)->required();
  nodal->add_option("--metric", c.metric)->capture_default_str();
  nodal->add_option("--eig-index", eig_index, "0-based index among nonzero eigenpairs")->capture_default_str();
  nodal->add_option("--seed", c.seed)->capture_default_str();
  add_out(nodal);

  CLI::App* classify = app.add_subcommand("classify", "tight/overtwisted verdict of the principal eigenform");
  classify->add_option("--mesh", c.mesh)->required();
  classify->add_option("--metric", c.metric)->capture_default_str();
  classify->add_option("--fiber-length", fiber_length)->capture_default_str()->check(CLI::PositiveNumber);
  classify->add_option("--euler-number", euler, "Euler number of the bundle")->capture_default_str();
  classify->add_option("--eig-index", eig_index)->capture_default_str();
  classify->add_option("--seed", c.seed)->capture_default_str();
  add_out(classify);

  CLI::App* sweep_cmd = app.add_subcommand("certify-sweep", "bump-metric sweep for overtwisted minimizers");
  sweep_cmd->add_option("--mesh", c.mesh)->required();
  sweep_cmd->add_option("--a-grid", a_grid, "comma-separated amplitudes")->required();
  sweep_cmd->add_option("--sigma-grid", sigma_grid, "comma-separated widths")->required();
  sweep_cmd->add_option("--fiber-length", fiber_length)->capture_default_str()->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", c.seed)->required();
  sweep_cmd->add_option("--center", center, "bump centre vertex")->capture_default_str();
  sweep_cmd->add_option("--bisect", bisect, "bisection steps per transition")->capture_default_str();
  sweep_cmd->add_option("--shears", shears)->capture_default_str();
  sweep_cmd->add_option("--flows", flows)->capture_default_str();
  sweep_cmd->add_option("--samples", samples, "helicity bound samples")->capture_default_str();
  sweep_cmd->add_option("--curl-tol", curl_tol)->capture_default_str()->check(CLI::PositiveNumber);
  add_out(sweep_cmd);

  CLI::App* orbit = app.add_subcommand("orbit-test", "energy along the orbit of a certificate's eigenform");
  orbit->add_option("--certificate", certificate, "certificate JSON from certify-sweep")->required();
  orbit->add_option("--samples", samples, "fibre shears")->capture_default_str();
  orbit->add_option("--flows", flows)->capture_default_str();
  orbit->add_option("--seed", c.seed)->required();
  add_out(orbit);

  CLI::App* audit = app.add_subcommand("audit-s2", "random conformal metrics on S^2 x S^1");
  audit->add_option("--subdiv", subdiv)->capture_default_str();
  audit->add_option("--trials", trials)->capture_default_str()->check(CLI::PositiveNumber);
  audit->add_option("--seed", c.seed)->required();
  audit->add_option("--fiber-length", fiber_length)->capture_default_str()->check(CLI::PositiveNumber);
  audit->add_option("--amplitude", amplitude, "max |u|")->capture_default_str();
  add_out(audit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const std::string hash = config_hash(canonical_config(sub));
    const auto dir = prepare_dir(c.out);
    auto envelope = [&](const std::string& kind, Json result) {
      return artifact_envelope(kind, hash, c.seed, std::move(result));
    };

    if (sub == spectrum || sub == nodal || sub == classify) {
      const TriangleMesh mesh = mesh_from_spec(c.mesh);
      const SurfaceTopology topo = topology(mesh);
      const OperatorSet ops = OperatorSet::assemble(mesh, metric_from_spec(mesh, c.metric));
      SpectrumRequest req;
      req.count = sub == spectrum ? k : std::max(6, eig_index + 1);
      req.tolerance = tol;
      req.seed = split_seed(c.seed, stream::kEigensolver, 0);
      const auto pairs = solve_scalar_spectrum(ops, req);
      if (sub == spectrum) {
        std::ostringstream csv;
        csv << csv_header(hash, c.seed);
        write_spectrum_csv(csv, pairs);
        write_file(dir / "spectrum.csv", csv.str());
        const auto harmonic = harmonic_basis(one_form_laplacian(ops), ops, topo.genus, pairs.front().eigenvalue,
                                             split_seed(c.seed, stream::kHarmonic, 0));
        write_json(dir / "spectrum.json",
                   envelope("spectrum", {{"mesh", c.mesh},
                                         {"genus", topo.genus},
                                         {"nu1", pairs.front().eigenvalue},
                                         {"nu1_cluster_size", cluster_size(pairs, 0)},
                                         {"harmonic_dimension", harmonic.size()},
                                         {"eigenpairs", to_json(pairs)}}));
        out << "nu1 = " << pairs.front().eigenvalue << " (cluster of " << cluster_size(pairs, 0) << ")\n";
        return 0;
      }
      if (eig_index < 0 || eig_index >= static_cast<int>(pairs.size())) {
        throw Error(ErrorKind::InvalidParameter, "eig-index out of range");
      }
      const Cochain0 f{pairs[eig_index].vector};
      const auto curves = extract_nodal_set(mesh, f);
      const NodalDomainSet domains = nodal_domains(mesh, f, curves);
      std::ostringstream curves_obj, f_obj;
      write_nodal_obj(curves_obj, mesh, curves);
      write_scalar_obj(f_obj, mesh, f.values);
      write_file(dir / "nodal_curves.obj", "# config_hash=" + hash + "\n" + curves_obj.str());
      write_file(dir / "eigenfunction.obj", "# config_hash=" + hash + "\n" + f_obj.str());
      if (sub == nodal) {
        write_json(dir / "nodal.json", envelope("nodal", {{"mesh", c.mesh},
                                                          {"eig_index", eig_index},
                                                          {"eigenvalue", pairs[eig_index].eigenvalue},
                                                          {"courant", courant_check(domains)},
                                                          {"domains", to_json(domains)}}));
        out << domains.regions.size() << " nodal domains, " << domains.curve_components << " nodal curves\n";
        return 0;
      }
      BundleSpec spec = BundleSpec::product(fiber_length, topo.genus);
      spec.euler_number = euler;
      const double nu = pairs[eig_index].eigenvalue;
      const Branch branch = principal_branch(pairs.front().eigenvalue, fiber_length);
      const Verdict v = giroux_classify({topo, euler, domains});
      write_json(dir / "classification.json",
                 envelope("classification", {{"mesh", c.mesh},
                                             {"eig_index", eig_index},
                                             {"nu1", pairs.front().eigenvalue},
                                             {"fiber_eigenvalue", fiber_eigenvalue(fiber_length)},
                                             {"branch", to_string(branch)},
                                             {"euler_number", euler},
                                             {"curl_residual_plus",
                                              curl_residual(spec, ops, chandrasekhar_lift(ops, f, nu, 1), std::sqrt(nu))},
                                             {"verdict", to_json(v)},
                                             {"domains", to_json(domains)}}));
      out << to_string(v.classification) << " (rule " << to_string(v.rule_fired) << ", branch " << to_string(branch)
          << ")\n";
      return 0;
    }

    if (sub == sweep_cmd) {
      const TriangleMesh mesh = mesh_from_spec(c.mesh);
      BumpFamily family{center, parse_grid(a_grid, "a-grid"), parse_grid(sigma_grid, "sigma-grid")};
      SweepConfig cfg;
      cfg.fiber_length = fiber_length;
      cfg.seed = c.seed;
      cfg.spectrum.seed = split_seed(c.seed, stream::kEigensolver, 0);
      cfg.bisection_steps = bisect;
      cfg.shears = shears;
      cfg.flows = flows;
      cfg.helicity_samples = samples;
      cfg.curl_tolerance = curl_tol;
      const auto reports = sweep(mesh, family, cfg);
      std::ostringstream csv;
      csv << csv_header(hash, c.seed);
      write_sweep_csv(csv, reports);
      write_file(dir / "sweep.csv", csv.str());
      const auto points = prepare_dir((dir / "points").string());
      Json all = Json::array();
      for (std::size_t i = 0; i < reports.size(); ++i) {
        Json r = to_json(reports[i]);
        r["mesh"] = c.mesh;
        std::ostringstream name;
        name << "point_" << std::setw(3) << std::setfill('0') << i << ".json";
        write_json(points / name.str(), envelope("certificate", r));
        all.push_back(std::move(r));
        err << "A=" << reports[i].params.amplitude << " sigma=" << reports[i].params.sigma << ": "
            << (reports[i].skipped ? "skipped (" + reports[i].skip_reason + ")"
                                   : std::string(to_string(reports[i].verdict.classification)))
            << (reports[i].complete ? ", complete certificate" : "") << " [" << reports[i].seconds << " s]\n";
      }
      const int complete = static_cast<int>(std::count_if(reports.begin(), reports.end(),
                                                          [](const CertificateReport& r) { return r.complete; }));
      write_json(dir / "sweep.json", envelope("sweep", {{"mesh", c.mesh},
                                                        {"complete_certificates", complete},
                                                        {"answer_question_1", complete > 0 ? "no" : "undecided"},
                                                        {"points", all}}));
      const auto best = std::find_if(reports.begin(), reports.end(), [](const auto& r) { return !r.skipped; });
      if (best != reports.end()) {
        Json r = to_json(*best);
        r["mesh"] = c.mesh;
        write_json(dir / "certificate.json", envelope("certificate", r));
        std::ostringstream f_obj, curves_obj;
        write_scalar_obj(f_obj, mesh, best->f1);
        write_nodal_obj(curves_obj, mesh, extract_nodal_set(mesh, {best->f1}));
        write_file(dir / "best_f1.obj", "# config_hash=" + hash + "\n" + f_obj.str());
        write_file(dir / "best_nodal.obj", "# config_hash=" + hash + "\n" + curves_obj.str());
      }
      out << complete << " complete certificate(s) out of " << reports.size() << " points\n";
      for (const auto& r : reports) {
        const bool failed = (r.orbit.ran && !r.orbit.passed) || (r.helicity.ran && !r.helicity.passed);
        if (failed && r.verdict.classification == Classification::Overtwisted && r.branch == Branch::Nu1) {
          err << "property check failed at A=" << r.params.amplitude << " sigma=" << r.params.sigma << ": "
              << r.orbit.failure << r.helicity.failure << '\n';
          return 2;
        }
      }
      return 0;
    }

    if (sub == orbit) {
      std::ifstream in(certificate);
      if (!in) throw Error(ErrorKind::Io, "cannot open certificate '" + certificate + "'");
      Json j;
      try {
        j = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("certificate is not JSON: ") + e.what());
      }
      const CertificateReport cert = certificate_from_json(j);
      const Json& res = j.contains("result") ? j.at("result") : j;
      if (!res.contains("mesh")) throw Error(ErrorKind::InvalidArgument, "certificate has no mesh source");
      const std::string mesh_spec = res.at("mesh").get<std::string>();
      const TriangleMesh mesh = mesh_from_spec(mesh_spec);
      const BumpResult bump = bump_factor(mesh, cert.params);
      if (!bump.factor) throw Error(ErrorKind::DegenerateMetric, bump.skip_reason);
      const OperatorSet ops = OperatorSet::assemble(mesh, *bump.factor);
      const BundleSpec spec = BundleSpec::product(cert.fiber_length, topology(mesh).genus);
      SpectrumRequest req;
      req.seed = split_seed(c.seed, stream::kEigensolver, 0);
      const auto pairs = solve_scalar_spectrum(ops, req);
      const int m = std::clamp(cert.selected_member, 0, static_cast<int>(pairs.size()) - 1);
      const InvariantOneForm alpha = chandrasekhar_lift(ops, {pairs[m].vector}, pairs[m].eigenvalue, 1);
      const CurlInverse inverse(spec, ops);
      const auto family = random_orbit_family(ops, pairs, samples, flows, c.seed);
      const OrbitReport rep = orbit_minimization_test(alpha, family, inverse);
      double min_usable = 1.0;
      int usable = 0;
      for (const auto& s : rep.samples) {
        if (s.kind == OrbitPerturbation::Kind::HamiltonianFlow && s.usable) {
          ++usable;
          min_usable = std::min(min_usable, s.ratio);
        }
      }
      const bool passed = rep.min_ratio_shear >= 1.0 - 1e-9 && min_usable >= 1.0 - 1e-2 && (flows == 0 || usable > 0);
      Json r = to_json(rep);
      r["mesh"] = mesh_spec;
      r["usable_flows"] = usable;
      r["min_ratio_usable_flow"] = min_usable;
      r["passed"] = passed;
      write_json(dir / "orbit.json", envelope("orbit_test", r));
      out << "shear min ratio " << rep.min_ratio_shear << ", usable flow min ratio " << min_usable << " (" << usable
          << " usable)\n";
      return passed ? 0 : 2;
    }

    if (sub == audit) {
      Json trials_json = Json::array();
      int overtwisted = 0;
      std::vector<S2Trial> result;
      try {
        result = s2_audit_trials(subdiv, trials, c.seed, fiber_length, amplitude);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::PropositionViolation) throw;
        ++overtwisted;
        err << e.what() << '\n';
      }
      for (const auto& t : result) {
        Json tj = to_json(t.report);
        tj["trial"] = t.index;
        tj["max_abs_u"] = t.max_abs_u;
        trials_json.push_back(std::move(tj));
      }
      write_json(dir / "audit.json", envelope("s2_audit", {{"subdivisions", subdiv},
                                                           {"trials", trials},
                                                           {"fiber_length", fiber_length},
                                                           {"amplitude", amplitude},
                                                           {"overtwisted", overtwisted},
                                                           {"results", trials_json}}));
      out << result.size() << " trials, " << overtwisted << " overtwisted\n";
      return overtwisted > 0 ? 2 : 0;
    }
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_property_violation() ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace beltrami
