#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "beltrami/cli.hpp"
#include "beltrami/report.hpp"

using namespace beltrami;

namespace {
int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "beltrami");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("beltrami_unit_" + name);
  std::filesystem::remove_all(p);
  return p;
}
}  // namespace

TEST_CASE("FNV-1a reference values") {
  CHECK(config_hash("") == "cbf29ce484222325");
  CHECK(config_hash("a") == "af63dc4c8601ec8c");
  CHECK(config_hash("foobar") == "85944171f73967e8");
}

TEST_CASE("mesh and metric specs") {
  CHECK(topology(mesh_from_spec("torus:8")).genus == 1);
  CHECK(mesh_from_spec("torus:8:3").base_edge_lengths().maxCoeff() < 1.0);
  CHECK(topology(mesh_from_spec("icosphere:1")).is_sphere);
  CHECK_THROWS(mesh_from_spec("torus"));
  CHECK_THROWS(mesh_from_spec("/no/such/file.obj"));
  const TriangleMesh m = mesh_from_spec("torus:12");
  CHECK(metric_from_spec(m, "flat").u.norm() == 0.0);
  CHECK(metric_from_spec(m, "bump:1:0.8:5").u[5] == doctest::Approx(1.0));
  CHECK_THROWS(metric_from_spec(m, "bump:1"));
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  CHECK(cli({"spectrum", "--mesh", "missing.obj", "--out", dir.string()}) == 1);
  CHECK(cli({"spectrum"}) == 1);
  CHECK(cli({"frobnicate"}) == 1);
  CHECK(cli({"certify-sweep", "--mesh", "torus:8", "--a-grid", "0", "--sigma-grid", "1"}) == 1);  // no seed
  CHECK(cli({"--help"}) == 0);
  std::string text;
  CHECK(cli({"spectrum", "--mesh", "torus:16", "--k", "4", "--out", dir.string()}, &text) == 0);
  CHECK(text.find("cluster of 4") != std::string::npos);
}

TEST_CASE("config file keys, unknown keys and hash stability") {
  const auto dir = scratch("config");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "good.toml") << "[spectrum]\nmesh = \"torus:12\"\nk = 3\n";
  std::ofstream(dir / "bad.toml") << "[spectrum]\nmesh = \"torus:12\"\nnot_a_key = 3\n";
  CHECK(cli({"--config", (dir / "good.toml").string(), "spectrum", "--out", (dir / "a").string()}) == 0);
  CHECK(cli({"spectrum", "--mesh", "torus:12", "--k", "3", "--out", (dir / "b").string()}) == 0);
  CHECK(slurp(dir / "a" / "spectrum.json") == slurp(dir / "b" / "spectrum.json"));
  CHECK(cli({"--config", (dir / "bad.toml").string(), "spectrum", "--out", (dir / "c").string()}) == 1);
  CHECK(cli({"spectrum", "--mesh", "torus:12", "--k", "4", "--out", (dir / "d").string()}) == 0);
  CHECK(slurp(dir / "a" / "spectrum.json") != slurp(dir / "d" / "spectrum.json"));
}

TEST_CASE("sweep artifacts and certificate round trip") {
  const auto dir = scratch("sweep");
  REQUIRE(cli({"certify-sweep", "--mesh", "torus:16", "--a-grid", "0,1", "--sigma-grid", "0.8", "--seed", "2",
               "--shears", "5", "--flows", "2", "--samples", "5", "--out", dir.string()}) == 0);
  for (const char* f : {"sweep.csv", "sweep.json", "certificate.json", "best_f1.obj", "best_nodal.obj"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  const std::string csv = slurp(dir / "sweep.csv");
  CHECK(csv.rfind("# config_hash=", 0) == 0);
  CHECK(csv.find("0,0.80000000000000004,") != std::string::npos);
  const Json cert = Json::parse(slurp(dir / "certificate.json"));
  CHECK(cert["artifact"] == "certificate");
  const CertificateReport r = certificate_from_json(cert);
  CHECK(r.complete);
  CHECK(r.params.amplitude == 1.0);
  CHECK(cli({"orbit-test", "--certificate", (dir / "certificate.json").string(), "--samples", "5", "--flows", "2",
             "--seed", "1", "--out", (dir / "orbit").string()}) == 0);
  CHECK_THROWS(certificate_from_json(Json::parse("{\"result\": {}}")));
}

TEST_CASE("audit-s2 exits 0 when every trial is tight") {
  const auto dir = scratch("audit");
  CHECK(cli({"audit-s2", "--subdiv", "2", "--trials", "3", "--seed", "4", "--out", dir.string()}) == 0);
  const Json j = Json::parse(slurp(dir / "audit.json"));
  CHECK(j["result"]["overtwisted"] == 0);
  CHECK(j["result"]["results"].size() == 3);
}
