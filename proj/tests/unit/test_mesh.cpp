#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "beltrami/error.hpp"
#include "beltrami/mesh_io.hpp"
#include "beltrami/metric_search.hpp"

using namespace beltrami;

namespace {
const std::string fixtures = BELTRAMI_FIXTURES;

MeshRejected::Reason rejection(const std::string& path) {
  try {
    load_mesh(path);
  } catch (const MeshRejected& e) {
    return e.reason();
  }
  FAIL("mesh was accepted: " << path);
  return MeshRejected::Reason::Parse;
}
}  // namespace

TEST_CASE("generated meshes have the expected topology") {
  const TriangleMesh torus = generate_flat_torus(2.0 * std::numbers::pi, 8);
  CHECK(topology(torus).genus == 1);
  CHECK(torus.euler_characteristic() == 0);
  const TriangleMesh sphere = generate_icosphere(1.0, 2);
  CHECK(topology(sphere).genus == 0);
  CHECK(topology(sphere).is_sphere);
  CHECK(sphere.num_vertices() == 162);
  for (int e = 0; e < torus.num_edges(); ++e) {
    CHECK(torus.edge_faces(e)[0] >= 0);
    CHECK(torus.edge_faces(e)[1] >= 0);
  }
}

TEST_CASE("refining the torus keeps chi and genus") {
  for (int n : {3, 5, 16, 33}) {
    const TriangleMesh m = generate_flat_torus(1.0, n);
    CHECK(m.euler_characteristic() == 0);
    CHECK(topology(m).genus == 1);
  }
}

TEST_CASE("icosphere edge lengths are geodesic") {
  const TriangleMesh s = generate_icosphere(2.0, 1);
  for (int e = 0; e < s.num_edges(); ++e) {
    const auto& ev = s.edges()[e];
    const double chord = (s.positions()[ev[0]] - s.positions()[ev[1]]).norm();
    CHECK(s.base_edge_lengths()[e] == doctest::Approx(4.0 * std::asin(chord / 4.0)).epsilon(1e-12));
  }
}

TEST_CASE("fixtures: genus 2 loads, open and flipped meshes are rejected") {
  CHECK(topology(load_mesh(fixtures + "/genus2.obj")).genus == 2);
  CHECK(rejection(fixtures + "/boundary.obj") == MeshRejected::Reason::OpenBoundary);
  CHECK(rejection(fixtures + "/flipped.obj") == MeshRejected::Reason::NonOrientable);
  CHECK_THROWS_AS(load_mesh(fixtures + "/does_not_exist.obj"), Error);
}

TEST_CASE("OBJ round trip") {
  const TriangleMesh m = generate_icosphere(1.0, 1);
  std::stringstream ss;
  write_obj(ss, m);
  const TriangleMesh r = read_obj(ss);
  CHECK(r.num_vertices() == m.num_vertices());
  CHECK(r.num_faces() == m.num_faces());
  CHECK(topology(r).genus == 0);
}

TEST_CASE("effective edge lengths") {
  const TriangleMesh m = generate_flat_torus(2.0 * std::numbers::pi, 12);
  const Eigen::VectorXd same = effective_edge_lengths(m, ConformalFactor::zero(m));
  for (int e = 0; e < m.num_edges(); ++e) CHECK(same[e] == m.base_edge_lengths()[e]);

  const double c = 0.3;
  const ConformalFactor scale{Eigen::VectorXd::Constant(m.num_vertices(), c)};
  const Eigen::VectorXd scaled = effective_edge_lengths(m, scale);
  for (int e = 0; e < m.num_edges(); ++e) CHECK(scaled[e] == doctest::Approx(std::exp(c) * m.base_edge_lengths()[e]));
}

TEST_CASE("a sharp tall bump breaks the triangle inequality") {
  const TriangleMesh fine = generate_flat_torus(2.0 * std::numbers::pi, 96);
  Eigen::VectorXd u(fine.num_vertices());
  const auto dist = graph_distances(fine, 0);
  for (int v = 0; v < fine.num_vertices(); ++v) u[v] = 50.0 * std::exp(-std::pow(dist[v] / 0.05, 2));
  try {
    ConformalFactor::validated(fine, u);
    FAIL("degenerate metric accepted");
  } catch (const DegenerateMetric& e) {
    CHECK(!e.faces().empty());
  }
}
