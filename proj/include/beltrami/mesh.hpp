#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace beltrami {

/// Closed, oriented triangulated surface with an intrinsic base metric.
///
/// The metric lives entirely in `base_edge_lengths()`; vertex positions are an
/// embedding used for I/O and visualisation only. Edges are stored with the
/// lexicographic orientation (smaller vertex index first) and sorted, so all
/// incidence matrices are deterministic for a given triangle list.
///
/// Local edge k of face t is the directed edge t[k] -> t[(k+1)%3]; it is
/// opposite local vertex (k+2)%3.
class TriangleMesh {
 public:
  using Face = std::array<int, 3>;
  using EdgeVerts = std::array<int, 2>;

  TriangleMesh() = default;

  /// Validates connectivity (closed, manifold, consistently oriented) and
  /// the lengths (positive, strict triangle inequality per face). Throws
  /// MeshRejected naming the first offending simplex.
  ///
  /// `length_of(v0, v1)` supplies the base length of the edge v0 < v1; when
  /// empty, Euclidean distances between positions are used.
  static TriangleMesh build(std::vector<Eigen::Vector3d> positions, std::vector<Face> faces,
                            const std::function<double(int, int)>& length_of = {});

  int num_vertices() const { return static_cast<int>(positions_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int euler_characteristic() const { return num_vertices() - num_edges() + num_faces(); }
  int num_components() const { return num_components_; }

  const std::vector<Eigen::Vector3d>& positions() const { return positions_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<EdgeVerts>& edges() const { return edges_; }
  const Eigen::VectorXd& base_edge_lengths() const { return base_lengths_; }

  /// Global edge id of local edge k of face f, and +1/-1 depending on whether
  /// the face traverses it along or against its stored orientation.
  int face_edge(int f, int k) const { return face_edges_[f][k]; }
  int face_edge_sign(int f, int k) const { return face_edge_signs_[f][k]; }
  /// The (up to) two faces incident to edge e; for a closed mesh both are set.
  const std::array<int, 2>& edge_faces(int e) const { return edge_faces_[e]; }
  /// Face across local edge k of face f and the local edge index there.
  std::pair<int, int> neighbour(int f, int k) const { return neighbours_[f][k]; }
  /// Component label per vertex, 0 .. num_components()-1.
  const std::vector<int>& vertex_component() const { return vertex_component_; }

  /// Edge id for an unordered vertex pair, or -1.
  int find_edge(int a, int b) const;

  /// Optional flat parameter coordinates (set by the flat-torus generator).
  const std::vector<Eigen::Vector2d>& uv() const { return uv_; }
  void set_uv(std::vector<Eigen::Vector2d> uv) { uv_ = std::move(uv); }

  /// Free-form description of how the mesh was made ("torus:64:6.28", a path...).
  const std::string& source() const { return source_; }
  void set_source(std::string s) { source_ = std::move(s); }

 private:
  std::vector<Eigen::Vector3d> positions_;
  std::vector<Face> faces_;
  std::vector<EdgeVerts> edges_;
  std::vector<std::array<int, 3>> face_edges_;
  std::vector<std::array<int, 3>> face_edge_signs_;
  std::vector<std::array<int, 2>> edge_faces_;
  std::vector<std::array<std::pair<int, int>, 3>> neighbours_;
  std::vector<int> vertex_component_;
  Eigen::VectorXd base_lengths_;
  std::vector<Eigen::Vector2d> uv_;
  std::string source_;
  int num_components_ = 0;
};

/// Per-vertex log conformal scale u; lengths become exp((u_i+u_j)/2) * l0_ij.
struct ConformalFactor {
  Eigen::VectorXd u;

  static ConformalFactor zero(const TriangleMesh& mesh) {
    return {Eigen::VectorXd::Zero(mesh.num_vertices())};
  }
  /// Checks the size and the triangle inequalities; throws DegenerateMetric.
  static ConformalFactor validated(const TriangleMesh& mesh, Eigen::VectorXd u);
};

struct SurfaceTopology {
  int genus = 0;
  int euler_characteristic = 0;
  int components = 1;
  bool is_sphere = false;
};

/// n x n grid on the square flat torus [0,L)^2, each cell split along the
/// (i,j)-(i+1,j+1) diagonal. Vertex (i,j) has id i*n + j and uv (iL/n, jL/n).
TriangleMesh generate_flat_torus(double side_length, int resolution);

/// Subdivided icosahedron on the sphere of the given radius with geodesic
/// (great-circle) base lengths.
TriangleMesh generate_icosphere(double radius, int subdivisions);

/// Vertex-disjoint union; used to exercise multi-component diagnostics.
TriangleMesh disjoint_union(const TriangleMesh& a, const TriangleMesh& b);

/// genus = (2*components - chi)/2. Throws CorruptedMesh when that is not an integer.
SurfaceTopology topology(const TriangleMesh& mesh);

/// l_ij = exp((u_i+u_j)/2) * l0_ij. Throws DegenerateMetric listing every face
/// whose scaled lengths fail the strict triangle inequality.
Eigen::VectorXd effective_edge_lengths(const TriangleMesh& mesh, const ConformalFactor& u);

/// Faces whose three lengths fail the strict triangle inequality.
std::vector<int> degenerate_faces(const TriangleMesh& mesh, const Eigen::VectorXd& lengths);

/// Unsigned area of a triangle from its edge lengths (Heron, stable form).
double triangle_area(double a, double b, double c);

}  // namespace beltrami
