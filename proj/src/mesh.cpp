#include "beltrami/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <Eigen/Geometry>

#include "beltrami/error.hpp"

namespace beltrami {

namespace {

std::string edge_name(int a, int b) {
  std::ostringstream os;
  os << "edge (" << a << ", " << b << ")";
  return os.str();
}

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(std::min(a, b)) << 32) | static_cast<std::uint32_t>(std::max(a, b));
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

double triangle_area(double a, double b, double c) {
  // Kahan's ordering a >= b >= c keeps Heron's formula accurate for slivers.
  std::array<double, 3> s{a, b, c};
  std::sort(s.begin(), s.end(), std::greater<>());
  const double x = s[0], y = s[1], z = s[2];
  const double p = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
  return p > 0.0 ? 0.25 * std::sqrt(p) : 0.0;
}

TriangleMesh TriangleMesh::build(std::vector<Eigen::Vector3d> positions, std::vector<Face> faces,
                                 const std::function<double(int, int)>& length_of) {
  using R = MeshRejected::Reason;
  TriangleMesh m;
  const int nv = static_cast<int>(positions.size());
  const int nf = static_cast<int>(faces.size());
  if (nf == 0) throw MeshRejected(R::Parse, "mesh", "no faces");

  for (int f = 0; f < nf; ++f) {
    const auto& t = faces[f];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv) {
        throw MeshRejected(R::Parse, "face " + std::to_string(f), "vertex index out of range");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw MeshRejected(R::Degenerate, "face " + std::to_string(f), "repeated vertex");
    }
  }

  // Undirected edge -> incident (face, local edge) list; also catch repeated
  // directed half-edges, which mean two neighbours disagree on orientation.
  std::unordered_map<std::uint64_t, std::vector<std::pair<int, int>>> incidence;
  incidence.reserve(static_cast<std::size_t>(nf) * 2);
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      const int a = faces[f][k], b = faces[f][(k + 1) % 3];
      incidence[edge_key(a, b)].emplace_back(f, k);
    }
  }

  std::vector<EdgeVerts> edges;
  edges.reserve(incidence.size());
  for (const auto& [key, inc] : incidence) {
    const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    if (inc.size() == 1) throw MeshRejected(R::OpenBoundary, edge_name(a, b), "edge has one incident face");
    if (inc.size() > 2) {
      throw MeshRejected(R::NonManifold, edge_name(a, b),
                         "edge has " + std::to_string(inc.size()) + " incident faces");
    }
    const auto [f0, k0] = inc[0];
    const auto [f1, k1] = inc[1];
    if (faces[f0][k0] == faces[f1][k1]) {
      throw MeshRejected(R::NonOrientable, "face " + std::to_string(std::max(f0, f1)),
                         "traverses " + edge_name(a, b) + " in the same direction as face " +
                             std::to_string(std::min(f0, f1)));
    }
    edges.push_back({a, b});
  }
  std::sort(edges.begin(), edges.end());

  std::unordered_map<std::uint64_t, int> edge_id;
  edge_id.reserve(edges.size() * 2);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) edge_id[edge_key(edges[e][0], edges[e][1])] = e;

  m.face_edges_.resize(nf);
  m.face_edge_signs_.resize(nf);
  m.neighbours_.resize(nf);
  m.edge_faces_.assign(edges.size(), {-1, -1});
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      const int a = faces[f][k], b = faces[f][(k + 1) % 3];
      const int e = edge_id.at(edge_key(a, b));
      m.face_edges_[f][k] = e;
      m.face_edge_signs_[f][k] = a < b ? 1 : -1;
      auto& ef = m.edge_faces_[e];
      (ef[0] < 0 ? ef[0] : ef[1]) = f;
    }
  }
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      const int e = m.face_edges_[f][k];
      const int g = m.edge_faces_[e][0] == f ? m.edge_faces_[e][1] : m.edge_faces_[e][0];
      int kg = -1;
      for (int j = 0; j < 3; ++j) {
        if (m.face_edges_[g][j] == e) kg = j;
      }
      m.neighbours_[f][k] = {g, kg};
    }
  }

  // Every vertex must be used, and its incident faces must form one fan.
  std::vector<std::vector<int>> vertex_faces(nv);
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) vertex_faces[faces[f][k]].push_back(f);
  }
  for (int v = 0; v < nv; ++v) {
    const auto& vf = vertex_faces[v];
    if (vf.empty()) throw MeshRejected(R::NonManifold, "vertex " + std::to_string(v), "isolated vertex");
    // Walk around v through neighbours across the edges incident to v.
    int f = vf.front();
    std::size_t visited = 0;
    do {
      int k = 0;
      while (faces[f][k] != v) ++k;
      // local edge k leaves v; rotate across it.
      f = m.neighbours_[f][k].first;
      ++visited;
    } while (f != vf.front() && visited <= vf.size());
    if (visited != vf.size()) {
      throw MeshRejected(R::NonManifold, "vertex " + std::to_string(v), "link is not a single cycle");
    }
  }

  UnionFind uf(nv);
  for (const auto& e : edges) uf.unite(e[0], e[1]);
  m.vertex_component_.assign(nv, -1);
  std::map<int, int> root_label;
  for (int v = 0; v < nv; ++v) {
    const int r = uf.find(v);
    auto it = root_label.find(r);
    if (it == root_label.end()) it = root_label.emplace(r, static_cast<int>(root_label.size())).first;
    m.vertex_component_[v] = it->second;
  }
  m.num_components_ = static_cast<int>(root_label.size());

  m.base_lengths_.resize(static_cast<Eigen::Index>(edges.size()));
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    const int a = edges[e][0], b = edges[e][1];
    const double l = length_of ? length_of(a, b) : (positions[a] - positions[b]).norm();
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw MeshRejected(R::Degenerate, edge_name(a, b), "non-positive length");
    }
    m.base_lengths_[e] = l;
  }
  m.positions_ = std::move(positions);
  m.faces_ = std::move(faces);
  m.edges_ = std::move(edges);

  const auto bad = degenerate_faces(m, m.base_lengths_);
  if (!bad.empty()) {
    throw MeshRejected(R::Degenerate, "face " + std::to_string(bad.front()),
                       "base lengths violate the triangle inequality");
  }
  return m;
}

int TriangleMesh::find_edge(int a, int b) const {
  const EdgeVerts key{std::min(a, b), std::max(a, b)};
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  return (it != edges_.end() && *it == key) ? static_cast<int>(it - edges_.begin()) : -1;
}

std::vector<int> degenerate_faces(const TriangleMesh& mesh, const Eigen::VectorXd& lengths) {
  std::vector<int> bad;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const double a = lengths[mesh.face_edge(f, 0)];
    const double b = lengths[mesh.face_edge(f, 1)];
    const double c = lengths[mesh.face_edge(f, 2)];
    if (!(a < b + c && b < a + c && c < a + b) || triangle_area(a, b, c) <= 0.0) bad.push_back(f);
  }
  return bad;
}

Eigen::VectorXd effective_edge_lengths(const TriangleMesh& mesh, const ConformalFactor& factor) {
  if (factor.u.size() != mesh.num_vertices()) {
    throw Error(ErrorKind::InvalidArgument, "conformal factor size does not match vertex count");
  }
  const auto& l0 = mesh.base_edge_lengths();
  Eigen::VectorXd l(l0.size());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& ev = mesh.edges()[e];
    l[e] = std::exp(0.5 * (factor.u[ev[0]] + factor.u[ev[1]])) * l0[e];
  }
  if (factor.u.isZero(0.0)) return l0;  // bit-for-bit identity
  const auto bad = degenerate_faces(mesh, l);
  if (!bad.empty()) {
    std::ostringstream os;
    os << bad.size() << " face(s) violate the triangle inequality under the conformal factor, first: ";
    for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 8); ++i) os << (i ? ", " : "") << bad[i];
    throw DegenerateMetric(bad, os.str());
  }
  return l;
}

ConformalFactor ConformalFactor::validated(const TriangleMesh& mesh, Eigen::VectorXd u) {
  ConformalFactor c{std::move(u)};
  (void)effective_edge_lengths(mesh, c);
  return c;
}

SurfaceTopology topology(const TriangleMesh& mesh) {
  SurfaceTopology t;
  t.euler_characteristic = mesh.euler_characteristic();
  t.components = mesh.num_components();
  const int twice_genus = 2 * t.components - t.euler_characteristic;
  if (twice_genus % 2 != 0 || twice_genus < 0) {
    throw Error(ErrorKind::CorruptedMesh,
                "Euler characteristic " + std::to_string(t.euler_characteristic) + " is not that of a closed orientable surface");
  }
  t.genus = twice_genus / 2;
  t.is_sphere = t.components == 1 && t.genus == 0;
  return t;
}

TriangleMesh generate_flat_torus(double side_length, int resolution) {
  if (resolution < 3) throw Error(ErrorKind::InvalidParameter, "torus resolution must be >= 3");
  if (!(side_length > 0.0)) throw Error(ErrorKind::InvalidParameter, "torus side length must be positive");
  const int n = resolution;
  const double h = side_length / n;
  auto id = [n](int i, int j) { return ((i % n + n) % n) * n + ((j % n + n) % n); };

  std::vector<Eigen::Vector3d> pos(static_cast<std::size_t>(n) * n);
  std::vector<Eigen::Vector2d> uv(pos.size());
  const double minor = side_length / (2.0 * std::numbers::pi);
  const double major = 2.0 * minor;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * std::numbers::pi * i / n, ph = 2.0 * std::numbers::pi * j / n;
      pos[id(i, j)] = {(major + minor * std::cos(ph)) * std::cos(th), (major + minor * std::cos(ph)) * std::sin(th),
                       minor * std::sin(ph)};
      uv[id(i, j)] = {i * h, j * h};
    }
  }
  std::vector<TriangleMesh::Face> faces;
  faces.reserve(2 * pos.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      faces.push_back({a, b, c});
      faces.push_back({a, c, d});
    }
  }
  // Flat lengths: axis edges h, diagonals h*sqrt(2). An edge is diagonal when
  // both grid coordinates differ.
  auto length_of = [n, h](int a, int b) {
    const int di = std::abs(a / n - b / n), dj = std::abs(a % n - b % n);
    const bool diag = (di != 0) && (dj != 0);
    return diag ? h * std::numbers::sqrt2 : h;
  };
  auto mesh = TriangleMesh::build(std::move(pos), std::move(faces), length_of);
  mesh.set_uv(std::move(uv));
  std::ostringstream os;
  os.precision(17);
  os << "torus:" << resolution << ":" << side_length;
  mesh.set_source(os.str());
  return mesh;
}

TriangleMesh generate_icosphere(double radius, int subdivisions) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidParameter, "sphere radius must be positive");
  if (subdivisions < 0) throw Error(ErrorKind::InvalidParameter, "subdivisions must be >= 0");
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> pos = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
                                      {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  for (auto& x : pos) x.normalize();
  std::vector<TriangleMesh::Face> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                           {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                           {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                           {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      pos.push_back((pos[a] + pos[b]).normalized());
      const int id = static_cast<int>(pos.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<TriangleMesh::Face> next;
    next.reserve(faces.size() * 4);
    for (const auto& t : faces) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  std::vector<Eigen::Vector3d> unit = pos;
  for (auto& x : pos) x *= radius;
  auto geodesic = [&unit, radius](int a, int b) {
    // atan2 form is accurate for the short arcs of fine subdivisions.
    const double s = unit[a].cross(unit[b]).norm();
    const double c = unit[a].dot(unit[b]);
    return radius * std::atan2(s, c);
  };
  auto mesh = TriangleMesh::build(std::move(pos), std::move(faces), geodesic);
  std::ostringstream os;
  os.precision(17);
  os << "icosphere:" << subdivisions << ":" << radius;
  mesh.set_source(os.str());
  return mesh;
}

TriangleMesh disjoint_union(const TriangleMesh& a, const TriangleMesh& b) {
  const int na = a.num_vertices();
  std::vector<Eigen::Vector3d> pos = a.positions();
  pos.insert(pos.end(), b.positions().begin(), b.positions().end());
  std::vector<TriangleMesh::Face> faces = a.faces();
  for (auto t : b.faces()) faces.push_back({t[0] + na, t[1] + na, t[2] + na});
  auto length_of = [&](int u, int v) {
    if (u < na) return a.base_edge_lengths()[a.find_edge(u, v)];
    return b.base_edge_lengths()[b.find_edge(u - na, v - na)];
  };
  auto mesh = TriangleMesh::build(std::move(pos), std::move(faces), length_of);
  mesh.set_source(a.source() + "+" + b.source());
  return mesh;
}

}  // namespace beltrami
