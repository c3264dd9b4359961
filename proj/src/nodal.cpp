#include "beltrami/nodal.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>

#include "beltrami/error.hpp"

namespace beltrami {

namespace {

bool crosses(const TriangleMesh& mesh, const Eigen::VectorXd& f, int e) {
  const auto& ev = mesh.edges()[e];
  return nodal_sign(f[ev[0]]) != nodal_sign(f[ev[1]]);
}

// The other sign-changing edge of face `face` (exactly two exist).
int other_crossing(const TriangleMesh& mesh, const Eigen::VectorXd& f, int face, int edge) {
  for (int k = 0; k < 3; ++k) {
    const int e = mesh.face_edge(face, k);
    if (e != edge && crosses(mesh, f, e)) return e;
  }
  throw Error(ErrorKind::InternalConsistency, "mixed face " + std::to_string(face) + " has a single crossing");
}

}  // namespace

std::vector<NodalCurve> extract_nodal_set(const TriangleMesh& mesh, const Cochain0& f) {
  const Eigen::VectorXd& v = f.values;
  if (v.size() != mesh.num_vertices()) throw Error(ErrorKind::InvalidArgument, "function size differs from V");
  const double sup = v.cwiseAbs().maxCoeff();
  int near_zero = 0;
  for (int i = 0; i < v.size(); ++i) near_zero += std::abs(v[i]) <= 1e-12 * sup;
  if (near_zero > 0.01 * mesh.num_vertices()) {
    throw Error(ErrorKind::DegenerateNodalSet,
                std::to_string(near_zero) + " of " + std::to_string(mesh.num_vertices()) + " vertices are zero");
  }

  std::vector<char> visited(mesh.num_edges(), 0);
  std::vector<NodalCurve> curves;
  for (int start = 0; start < mesh.num_edges(); ++start) {
    if (visited[start] || !crosses(mesh, v, start)) continue;
    NodalCurve curve;
    curve.component_id = static_cast<int>(curves.size());
    int edge = start;
    int face = mesh.edge_faces(start)[0];
    while (true) {
      visited[edge] = 1;
      const auto& ev = mesh.edges()[edge];
      const double f0 = v[ev[0]], f1 = v[ev[1]];
      curve.points.push_back({edge, f0 / (f0 - f1)});
      curve.faces.push_back(face);
      const int next = other_crossing(mesh, v, face, edge);
      if (next == start) break;
      if (visited[next]) throw Error(ErrorKind::InternalConsistency, "nodal curve revisits an edge");
      const auto& nf = mesh.edge_faces(next);
      face = nf[0] == face ? nf[1] : nf[0];
      edge = next;
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

NodalDomainSet nodal_domains(const TriangleMesh& mesh, const Cochain0& f, const std::vector<NodalCurve>& curves) {
  const Eigen::VectorXd& v = f.values;
  const int nv = mesh.num_vertices();
  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : mesh.edges()) {
    if (nodal_sign(v[e[0]]) != nodal_sign(v[e[1]])) continue;
    const int a = find(e[0]), b = find(e[1]);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  NodalDomainSet out;
  out.curve_components = static_cast<int>(curves.size());
  out.vertex_region.assign(nv, -1);
  std::vector<int> label(nv, -1);
  for (int i = 0; i < nv; ++i) {
    const int r = find(i);
    if (label[r] < 0) {
      label[r] = static_cast<int>(out.regions.size());
      RegionTopology reg;
      reg.region_id = label[r];
      reg.sign = nodal_sign(v[i]);
      out.regions.push_back(reg);
    }
    out.vertex_region[i] = label[r];
    auto& reg = out.regions[label[r]];
    ++reg.vertex_count;
    ++reg.euler_characteristic;
  }
  // The closed region {sign*f >= 0} retracts onto the full subcomplex on its vertices.
  for (const auto& e : mesh.edges()) {
    if (out.vertex_region[e[0]] == out.vertex_region[e[1]]) --out.regions[out.vertex_region[e[0]]].euler_characteristic;
  }
  for (const auto& t : mesh.faces()) {
    const int r = out.vertex_region[t[0]];
    if (out.vertex_region[t[1]] == r && out.vertex_region[t[2]] == r) ++out.regions[r].euler_characteristic;
  }
  for (const auto& c : curves) {
    int plus = -1, minus = -1;
    for (const auto& p : c.points) {
      const auto& ev = mesh.edges()[p.edge];
      for (int k = 0; k < 2; ++k) {
        const int r = out.vertex_region[ev[k]];
        int& slot = nodal_sign(v[ev[k]]) > 0 ? plus : minus;
        if (slot < 0) slot = r;
        if (slot != r) {
          throw Error(ErrorKind::InternalConsistency,
                      "nodal curve " + std::to_string(c.component_id) + " touches two regions of one sign");
        }
      }
    }
    for (int r : {plus, minus}) {
      out.regions[r].boundary_curves.push_back(c.component_id);
      ++out.regions[r].boundary_loop_count;
    }
  }
  int chi_sum = 0;
  for (auto& r : out.regions) {
    r.is_disc = r.euler_characteristic == 1 && r.boundary_loop_count == 1;
    chi_sum += r.euler_characteristic;
  }
  if (chi_sum != mesh.euler_characteristic()) {
    throw Error(ErrorKind::InternalConsistency, "region Euler characteristics sum to " + std::to_string(chi_sum) +
                                                    ", surface has " + std::to_string(mesh.euler_characteristic()));
  }
  if (curves.empty() ? out.regions.size() != static_cast<std::size_t>(mesh.num_components())
                     : out.regions.size() < 2) {
    throw Error(ErrorKind::InternalConsistency, "region count inconsistent with the nodal curves");
  }
  return out;
}

bool courant_check(const NodalDomainSet& domains) { return domains.regions.size() == 2; }

Eigen::Vector3d nodal_point_position(const TriangleMesh& mesh, const NodalPoint& p) {
  const auto& ev = mesh.edges()[p.edge];
  return (1.0 - p.t) * mesh.positions()[ev[0]] + p.t * mesh.positions()[ev[1]];
}

void write_nodal_obj(std::ostream& out, const TriangleMesh& mesh, const std::vector<NodalCurve>& curves) {
  out << std::setprecision(17);
  out << "# nodal curves: " << curves.size() << '\n';
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      const Eigen::Vector3d x = nodal_point_position(mesh, p);
      out << "v " << x.x() << ' ' << x.y() << ' ' << x.z() << '\n';
    }
  }
  std::size_t base = 1;
  for (const auto& c : curves) {
    out << 'l';
    for (std::size_t i = 0; i < c.points.size(); ++i) out << ' ' << base + i;
    out << ' ' << base << '\n';
    base += c.points.size();
  }
}

}  // namespace beltrami
