#pragma once

#include <ostream>
#include <vector>

#include "beltrami/dec.hpp"

namespace beltrami {

/// Zero crossing on an edge: the point (1-t)*p(v0) + t*p(v1) for the stored
/// edge orientation v0 < v1.
struct NodalPoint {
  int edge = -1;
  double t = 0.0;
};

/// One connected component of the zero set, as a closed polyline.
struct NodalCurve {
  std::vector<NodalPoint> points;
  std::vector<int> faces;  // faces crossed, faces[i] joins points[i] and points[i+1]
  int component_id = 0;
  bool is_closed = true;
};

struct RegionTopology {
  int region_id = 0;
  int sign = 1;
  int vertex_count = 0;
  int euler_characteristic = 0;
  int boundary_loop_count = 0;
  std::vector<int> boundary_curves;
  bool is_disc = false;
};

struct NodalDomainSet {
  std::vector<RegionTopology> regions;
  int curve_components = 0;
  std::vector<int> vertex_region;  // region id per vertex
};

/// Sign used for nodal combinatorics: +1 for f > 0 and for exact zeros
/// (zero is read as +epsilon), -1 otherwise.
inline int nodal_sign(double value) { return value < 0.0 ? -1 : 1; }

/// Zero set of the piecewise-linear interpolant of f. Throws
/// DegenerateNodalSet when more than 1% of the vertices satisfy
/// |f| <= 1e-12 * max|f|.
std::vector<NodalCurve> extract_nodal_set(const TriangleMesh& mesh, const Cochain0& f);

/// Sign-connected components of the vertices with their Euler
/// characteristics and adjacent nodal curves. Checks that the region
/// characteristics add up to that of the surface.
NodalDomainSet nodal_domains(const TriangleMesh& mesh, const Cochain0& f, const std::vector<NodalCurve>& curves);

/// True iff there are exactly two nodal domains.
bool courant_check(const NodalDomainSet& domains);

/// 3D position of a nodal point in the mesh embedding.
Eigen::Vector3d nodal_point_position(const TriangleMesh& mesh, const NodalPoint& p);

/// OBJ polylines: one "v" per point and one closed "l" record per curve.
void write_nodal_obj(std::ostream& out, const TriangleMesh& mesh, const std::vector<NodalCurve>& curves);

}  // namespace beltrami
