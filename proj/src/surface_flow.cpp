#include "beltrami/surface_flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include <Eigen/SparseCholesky>

#include "beltrami/error.hpp"

namespace beltrami {

namespace {

constexpr double kVertexSnap = 1e-8;
constexpr int kMaxCrossings = 100000;
constexpr int kMaxBisections = 16;

int local_index(const TriangleMesh::Face& f, int v) {
  for (int k = 0; k < 3; ++k) {
    if (f[k] == v) return k;
  }
  return -1;
}

// Barycentric coordinates of the same point in another face that contains
// every vertex where it is nonzero.
Eigen::Vector3d transfer(const TriangleMesh& mesh, int from, const Eigen::Vector3d& bary, int to) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (int k = 0; k < 3; ++k) {
    if (bary[k] == 0.0) continue;
    const int j = local_index(mesh.faces()[to], mesh.faces()[from][k]);
    if (j < 0) throw Error(ErrorKind::InternalConsistency, "point transfer between non-incident faces");
    out[j] = bary[k];
  }
  return out;
}

void normalise(Eigen::Vector3d& b) {
  for (int k = 0; k < 3; ++k) b[k] = std::max(b[k], 0.0);
  b /= b.sum();
}

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

// Vertex positions of face t in a planar chart: x0 = 0, x1 on the x axis.
std::array<Eigen::Vector2d, 3> layout(const OperatorSet& ops, int t) {
  const auto& mesh = ops.mesh();
  const double l0 = ops.edge_lengths()[mesh.face_edge(t, 0)];
  const double l1 = ops.edge_lengths()[mesh.face_edge(t, 1)];
  const double l2 = ops.edge_lengths()[mesh.face_edge(t, 2)];
  const double x = (l2 * l2 - l1 * l1 + l0 * l0) / (2.0 * l0);
  const double y = std::sqrt(std::max(l2 * l2 - x * x, 0.0));
  return {Eigen::Vector2d(0, 0), Eigen::Vector2d(l0, 0), Eigen::Vector2d(x, y)};
}

// Apex at distances da from A and db from B, on the right of A -> B.
Eigen::Vector2d apex_right(const Eigen::Vector2d& A, const Eigen::Vector2d& B, double da, double db) {
  const Eigen::Vector2d u = B - A;
  const double L = u.norm();
  const Eigen::Vector2d e = u / L, n(e.y(), -e.x());
  const double x = (da * da - db * db + L * L) / (2.0 * L);
  const double y = std::sqrt(std::max(da * da - x * x, 0.0));
  return A + x * e + y * n;
}

}  // namespace

HamiltonianFlow::HamiltonianFlow(const OperatorSet& ops, const Cochain0& H) : ops_(&ops) {
  const auto& mesh = ops.mesh();
  if (H.values.size() != mesh.num_vertices()) throw Error(ErrorKind::InvalidArgument, "H size differs from V");
  velocity_.resize(mesh.num_faces());
  vertex_faces_.assign(mesh.num_vertices(), {});
  for (int t = 0; t < mesh.num_faces(); ++t) {
    const auto& f = mesh.faces()[t];
    for (int k = 0; k < 3; ++k) vertex_faces_[f[k]].push_back(t);
    const double area = ops.face_areas()[t];
    Eigen::Vector3d v;
    for (int i = 0; i < 3; ++i) v[i] = (H.values[f[(i + 1) % 3]] - H.values[f[(i + 2) % 3]]) / (2.0 * area);
    velocity_[t] = v;
    max_speed_ = std::max(max_speed_, segment_length(t, Eigen::Vector3d::Zero(), v));
  }
}

double HamiltonianFlow::segment_length(int face, const Eigen::Vector3d& p, const Eigen::Vector3d& q) const {
  const auto& mesh = ops_->mesh();
  const auto& len = ops_->edge_lengths();
  const double l0 = len[mesh.face_edge(face, 0)], l1 = len[mesh.face_edge(face, 1)], l2 = len[mesh.face_edge(face, 2)];
  const Eigen::Vector3d u = q - p;
  const double s2 = -(l0 * l0 * u[0] * u[1] + l1 * l1 * u[1] * u[2] + l2 * l2 * u[2] * u[0]);
  return std::sqrt(std::max(s2, 0.0));
}

double HamiltonianFlow::integrate_in_face(const Cochain1& b, int face, const Eigen::Vector3d& p,
                                          const Eigen::Vector3d& q) const {
  const auto& mesh = ops_->mesh();
  const Eigen::Vector3d m = 0.5 * (p + q), d = q - p;
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int i = k, j = (k + 1) % 3;
    sum += mesh.face_edge_sign(face, k) * b.values[mesh.face_edge(face, k)] * (m[i] * d[j] - m[j] * d[i]);
  }
  return sum;
}

SurfacePoint HamiltonianFlow::leave_vertex(int vtx, bool& stationary) const {
  const auto& mesh = ops_->mesh();
  SurfacePoint best;
  best.face = -1;
  double best_score = -1.0;
  for (int t : vertex_faces_[vtx]) {
    const int i = local_index(mesh.faces()[t], vtx);
    const Eigen::Vector3d& v = velocity_[t];
    const double score = std::min(v[(i + 1) % 3], v[(i + 2) % 3]);
    if (score >= 0.0 && score > best_score) {
      best_score = score;
      best.face = t;
    }
  }
  stationary = best.face < 0;
  if (stationary) best.face = vertex_faces_[vtx].front();
  best.bary = Eigen::Vector3d::Zero();
  best.bary[local_index(mesh.faces()[best.face], vtx)] = 1.0;
  return best;
}

SurfacePoint HamiltonianFlow::at_vertex(int v) const {
  bool stationary = false;
  return leave_vertex(v, stationary);
}

SurfacePoint HamiltonianFlow::on_edge(int e, double s) const {
  const auto& mesh = ops_->mesh();
  const auto& ev = mesh.edges()[e];
  SurfacePoint out;
  for (int side = 0; side < 2; ++side) {
    const int t = mesh.edge_faces(e)[side];
    const auto& f = mesh.faces()[t];
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    b[local_index(f, ev[0])] = 1.0 - s;
    b[local_index(f, ev[1])] = s;
    int opposite = 0;
    while (f[opposite] == ev[0] || f[opposite] == ev[1]) ++opposite;
    out = {t, b};
    if (velocity_[t][opposite] >= 0.0) return out;
  }
  return out;
}

SurfacePoint HamiltonianFlow::trace(SurfacePoint p, double t) const {
  const auto& mesh = ops_->mesh();
  double remaining = t;
  int entered = -1;  // coordinate of the vertex opposite the edge just crossed
  for (int crossings = 0; remaining > 0.0; ++crossings) {
    if (crossings > kMaxCrossings) throw Error(ErrorKind::StepSize, "trajectory crosses too many faces");
    Eigen::Vector3d v = velocity_[p.face];
    if (entered >= 0 && v[entered] < 0.0) {
      // The normal velocity across an edge is continuous, so a field pointing
      // back out through the entry edge is rounding: slide along it instead.
      v[(entered + 1) % 3] += 0.5 * v[entered];
      v[(entered + 2) % 3] += 0.5 * v[entered];
      v[entered] = 0.0;
    }
    entered = -1;
    double tau = std::numeric_limits<double>::infinity();
    int k = -1;
    for (int i = 0; i < 3; ++i) {
      if (v[i] < 0.0 && p.bary[i] / -v[i] < tau) {
        tau = p.bary[i] / -v[i];
        k = i;
      }
    }
    if (tau >= remaining) {
      p.bary += remaining * v;
      normalise(p.bary);
      break;
    }
    p.bary += tau * v;
    p.bary[k] = 0.0;
    normalise(p.bary);
    remaining -= tau;
    int corner = -1;
    for (int i = 0; i < 3; ++i) {
      if (p.bary[i] >= 1.0 - kVertexSnap) corner = i;
    }
    if (corner >= 0) {
      bool stationary = false;
      p = leave_vertex(mesh.faces()[p.face][corner], stationary);
      if (stationary) break;
      continue;
    }
    const auto [next, nk] = mesh.neighbour(p.face, (k + 1) % 3);
    p.bary = transfer(mesh, p.face, p.bary, next);
    p.face = next;
    entered = (nk + 2) % 3;
  }
  return p;
}

namespace {

struct Sample {
  double s;
  SurfacePoint p;
};

struct Piece {
  int face;
  Eigen::Vector3d p, q;
};

using Chart = std::array<Eigen::Vector2d, 3>;

// Chart of the neighbour across local edge k of face F, continuing chart X.
Chart unfold_across(const OperatorSet& ops, int F, const Chart& X, int k, int& G) {
  const auto& mesh = ops.mesh();
  const auto [g, nk] = mesh.neighbour(F, k);
  G = g;
  const double ac = ops.edge_lengths()[mesh.face_edge(g, (nk + 1) % 3)];
  const double bc = ops.edge_lengths()[mesh.face_edge(g, (nk + 2) % 3)];
  Chart Y;
  Y[nk] = X[(k + 1) % 3];
  Y[(nk + 1) % 3] = X[k];
  Y[(nk + 2) % 3] = apex_right(X[k], X[(k + 1) % 3], ac, bc);
  return Y;
}

// Integral of b along the image path between traced samples, recorded as
// straight pieces inside single faces.
class EdgeImage {
 public:
  EdgeImage(const HamiltonianFlow& flow, const Cochain1& b, int edge, double t)
      : flow_(flow), b_(b), edge_(edge), t_(t) {}

  void add(const Sample& a, const Sample& c, int depth) {
    const auto& mesh = flow_.ops().mesh();
    if (a.p.face == c.p.face) {
      piece(a.p.face, a.p.bary, c.p.bary);
      return;
    }
    for (int k = 0; k < 3; ++k) {
      if (mesh.neighbour(a.p.face, k).first == c.p.face) {
        split_across(a.p, c.p, k);
        return;
      }
    }
    if (depth < kMaxBisections) {
      const double s = 0.5 * (a.s + c.s);
      const Sample mid{s, flow_.trace(flow_.on_edge(edge_, s), t_)};
      add(a, mid, depth + 1);
      add(mid, c, depth + 1);
      return;
    }
    // last resort: route through a shared vertex
    const auto& fa = mesh.faces()[a.p.face];
    const auto& fc = mesh.faces()[c.p.face];
    for (int i = 0; i < 3; ++i) {
      const int j = local_index(fc, fa[i]);
      if (j < 0) continue;
      Eigen::Vector3d va = Eigen::Vector3d::Zero(), vc = Eigen::Vector3d::Zero();
      va[i] = 1.0;
      vc[j] = 1.0;
      piece(a.p.face, a.p.bary, va);
      piece(c.p.face, vc, c.p.bary);
      return;
    }
    throw Error(ErrorKind::StepSize, "edge image jumps between distant faces");
  }

  double integral = 0.0;
  std::vector<Piece> pieces;

 private:
  void piece(int face, const Eigen::Vector3d& p, const Eigen::Vector3d& q) {
    integral += flow_.integrate_in_face(b_, face, p, q);
    pieces.push_back({face, p, q});
  }

  // P in face F, Q in the neighbour across local edge k of F.
  void split_across(const SurfacePoint& P, const SurfacePoint& Q, int k) {
    const auto& ops = flow_.ops();
    const auto& mesh = ops.mesh();
    const Chart xf = layout(ops, P.face);
    int g = -1;
    const Chart xg = unfold_across(ops, P.face, xf, k, g);
    Eigen::Vector2d p2 = Eigen::Vector2d::Zero(), q2 = Eigen::Vector2d::Zero();
    for (int i = 0; i < 3; ++i) {
      p2 += P.bary[i] * xf[i];
      q2 += Q.bary[i] * xg[i];
    }
    const Eigen::Vector2d A = xf[k], ab = xf[(k + 1) % 3] - A, pq = q2 - p2;
    double s = 0.5;
    const double den = cross2(pq, ab);
    if (std::abs(den) > 0.0) {
      const double tau = cross2(A - p2, ab) / den;
      s = std::clamp((p2 + tau * pq - A).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    }
    Eigen::Vector3d xF = Eigen::Vector3d::Zero();
    xF[k] = 1.0 - s;
    xF[(k + 1) % 3] = s;
    const Eigen::Vector3d xG = transfer(mesh, P.face, xF, Q.face);
    piece(P.face, P.bary, xF);
    piece(Q.face, xG, Q.bary);
  }

  const HamiltonianFlow& flow_;
  const Cochain1& b_;
  int edge_;
  double t_;
};

// Dual-graph hop distances from face `source`.
std::vector<int> face_hops(const TriangleMesh& mesh, int source) {
  std::vector<int> hops(mesh.num_faces(), -1);
  std::queue<int> queue;
  hops[source] = 0;
  queue.push(source);
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop();
    for (int k = 0; k < 3; ++k) {
      const int g = mesh.neighbour(f, k).first;
      if (hops[g] < 0) {
        hops[g] = hops[f] + 1;
        queue.push(g);
      }
    }
  }
  return hops;
}

// 1-cochains c with d1 c = area on every face except a sink face, which
// absorbs the total area. The Whitney form of c then satisfies d = vol away
// from the sink, so the area enclosed by a loop avoiding the sink is the
// integral of c along it. Two sinks far apart cover every face.
struct AreaPotential {
  Eigen::VectorXd c;
  std::vector<int> hops;  // from the sink
};

std::array<AreaPotential, 2> area_potentials(const OperatorSet& ops) {
  const auto& mesh = ops.mesh();
  const SparseMatrix L = ops.d1() * SparseMatrix(ops.d1().transpose());
  std::array<AreaPotential, 2> out;
  int sink = 0;
  for (int i = 0; i < 2; ++i) {
    out[i].hops = face_hops(mesh, sink);
    SparseMatrix Ls = L;
    Ls.coeffRef(sink, sink) += 1.0;
    Eigen::SimplicialLDLT<SparseMatrix> solver(Ls);
    if (solver.info() != Eigen::Success) throw SolverFailure("area potential factorization failed", 0.0);
    Eigen::VectorXd rhs = ops.face_areas();
    rhs[sink] -= ops.total_area();
    out[i].c = ops.d1().transpose() * solver.solve(rhs);
    sink = static_cast<int>(std::max_element(out[i].hops.begin(), out[i].hops.end()) - out[i].hops.begin());
  }
  return out;
}

}  // namespace

FlowPullback hamiltonian_pushforward(const InvariantOneForm& a, const Cochain0& H, double t, int steps,
                                     const OperatorSet& ops) {
  const auto& mesh = ops.mesh();
  if (steps < 1) throw Error(ErrorKind::InvalidParameter, "steps must be at least 1");
  if (!std::isfinite(t) || t < 0.0) throw Error(ErrorKind::InvalidParameter, "flow time must be nonnegative");
  const HamiltonianFlow flow(ops, H);
  const double limit = 0.5 * ops.edge_lengths().minCoeff();
  if (t * flow.max_speed() > limit) {
    throw Error(ErrorKind::StepSize, "t * max|grad H| = " + std::to_string(t * flow.max_speed()) +
                                         " exceeds half the shortest edge " + std::to_string(limit));
  }
  FlowPullback out;
  out.form.f.values.resize(mesh.num_vertices());
  out.form.b.values.resize(mesh.num_edges());
  std::vector<SurfacePoint> vimg(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    vimg[v] = flow.trace(flow.at_vertex(v), t);
    const auto& f = mesh.faces()[vimg[v].face];
    double val = 0.0;
    for (int k = 0; k < 3; ++k) val += vimg[v].bary[k] * a.f.values[f[k]];
    out.form.f.values[v] = val;
  }
  const auto potentials = area_potentials(ops);
  std::array<Eigen::VectorXd, 2> moved;
  for (auto& m : moved) m.resize(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    EdgeImage img(flow, a.b, e, t);
    Sample prev{0.0, vimg[mesh.edges()[e][0]]};
    for (int k = 1; k <= steps; ++k) {
      const double s = static_cast<double>(k) / steps;
      const Sample cur{s, k == steps ? vimg[mesh.edges()[e][1]] : flow.trace(flow.on_edge(e, s), t)};
      img.add(prev, cur, 0);
      prev = cur;
    }
    out.form.b.values[e] = img.integral;
    out.crossings += static_cast<long>(img.pieces.size());
    for (int i = 0; i < 2; ++i) {
      const Cochain1 c{potentials[i].c};
      double sum = 0.0;
      for (const auto& pc : img.pieces) sum += flow.integrate_in_face(c, pc.face, pc.p, pc.q);
      moved[i][e] = sum;
    }
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const int i = potentials[0].hops[f] >= potentials[1].hops[f] ? 0 : 1;
    const double area = ops.face_areas()[f];
    double image = 0.0;
    for (int k = 0; k < 3; ++k) image += mesh.face_edge_sign(f, k) * moved[i][mesh.face_edge(f, k)];
    out.tau_vol = std::max(out.tau_vol, std::abs(image - area) / area);
  }
  out.usable = out.tau_vol <= 1e-3;
  return out;
}

}  // namespace beltrami
