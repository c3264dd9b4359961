#pragma once

#include <vector>

#include "beltrami/bundle.hpp"

namespace beltrami {

/// A point of the surface: a face and barycentric coordinates in it.
struct SurfacePoint {
  int face = 0;
  Eigen::Vector3d bary = Eigen::Vector3d::Zero();
};

/// Flow of the symplectic gradient of a piecewise-linear H. On each face the
/// field is constant, so the flow is a translation there; normal components
/// agree across edges, which makes the flow exactly area preserving.
/// Trajectories are integrated exactly by walking from face to face.
class HamiltonianFlow {
 public:
  HamiltonianFlow(const OperatorSet& ops, const Cochain0& H);

  /// Largest |grad H| over the faces.
  double max_speed() const { return max_speed_; }

  /// Position at time t of the trajectory through `start`.
  SurfacePoint trace(SurfacePoint start, double t) const;

  /// The vertex as a point of the face the flow leaves it through.
  SurfacePoint at_vertex(int v) const;
  /// The point (1-s)*v0 + s*v1 of edge e, placed in the face the flow enters.
  SurfacePoint on_edge(int e, double s) const;

  /// Integral of the Whitney 1-form of b along the segment P -> Q, both in the
  /// same face.
  double integrate_in_face(const Cochain1& b, int face, const Eigen::Vector3d& p, const Eigen::Vector3d& q) const;
  /// Length of the straight segment between two barycentric points of a face.
  double segment_length(int face, const Eigen::Vector3d& p, const Eigen::Vector3d& q) const;

  const OperatorSet& ops() const { return *ops_; }

 private:
  // Face through which the flow leaves vertex v; `stationary` when no face
  // around v is outgoing (the vertex is a centre of the flow).
  SurfacePoint leave_vertex(int v, bool& stationary) const;
  const OperatorSet* ops_;
  std::vector<std::vector<int>> vertex_faces_;
  std::vector<Eigen::Vector3d> velocity_;  // barycentric velocity per face (local vertex order)
  double max_speed_ = 0.0;
};

struct FlowPullback {
  InvariantOneForm form;
  /// Largest relative area change of a face image, measured by integrating
  /// an area primitive along the traced image of the face boundary. The
  /// error shrinks like 1/steps.
  double tau_vol = 0.0;
  bool usable = true;  // tau_vol <= 1e-3
  long crossings = 0;  // straight pieces in the traced edge images
};

/// Pullback of a by the time-t flow of H: f is composed with the flow map,
/// b is integrated along the traced images of the edges (each edge sampled
/// at `steps` sub-intervals, refined where images jump over faces).
/// Throws StepSize when t * max|grad H| exceeds half the shortest edge.
FlowPullback hamiltonian_pushforward(const InvariantOneForm& a, const Cochain0& H, double t, int steps,
                                     const OperatorSet& ops);

}  // namespace beltrami
