#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace beltrami {

/// Broad failure categories. The CLI maps PropertyViolation to exit code 2 and
/// everything else to exit code 1.
enum class ErrorKind {
  InvalidParameter,
  InvalidArgument,
  MeshRejected,
  CorruptedMesh,
  DegenerateMetric,
  SolverFailure,
  TopologyMismatch,
  DegenerateNodalSet,
  InternalConsistency,
  StepSize,
  PropositionViolation,
  PropertyViolation,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for errors that signal a violated mathematical property (a bug),
  /// as opposed to bad input or I/O trouble.
  bool is_property_violation() const noexcept {
    return kind_ == ErrorKind::PropertyViolation || kind_ == ErrorKind::PropositionViolation;
  }

 private:
  ErrorKind kind_;
};

/// Mesh validation failure. `simplex` names the offending vertex, edge or face
/// in the input numbering (0-based), e.g. "edge (3, 17)".
class MeshRejected : public Error {
 public:
  enum class Reason { Parse, OpenBoundary, NonManifold, NonOrientable, Degenerate };

  MeshRejected(Reason reason, std::string simplex, const std::string& detail)
      : Error(ErrorKind::MeshRejected, reason_name(reason) + " at " + simplex + ": " + detail),
        reason_(reason),
        simplex_(std::move(simplex)) {}

  Reason reason() const noexcept { return reason_; }
  const std::string& simplex() const noexcept { return simplex_; }

  static std::string reason_name(Reason r) {
    switch (r) {
      case Reason::Parse: return "parse error";
      case Reason::OpenBoundary: return "open boundary";
      case Reason::NonManifold: return "non-manifold";
      case Reason::NonOrientable: return "non-orientable";
      case Reason::Degenerate: return "degenerate simplex";
    }
    return "unknown";
  }

 private:
  Reason reason_;
  std::string simplex_;
};

/// Conformal lengths violate a triangle inequality; `faces` lists the offenders.
class DegenerateMetric : public Error {
 public:
  DegenerateMetric(std::vector<int> faces, const std::string& detail)
      : Error(ErrorKind::DegenerateMetric, detail), faces_(std::move(faces)) {}
  const std::vector<int>& faces() const noexcept { return faces_; }

 private:
  std::vector<int> faces_;
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double residual)
      : Error(ErrorKind::SolverFailure, what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace beltrami
