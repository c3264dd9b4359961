#include "beltrami/error.hpp"

namespace beltrami {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid parameter";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::MeshRejected: return "mesh rejected";
    case ErrorKind::CorruptedMesh: return "corrupted mesh";
    case ErrorKind::DegenerateMetric: return "degenerate metric";
    case ErrorKind::SolverFailure: return "solver failure";
    case ErrorKind::TopologyMismatch: return "topology mismatch";
    case ErrorKind::DegenerateNodalSet: return "degenerate nodal set";
    case ErrorKind::InternalConsistency: return "internal consistency";
    case ErrorKind::StepSize: return "step size";
    case ErrorKind::PropositionViolation: return "proposition violation";
    case ErrorKind::PropertyViolation: return "property violation";
    case ErrorKind::Io: return "i/o";
  }
  return "error";
}

}  // namespace beltrami
