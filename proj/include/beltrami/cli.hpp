#pragma once

#include <ostream>
#include <string>

#include "beltrami/mesh.hpp"

namespace beltrami {

/// Exit codes: 0 success, 1 infrastructure or input failure, 2 a
/// mathematical property was violated.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "torus:n[:L]", "icosphere:s[:R]" or an OBJ path.
TriangleMesh mesh_from_spec(const std::string& spec);

/// "flat", "bump:A:sigma[:center]" or a file with one u value per vertex.
ConformalFactor metric_from_spec(const TriangleMesh& mesh, const std::string& spec);

}  // namespace beltrami
