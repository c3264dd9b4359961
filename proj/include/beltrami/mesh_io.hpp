#pragma once

#include <iosfwd>
#include <string>

#include "beltrami/mesh.hpp"

namespace beltrami {

/// Reads the OBJ subset used throughout the project: `v x y z` and
/// `f i j k` records (1-based, counterclockwise, optional `/vt/vn` suffixes
/// ignored). Comments, `o`/`g`/`s` records and blank lines are skipped; any
/// other record or a non-triangular face is a parse error. Base lengths come
/// from the embedding.
TriangleMesh load_mesh(const std::string& path);
TriangleMesh read_obj(std::istream& in, const std::string& name = "<stream>");

void write_obj(std::ostream& out, const TriangleMesh& mesh);
void save_mesh(const TriangleMesh& mesh, const std::string& path);

}  // namespace beltrami
