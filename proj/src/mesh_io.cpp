#include "beltrami/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "beltrami/error.hpp"

namespace beltrami {

namespace {

int parse_index(const std::string& token, int num_vertices, int line_no) {
  const std::string head = token.substr(0, token.find('/'));
  int idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stoi(head, &used);
    if (used != head.size()) throw std::invalid_argument(head);
  } catch (const std::exception&) {
    throw MeshRejected(MeshRejected::Reason::Parse, "line " + std::to_string(line_no), "bad index '" + token + "'");
  }
  if (idx < 0) idx = num_vertices + idx + 1;  // OBJ relative index
  return idx - 1;
}

}  // namespace

TriangleMesh read_obj(std::istream& in, const std::string& name) {
  std::vector<Eigen::Vector3d> pos;
  std::vector<TriangleMesh::Face> faces;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Eigen::Vector3d p;
      if (!(ls >> p[0] >> p[1] >> p[2])) {
        throw MeshRejected(MeshRejected::Reason::Parse, "line " + std::to_string(line_no), "bad vertex record");
      }
      pos.push_back(p);
    } else if (tag == "f") {
      std::vector<int> ids;
      std::string tok;
      while (ls >> tok) ids.push_back(parse_index(tok, static_cast<int>(pos.size()), line_no));
      if (ids.size() != 3) {
        throw MeshRejected(MeshRejected::Reason::Parse, "line " + std::to_string(line_no),
                           "only triangular faces are supported");
      }
      faces.push_back({ids[0], ids[1], ids[2]});
    } else if (tag == "o" || tag == "g" || tag == "s" || tag == "vn" || tag == "vt") {
      continue;
    } else {
      throw MeshRejected(MeshRejected::Reason::Parse, "line " + std::to_string(line_no),
                         "unsupported record '" + tag + "'");
    }
  }
  auto mesh = TriangleMesh::build(std::move(pos), std::move(faces));
  mesh.set_source(name);
  return mesh;
}

TriangleMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open mesh file '" + path + "'");
  return read_obj(in, path);
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  out << std::setprecision(17);
  out << "# " << mesh.num_vertices() << " vertices, " << mesh.num_faces() << " faces\n";
  for (const auto& p : mesh.positions()) out << "v " << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  for (const auto& t : mesh.faces()) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void save_mesh(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  write_obj(out, mesh);
}

}  // namespace beltrami
