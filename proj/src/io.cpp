#include "meshpatch/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace meshpatch {
namespace {

[[noreturn]] void parse_error(int line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

// Parses the leading vertex index of an OBJ face token ("7", "7/2", "7//3", "-1").
int obj_index(const std::string& token, int vertex_count, int line) {
  const auto slash = token.find('/');
  const std::string head = token.substr(0, slash);
  int idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stoi(head, &used);
    if (used != head.size()) parse_error(line, "bad face index '" + token + "'");
  } catch (const std::logic_error&) {
    parse_error(line, "bad face index '" + token + "'");
  }
  if (idx > 0) return idx - 1;
  if (idx < 0) return vertex_count + idx;
  parse_error(line, "face index 0 is invalid in OBJ");
}

void check_indices(const IndexedMesh& mesh, const std::vector<int>& face_lines) {
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.faces[f];
    for (int v : face) {
      if (v < 0 || v >= mesh.num_vertices())
        parse_error(face_lines[f], "vertex index out of range");
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
      parse_error(face_lines[f], "face repeats a vertex");
  }
}

IndexedMesh load_obj(std::istream& in) {
  IndexedMesh mesh;
  std::vector<int> face_lines;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream ss(strip_comment(raw));
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) parse_error(line, "expected three coordinates");
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string token;
      while (ss >> token) idx.push_back(obj_index(token, mesh.num_vertices(), line));
      if (idx.size() < 3) parse_error(line, "face with fewer than three vertices");
      if (idx.size() > 3)
        throw Error(ErrorCode::NonTriangleFace,
                    "line " + std::to_string(line) + ": face with " + std::to_string(idx.size()) +
                        " vertices");
      mesh.faces.push_back({idx[0], idx[1], idx[2]});
      face_lines.push_back(line);
    }
  }
  check_indices(mesh, face_lines);
  return mesh;
}

IndexedMesh load_off(std::istream& in) {
  IndexedMesh mesh;
  std::vector<int> face_lines;
  std::string raw;
  int line = 0;

  // Tokens after the header may span lines; collect non-comment lines lazily.
  auto next_content = [&](std::string& out) {
    while (std::getline(in, raw)) {
      ++line;
      out = strip_comment(raw);
      if (!blank(out)) return true;
    }
    return false;
  };

  std::string content;
  if (!next_content(content)) parse_error(line, "empty OFF stream");
  std::istringstream header(content);
  std::string magic;
  header >> magic;
  if (magic.size() < 3 || magic.substr(magic.size() - 3) != "OFF")
    parse_error(line, "missing OFF header");

  long nv = -1, nf = -1, ne = 0;
  if (!(header >> nv >> nf)) {
    if (!next_content(content)) parse_error(line, "missing OFF counts");
    std::istringstream counts(content);
    if (!(counts >> nv >> nf)) parse_error(line, "malformed OFF counts");
    counts >> ne;
  }
  if (nv < 0 || nf < 0) parse_error(line, "negative OFF counts");

  mesh.vertices.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    if (!next_content(content)) parse_error(line, "unexpected end of vertex list");
    std::istringstream ss(content);
    double x, y, z;
    if (!(ss >> x >> y >> z)) parse_error(line, "expected three coordinates");
    mesh.vertices.emplace_back(x, y, z);
  }
  mesh.faces.reserve(nf);
  for (long i = 0; i < nf; ++i) {
    if (!next_content(content)) parse_error(line, "unexpected end of face list");
    std::istringstream ss(content);
    long n;
    if (!(ss >> n)) parse_error(line, "missing face vertex count");
    if (n < 3) parse_error(line, "face with fewer than three vertices");
    if (n > 3)
      throw Error(ErrorCode::NonTriangleFace,
                  "line " + std::to_string(line) + ": face with " + std::to_string(n) +
                      " vertices");
    Face f;
    for (int& v : f)
      if (!(ss >> v)) parse_error(line, "expected three face indices");
    mesh.faces.push_back(f);
    face_lines.push_back(line);
  }
  check_indices(mesh, face_lines);
  return mesh;
}

}  // namespace

IndexedMesh load_mesh(std::istream& in, MeshFormat format) {
  return format == MeshFormat::OBJ ? load_obj(in) : load_off(in);
}

MeshFormat format_from_path(const std::string& path) {
  std::string ext = path.substr(path.find_last_of('.') + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == "obj") return MeshFormat::OBJ;
  if (ext == "off") return MeshFormat::OFF;
  throw Error(ErrorCode::ParseError, "unknown mesh extension in '" + path + "'");
}

IndexedMesh load_mesh_file(const std::string& path) {
  const MeshFormat format = format_from_path(path);
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return load_mesh(in, format);
}

void write_obj(std::ostream& out, const IndexedMesh& mesh) {
  out.precision(17);
  for (const Vec3& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const Face& f : mesh.faces)
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

}  // namespace meshpatch
