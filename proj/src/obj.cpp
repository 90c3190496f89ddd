#include "lsnif/obj.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lsnif {
namespace {

[[noreturn]] void fail(const std::string& name, int line, const std::string& what) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

// OBJ indices are 1-based; negative indices count back from the current end.
int resolve_index(int raw, int count, const std::string& name, int line) {
  int idx = raw > 0 ? raw - 1 : count + raw;
  if (idx < 0 || idx >= count) fail(name, line, "index out of range");
  return idx;
}

struct FaceCorner {
  int vertex = -1;
  int normal = -1;
};

FaceCorner parse_corner(const std::string& token, int n_vertices, int n_normals,
                        const std::string& name, int line) {
  FaceCorner corner;
  int field = 0;
  size_t pos = 0;
  while (pos <= token.size()) {
    size_t next = token.find('/', pos);
    if (next == std::string::npos) next = token.size();
    if (next > pos) {
      int value = 0;
      auto [p, ec] = std::from_chars(token.data() + pos, token.data() + next, value);
      if (ec != std::errc() || p != token.data() + next)
        fail(name, line, "bad face index '" + token + "'");
      if (field == 0) corner.vertex = resolve_index(value, n_vertices, name, line);
      if (field == 2) corner.normal = resolve_index(value, n_normals, name, line);
    }
    ++field;
    pos = next + 1;
  }
  if (corner.vertex < 0) fail(name, line, "face corner without vertex index");
  return corner;
}

}  // namespace

Mesh load_obj(std::istream& in, const std::string& name) {
  Mesh mesh;
  std::map<std::string, int> material_slots;
  int current_material = 0;
  bool default_slot_used = false;  // faces emitted before any usemtl
  bool all_corners_have_normals = true;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;

    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) fail(name, line_no, "bad vertex record");
      mesh.vertices.push_back(p);
    } else if (tag == "vn") {
      Vec3 n;
      if (!(ls >> n.x() >> n.y() >> n.z())) fail(name, line_no, "bad normal record");
      mesh.normals.push_back(n);
    } else if (tag == "usemtl") {
      std::string mat_name;
      ls >> mat_name;
      auto it = material_slots.find(mat_name);
      if (it == material_slots.end()) {
        const int slot = static_cast<int>(material_slots.size()) + (default_slot_used ? 1 : 0);
        it = material_slots.emplace(mat_name, slot).first;
      }
      current_material = it->second;
    } else if (tag == "f") {
      if (material_slots.empty() && !default_slot_used) default_slot_used = true;
      std::vector<FaceCorner> corners;
      std::string token;
      while (ls >> token)
        corners.push_back(parse_corner(token, static_cast<int>(mesh.vertices.size()),
                                       static_cast<int>(mesh.normals.size()), name, line_no));
      if (corners.size() < 3) fail(name, line_no, "face with fewer than 3 vertices");
      for (size_t i = 2; i < corners.size(); ++i) {  // fan triangulation
        const FaceCorner tri[3] = {corners[0], corners[i - 1], corners[i]};
        mesh.faces.emplace_back(tri[0].vertex, tri[1].vertex, tri[2].vertex);
        mesh.face_material.push_back(current_material);
        if (tri[0].normal < 0 || tri[1].normal < 0 || tri[2].normal < 0)
          all_corners_have_normals = false;
        mesh.face_normals.emplace_back(tri[0].normal, tri[1].normal, tri[2].normal);
      }
    }
    // Ignore everything else (vt, o, g, s, mtllib, ...).
  }

  if (!all_corners_have_normals || mesh.normals.empty()) mesh.face_normals.clear();

  int n_mat = 1;
  for (const auto& [mat_name, slot] : material_slots) n_mat = std::max(n_mat, slot + 1);
  mesh.materials.assign(static_cast<size_t>(n_mat), Material{});

  mesh.validate();
  return mesh;
}

Mesh load_obj(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open OBJ file: " + path);
  return load_obj(file, path);
}

}  // namespace lsnif
