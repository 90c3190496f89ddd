#include "lsnif/scene.hpp"

#include "lsnif/obj.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lsnif {
namespace {

constexpr Real kDegToRad = Real(3.14159265358979323846 / 180.0);

[[noreturn]] void fail(const std::string& name, int line, const std::string& what) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

Vec3 read_vec3(std::istringstream& ls, const std::string& name, int line) {
  Vec3 v;
  if (!(ls >> v.x() >> v.y() >> v.z())) fail(name, line, "expected 3 numbers");
  return v;
}

Real read_real(std::istringstream& ls, const std::string& name, int line) {
  Real v;
  if (!(ls >> v)) fail(name, line, "expected a number");
  return v;
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

Material parse_material(std::istringstream& ls, const std::string& name, int line) {
  Material mat;
  std::string key;
  while (ls >> key) {
    if (key == "albedo") {
      mat.albedo = read_vec3(ls, name, line);
    } else if (key == "kind") {
      std::string kind;
      ls >> kind;
      if (kind == "diffuse") mat.kind = MaterialKind::diffuse;
      else if (kind == "glossy") mat.kind = MaterialKind::glossy;
      else fail(name, line, "unknown material kind '" + kind + "'");
    } else if (key == "roughness") {
      mat.roughness = read_real(ls, name, line);
    } else {
      fail(name, line, "unknown material key '" + key + "'");
    }
  }
  return mat;
}

}  // namespace

Scene load_scene(std::istream& in, const std::string& base_dir,
                 const std::string& name) {
  Scene scene;
  std::string line;
  int line_no = 0;

  enum class Block { none, camera, light, object };
  Block block = Block::none;
  Light light;
  SceneObject object;
  Mesh mesh;
  Vec3 translate = Vec3::Zero();
  Vec3 rotate = Vec3::Zero();
  Vec3 scale = Vec3::Ones();
  int material_slot = 0;

  auto close_block = [&]() {
    switch (block) {
      case Block::light:
        scene.lights.push_back(light);
        break;
      case Block::object: {
        if (mesh.vertices.empty()) fail(name, line_no, "object block without obj");
        if (object.representation == Representation::lsnif && object.model_path.empty())
          fail(name, line_no, "lsnif object without model path");
        Affine m = Affine::Identity();
        m.translate(translate);
        m.rotate(Eigen::AngleAxis<Real>(rotate.z() * kDegToRad, Vec3::UnitZ()));
        m.rotate(Eigen::AngleAxis<Real>(rotate.y() * kDegToRad, Vec3::UnitY()));
        m.rotate(Eigen::AngleAxis<Real>(rotate.x() * kDegToRad, Vec3::UnitX()));
        m.scale(scale);
        object.object_to_world = m;
        object.mesh_index = static_cast<int>(scene.meshes.size());
        scene.meshes.push_back(std::move(mesh));
        scene.objects.push_back(object);
        break;
      }
      default:
        break;
    }
    block = Block::none;
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;

    if (key == "}") {
      if (block == Block::none) fail(name, line_no, "unmatched '}'");
      close_block();
      continue;
    }
    if (key == "camera" || key == "light" || key == "object") {
      if (block != Block::none) fail(name, line_no, "nested block");
      std::string brace;
      if (!(ls >> brace) || brace != "{") fail(name, line_no, "expected '{'");
      if (key == "camera") block = Block::camera;
      if (key == "light") {
        block = Block::light;
        light = Light{};
      }
      if (key == "object") {
        block = Block::object;
        object = SceneObject{};
        mesh = Mesh{};
        translate = Vec3::Zero();
        rotate = Vec3::Zero();
        scale = Vec3::Ones();
        material_slot = 0;
      }
      continue;
    }

    switch (block) {
      case Block::camera:
        if (key == "position") scene.camera.position = read_vec3(ls, name, line_no);
        else if (key == "look_at") scene.camera.look_at = read_vec3(ls, name, line_no);
        else if (key == "up") scene.camera.up = read_vec3(ls, name, line_no);
        else if (key == "fov") scene.camera.vfov_deg = read_real(ls, name, line_no);
        else fail(name, line_no, "unknown camera key '" + key + "'");
        break;
      case Block::light:
        if (key == "type") {
          std::string type;
          ls >> type;
          if (type == "point") light.type = LightType::point;
          else if (type == "sphere") light.type = LightType::sphere;
          else if (type == "environment") light.type = LightType::environment;
          else fail(name, line_no, "unknown light type '" + type + "'");
        } else if (key == "position") light.position = read_vec3(ls, name, line_no);
        else if (key == "radius") light.radius = read_real(ls, name, line_no);
        else if (key == "radiance") light.radiance = read_vec3(ls, name, line_no);
        else fail(name, line_no, "unknown light key '" + key + "'");
        break;
      case Block::object:
        if (key == "obj") {
          std::string path;
          ls >> path;
          mesh = load_obj(resolve_path(base_dir, path));
        } else if (key == "translate") {
          translate = read_vec3(ls, name, line_no);
        } else if (key == "rotate") {
          rotate = read_vec3(ls, name, line_no);
        } else if (key == "scale") {
          Real sx = read_real(ls, name, line_no);
          Real sy, sz;
          if (ls >> sy >> sz) scale = Vec3(sx, sy, sz);
          else scale = Vec3::Constant(sx);
        } else if (key == "representation") {
          std::string rep;
          ls >> rep;
          if (rep == "triangles") object.representation = Representation::triangles;
          else if (rep == "lsnif") object.representation = Representation::lsnif;
          else fail(name, line_no, "unknown representation '" + rep + "'");
        } else if (key == "model") {
          std::string path;
          ls >> path;
          object.model_path = resolve_path(base_dir, path);
        } else if (key == "material") {
          if (mesh.vertices.empty())
            fail(name, line_no, "material before obj in object block");
          const Material mat = parse_material(ls, name, line_no);
          if (material_slot >= mesh.n_materials())
            mesh.materials.push_back(mat);
          else
            mesh.materials[material_slot] = mat;
          ++material_slot;
        } else {
          fail(name, line_no, "unknown object key '" + key + "'");
        }
        break;
      case Block::none:
        fail(name, line_no, "key '" + key + "' outside a block");
    }
  }
  if (block != Block::none) fail(name, line_no, "unterminated block");
  for (const Mesh& m : scene.meshes) m.validate();
  return scene;
}

Scene load_scene(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open scene file: " + path);
  return load_scene(file, std::filesystem::path(path).parent_path().string(), path);
}

}  // namespace lsnif
