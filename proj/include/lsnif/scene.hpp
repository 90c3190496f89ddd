#pragma once

#include "lsnif/geometry.hpp"

#include <istream>
#include <string>
#include <vector>

namespace lsnif {

struct Camera {
  Vec3 position = Vec3(0, 0, 5);
  Vec3 look_at = Vec3::Zero();
  Vec3 up = Vec3(0, 1, 0);
  Real vfov_deg = Real(45);
};

enum class LightType { point, sphere, environment };

struct Light {
  LightType type = LightType::point;
  Vec3 position = Vec3::Zero();
  Real radius = Real(0);  // sphere lights
  Vec3 radiance = Vec3::Ones();
};

enum class Representation { triangles, lsnif };

struct SceneObject {
  int mesh_index = 0;
  Affine object_to_world = Affine::Identity();
  Representation representation = Representation::triangles;
  std::string model_path;  // serialized bundle for lsnif objects
};

struct Scene {
  std::vector<Mesh> meshes;  // one entry per object block
  std::vector<SceneObject> objects;
  std::vector<Light> lights;
  Camera camera;
};

// Line-oriented block format:
//
//   camera {
//     position 0 1 6.8
//     look_at 0 1 0
//     fov 40
//   }
//   light {
//     type sphere          # point | sphere | environment
//     position 0 1.9 0
//     radius 0.15
//     radiance 12 12 12
//   }
//   object {
//     obj assets/box.obj
//     translate 0 0 0
//     rotate 0 45 0        # XYZ Euler degrees, applied X then Y then Z
//     scale 1              # or three per-axis factors
//     representation lsnif # triangles | lsnif
//     model out/box.lsnif  # required for lsnif objects
//     material albedo 0.7 0.7 0.7 kind diffuse
//     material albedo 0.9 0.9 0.9 kind glossy roughness 0.2
//   }
//
// Material lines override the mesh table slots in order. Relative obj/model
// paths resolve against the scene file's directory.
Scene load_scene(const std::string& path);
Scene load_scene(std::istream& in, const std::string& base_dir,
                 const std::string& name = "<stream>");

}  // namespace lsnif
