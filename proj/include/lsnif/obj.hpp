#pragma once

#include "lsnif/geometry.hpp"

#include <istream>
#include <string>

namespace lsnif {

// ASCII OBJ loader covering v / vn / f / usemtl records. Polygons are fan
// triangulated. usemtl groups are mapped to material slots in order of first
// appearance; faces before any usemtl land in slot 0.
Mesh load_obj(const std::string& path);
Mesh load_obj(std::istream& in, const std::string& name = "<stream>");

}  // namespace lsnif
