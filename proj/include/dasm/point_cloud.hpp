#pragma once

#include <vector>

#include "dasm/vec3.hpp"

namespace dasm {

/// Target points for data-term forces; `normals` is either empty or one
/// unit vector per point.
struct TargetCloud {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;

    [[nodiscard]] bool has_normals() const { return !normals.empty(); }
};

}  // namespace dasm
