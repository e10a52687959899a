#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dasm/mesh.hpp"
#include "dasm/point_cloud.hpp"

namespace dasm {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class MeshFormat { obj, off };

/// Picks the format from the file extension (.obj / .off, case-insensitive).
[[nodiscard]] MeshFormat format_from_path(const std::filesystem::path& path);

/// Reads and validates a mesh. Unsupported OBJ directives are skipped; one
/// message per directive kind is appended to `warnings`, or written to
/// stderr when `warnings` is null.
[[nodiscard]] TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format,
                                     std::vector<std::string>* warnings = nullptr);
[[nodiscard]] TriangleMesh load_mesh(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format);
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);

/// Whitespace-separated `x y z [nx ny nz]` lines; normals must be present on
/// every line or on none and are renormalised on load.
[[nodiscard]] TargetCloud load_xyz(const std::filesystem::path& path);
void save_xyz(const TargetCloud& cloud, const std::filesystem::path& path);

}  // namespace dasm
