#pragma once

#include "anthro/types.hpp"

#include <Eigen/Geometry>

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace anthro {

using Triangle = std::array<int, 3>;

/// Triangulated surface of one subject in one pose (body, face patch or head).
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::string subject_id;
    Pose pose = Pose::Standing;

    bool empty() const noexcept { return triangles.empty(); }
};

/// Throws ValidationError on out-of-range or repeated indices and on
/// non-finite coordinates.
void validate_mesh(const Mesh& mesh);

struct ObjReadStats {
    std::size_t ignored_lines = 0;
    std::size_t quads_split = 0;
};

/// Reads the `v`/`f` subset of Wavefront OBJ. Polygons are fan-split.
Mesh parse_obj(std::istream& in, ObjReadStats* stats = nullptr);
Mesh load_mesh(const std::filesystem::path& path, ObjReadStats* stats = nullptr);

void write_obj(std::ostream& out, const Mesh& mesh);
void write_mesh(const std::filesystem::path& path, const Mesh& mesh);

Vec3 centroid(const Mesh& mesh);

/// Applies x -> T x to every vertex.
Mesh transformed(const Mesh& mesh, const Eigen::Isometry3d& T);
Mesh scaled(const Mesh& mesh, double s);

/// Keeps vertices for which `keep` is true and triangles whose three
/// vertices survive, with compacted indices.
template <class Pred>
Mesh filter_vertices(const Mesh& mesh, Pred keep)
{
    Mesh out;
    out.subject_id = mesh.subject_id;
    out.pose = mesh.pose;
    std::vector<int> remap(mesh.vertices.size(), -1);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        if (keep(mesh.vertices[i], i)) {
            remap[i] = static_cast<int>(out.vertices.size());
            out.vertices.push_back(mesh.vertices[i]);
        }
    }
    for (const auto& t : mesh.triangles) {
        const int a = remap[t[0]], b = remap[t[1]], c = remap[t[2]];
        if (a >= 0 && b >= 0 && c >= 0) out.triangles.push_back({a, b, c});
    }
    return out;
}

} // namespace anthro
