#include "anthro/mesh.hpp"

#include "anthro/errors.hpp"

#include <fstream>
#include <sstream>
#include <string_view>

namespace anthro {

void validate_mesh(const Mesh& mesh)
{
    const auto n = static_cast<long long>(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
        if (!mesh.vertices[i].allFinite())
            throw ValidationError("vertex " + std::to_string(i + 1) + " has non-finite coordinates");
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int idx : tri)
            if (idx < 0 || idx >= n)
                throw ValidationError("triangle " + std::to_string(t + 1) + " references vertex index " +
                                      std::to_string(idx + 1) + " but mesh has " + std::to_string(n) +
                                      " vertices");
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw ValidationError("triangle " + std::to_string(t + 1) + " is degenerate (repeated index)");
    }
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace

Mesh parse_obj(std::istream& in, ObjReadStats* stats)
{
    Mesh mesh;
    ObjReadStats local;
    // Face indices are checked after all vertices are read.
    std::vector<std::pair<std::vector<long long>, std::size_t>> faces;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto tok = split_ws(line);
        if (tok.empty() || tok[0].front() == '#') continue;
        if (tok[0] == "v") {
            if (tok.size() < 4) throw ParseError("vertex needs 3 coordinates", lineno);
            Vec3 p;
            for (int k = 0; k < 3; ++k)
                if (!parse_double(tok[k + 1], p[k]))
                    throw ParseError("bad vertex coordinate '" + std::string(tok[k + 1]) + "'", lineno);
            mesh.vertices.push_back(p);
        } else if (tok[0] == "f") {
            if (tok.size() < 4) throw ParseError("face needs at least 3 indices", lineno);
            std::vector<long long> idx;
            for (std::size_t k = 1; k < tok.size(); ++k) {
                auto field = tok[k].substr(0, tok[k].find('/'));
                int v = 0;
                if (!parse_int(field, v))
                    throw ParseError("bad face index '" + std::string(tok[k]) + "'", lineno);
                idx.push_back(v);
            }
            faces.emplace_back(std::move(idx), lineno);
        } else {
            ++local.ignored_lines;
        }
    }
    const auto nv = static_cast<long long>(mesh.vertices.size());
    for (const auto& [idx, ln] : faces) {
        for (long long v : idx)
            if (v < 1 || v > nv)
                throw ValidationError("line " + std::to_string(ln) + ": face index " + std::to_string(v) +
                                      " out of range (mesh has " + std::to_string(nv) + " vertices)");
        if (idx.size() > 3) ++local.quads_split;
        for (std::size_t k = 1; k + 1 < idx.size(); ++k)
            mesh.triangles.push_back({static_cast<int>(idx[0] - 1), static_cast<int>(idx[k] - 1),
                                      static_cast<int>(idx[k + 1] - 1)});
    }
    validate_mesh(mesh);
    if (stats) *stats = local;
    return mesh;
}

Mesh load_mesh(const std::filesystem::path& path, ObjReadStats* stats)
{
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open mesh file " + path.string());
    return parse_obj(in, stats);
}

void write_obj(std::ostream& out, const Mesh& mesh)
{
    for (const auto& v : mesh.vertices)
        out << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z())
            << '\n';
    for (const auto& t : mesh.triangles)
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_mesh(const std::filesystem::path& path, const Mesh& mesh)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write mesh file " + path.string());
    write_obj(out, mesh);
}

Vec3 centroid(const Mesh& mesh)
{
    Vec3 c = Vec3::Zero();
    for (const auto& v : mesh.vertices) c += v;
    return mesh.vertices.empty() ? c : Vec3(c / static_cast<double>(mesh.vertices.size()));
}

Mesh transformed(const Mesh& mesh, const Eigen::Isometry3d& T)
{
    Mesh out = mesh;
    for (auto& v : out.vertices) v = T * v;
    return out;
}

Mesh scaled(const Mesh& mesh, double s)
{
    Mesh out = mesh;
    for (auto& v : out.vertices) v *= s;
    return out;
}

} // namespace anthro
