#pragma once

#include "anthro/mesh.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

namespace testing_support {

using anthro::Mesh;
using anthro::Vec3;

/// UV sphere with outward-facing triangles.
inline Mesh uv_sphere(double r, int n_lat = 64, int n_lon = 128, Vec3 centre = Vec3::Zero())
{
    Mesh m;
    m.subject_id = "sphere";
    m.vertices.push_back(centre + Vec3(0, 0, r));
    for (int i = 1; i < n_lat; ++i) {
        const double th = std::numbers::pi * i / n_lat;
        for (int j = 0; j < n_lon; ++j) {
            const double ph = 2 * std::numbers::pi * j / n_lon;
            m.vertices.push_back(centre + r * Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)));
        }
    }
    m.vertices.push_back(centre + Vec3(0, 0, -r));
    const int south = static_cast<int>(m.vertices.size()) - 1;
    auto ring = [n_lon](int i, int j) { return 1 + (i - 1) * n_lon + (j % n_lon); };
    for (int j = 0; j < n_lon; ++j) m.triangles.push_back({0, ring(1, j), ring(1, j + 1)});
    for (int i = 1; i < n_lat - 1; ++i)
        for (int j = 0; j < n_lon; ++j) {
            m.triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
            m.triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
        }
    for (int j = 0; j < n_lon; ++j) m.triangles.push_back({south, ring(n_lat - 1, j + 1), ring(n_lat - 1, j)});
    return m;
}

/// Axis-aligned cube [0, side]^3.
inline Mesh cube(double side)
{
    Mesh m;
    m.subject_id = "cube";
    for (int i = 0; i < 8; ++i) m.vertices.push_back(side * Vec3(i & 1, (i >> 1) & 1, (i >> 2) & 1));
    const int q[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
    for (const auto& f : q) {
        m.triangles.push_back({f[0], f[1], f[2]});
        m.triangles.push_back({f[0], f[2], f[3]});
    }
    return m;
}

/// Regular height-field patch z = f(x, y) over [-half, half]^2.
template <class F>
Mesh height_field(double half, int n, F f)
{
    Mesh m;
    m.subject_id = "patch";
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            const double x = -half + 2 * half * j / n, y = -half + 2 * half * i / n;
            m.vertices.push_back(Vec3(x, y, f(x, y)));
        }
    auto id = [n](int i, int j) { return i * (n + 1) + j; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            m.triangles.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
            m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
        }
    return m;
}

inline std::filesystem::path temp_dir(const std::string& name)
{
    static std::random_device rd;
    auto p = std::filesystem::temp_directory_path() / ("anthro_" + name + "_" + std::to_string(rd()));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
    return q.normalized().toRotationMatrix();
}

} // namespace testing_support
