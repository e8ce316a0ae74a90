#include "anthro/body_desc.hpp"

#include "anthro/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace anthro {

std::size_t BinaryImage::occupied() const
{
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::array<double, 2> project(const Vec3& p, View view)
{
    switch (view) {
    case View::Front: return {p.x(), p.y()};
    case View::Side: return {p.z(), p.y()};
    case View::Top: return {p.x(), p.z()};
    }
    return {0, 0};
}

BinaryImage render_silhouette(const Mesh& mesh, View view, int resolution)
{
    if (mesh.triangles.empty()) throw EmptyMeshError("cannot render a mesh without triangles");
    if (resolution < 64) throw InvalidArgument("silhouette resolution must be >= 64");

    std::vector<std::array<double, 2>> uv(mesh.vertices.size());
    double umin = std::numeric_limits<double>::infinity(), vmin = umin, umax = -umin, vmax = -umin;
    for (std::size_t i = 0; i < uv.size(); ++i) {
        uv[i] = project(mesh.vertices[i], view);
        umin = std::min(umin, uv[i][0]);
        umax = std::max(umax, uv[i][0]);
        vmin = std::min(vmin, uv[i][1]);
        vmax = std::max(vmax, uv[i][1]);
    }
    double extent = std::max(umax - umin, vmax - vmin);
    if (!(extent > 0)) extent = 1.0;
    const double size = 1.1 * extent;

    BinaryImage img;
    img.width = img.height = resolution;
    img.bits.assign(static_cast<std::size_t>(resolution) * resolution, 0);
    img.view = view;
    img.mm_per_pixel = size / resolution;
    img.origin_u = 0.5 * (umin + umax) - 0.5 * size;
    img.origin_v = 0.5 * (vmin + vmax) - 0.5 * size;

    const double inv = 1.0 / img.mm_per_pixel;
    for (const auto& t : mesh.triangles) {
        double px[3], py[3];
        for (int k = 0; k < 3; ++k) {
            px[k] = (uv[t[k]][0] - img.origin_u) * inv;
            py[k] = (uv[t[k]][1] - img.origin_v) * inv;
        }
        const double area = (px[1] - px[0]) * (py[2] - py[0]) - (px[2] - px[0]) * (py[1] - py[0]);
        if (area == 0.0) continue;
        const double s = area > 0 ? 1.0 : -1.0;
        const int c0 = std::max(0, static_cast<int>(std::floor(std::min({px[0], px[1], px[2]}) - 0.5)));
        const int c1 = std::min(resolution - 1, static_cast<int>(std::ceil(std::max({px[0], px[1], px[2]}) - 0.5)));
        const int r0 = std::max(0, static_cast<int>(std::floor(std::min({py[0], py[1], py[2]}) - 0.5)));
        const int r1 = std::min(resolution - 1, static_cast<int>(std::ceil(std::max({py[0], py[1], py[2]}) - 0.5)));
        for (int r = r0; r <= r1; ++r) {
            const double y = r + 0.5;
            for (int c = c0; c <= c1; ++c) {
                const double x = c + 0.5;
                const double w0 = s * ((px[1] - px[0]) * (y - py[0]) - (py[1] - py[0]) * (x - px[0]));
                const double w1 = s * ((px[2] - px[1]) * (y - py[1]) - (py[2] - py[1]) * (x - px[1]));
                const double w2 = s * ((px[0] - px[2]) * (y - py[2]) - (py[0] - py[2]) * (x - px[2]));
                if (w0 >= 0 && w1 >= 0 && w2 >= 0) img.bits[static_cast<std::size_t>(r) * resolution + c] = 1;
            }
        }
    }
    return img;
}

RadialContour radial_contour(const BinaryImage& img, int n_samples)
{
    if (n_samples < 32 || (n_samples & (n_samples - 1)) != 0)
        throw InvalidArgument("n_samples must be a power of two >= 32");
    double cx = 0.0, cy = 0.0;
    std::size_t count = 0;
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            if (img.at(c, r)) {
                cx += c + 0.5;
                cy += r + 0.5;
                ++count;
            }
    if (count == 0) throw EmptyImageError("silhouette has no occupied pixel");
    cx /= static_cast<double>(count);
    cy /= static_cast<double>(count);

    constexpr double inf = std::numeric_limits<double>::infinity();
    RadialContour out;
    out.r.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double th = 2.0 * std::numbers::pi * i / n_samples;
        const double dx = std::cos(th), dy = std::sin(th);
        // Grid traversal of every pixel the ray crosses.
        int ix = static_cast<int>(std::floor(cx)), iy = static_cast<int>(std::floor(cy));
        const int sx = dx > 0 ? 1 : -1, sy = dy > 0 ? 1 : -1;
        double tmx = dx > 0 ? (ix + 1 - cx) / dx : dx < 0 ? (cx - ix) / -dx : inf;
        double tmy = dy > 0 ? (iy + 1 - cy) / dy : dy < 0 ? (cy - iy) / -dy : inf;
        const double tdx = dx != 0 ? std::abs(1.0 / dx) : inf, tdy = dy != 0 ? std::abs(1.0 / dy) : inf;
        double last = 0.0;
        while (ix >= 0 && iy >= 0 && ix < img.width && iy < img.height) {
            if (img.at(ix, iy)) last = std::min(tmx, tmy);
            if (tmx < tmy) {
                ix += sx;
                tmx += tdx;
            } else {
                iy += sy;
                tmy += tdy;
            }
        }
        const double half_extent = 0.5 / std::max(std::abs(dx), std::abs(dy));
        out.r[i] = std::max(0.0, last - half_extent) * img.mm_per_pixel;
    }
    return out;
}

std::vector<double> fourier_descriptor(const RadialContour& contour, int n_modes, FourierMode mode)
{
    const int n = static_cast<int>(contour.r.size());
    if (n_modes < 1 || n_modes > n / 2)
        throw InvalidModeCountError("n_modes must be in [1, " + std::to_string(n / 2) + "], got " +
                                    std::to_string(n_modes));
    std::vector<double> out(n_modes);
    for (int k = 0; k < n_modes; ++k) {
        double re = 0.0, im = 0.0;
        for (int i = 0; i < n; ++i) {
            // Reduce the phase index exactly before converting to an angle.
            const double ang = 2.0 * std::numbers::pi * static_cast<double>((static_cast<long long>(i) * k) % n) / n;
            re += contour.r[i] * std::cos(ang);
            im -= contour.r[i] * std::sin(ang);
        }
        re /= n;
        im /= n;
        out[k] = mode == FourierMode::RealPart ? re : std::hypot(re, im);
    }
    return out;
}

SilhouetteFourierDescriptor silhouette_descriptor(const Mesh& mesh, const SilhouetteOptions& opts)
{
    SilhouetteFourierDescriptor out;
    out.subject_id = mesh.subject_id;
    out.pose = mesh.pose;
    for (View v : {View::Front, View::Side, View::Top}) {
        auto img = render_silhouette(mesh, v, opts.resolution);
        auto f = fourier_descriptor(radial_contour(img, opts.n_samples), opts.n_modes, opts.mode);
        out.f.insert(out.f.end(), f.begin(), f.end());
    }
    return out;
}

std::string silhouette_provenance(const SilhouetteOptions& opts)
{
    return "silhouette:res" + std::to_string(opts.resolution) + ":n" + std::to_string(opts.n_samples) + ":m" +
           std::to_string(opts.n_modes) + (opts.mode == FourierMode::RealPart ? ":real" : ":magnitude");
}

} // namespace anthro
