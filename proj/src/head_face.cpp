#include "anthro/head_desc.hpp"

#include "anthro/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace anthro {

std::array<Vec3, 4> canonical_face_template()
{
    // Mean synthetic face, origin slightly below eye level.
    return {Vec3(0.0, 28.0, 106.0), Vec3(-31.0, 12.0, 94.0), Vec3(31.0, 12.0, 94.0), Vec3(0.0, -78.0, 70.0)};
}

Eigen::VectorXd DepthGrid::flatten() const
{
    Eigen::VectorXd v(kGridCells);
    for (int r = 0; r < kGridSize; ++r)
        for (int c = 0; c < kGridSize; ++c) v(r * kGridSize + c) = z(r, c);
    return v;
}

Mesh crop_face(const Mesh& mesh, const LandmarkSet& lms)
{
    const double z_tragion = lms.at(lm::RtTragion).z();
    const double y_clav = lms.at(lm::RtClavicale).y();
    Mesh out = filter_vertices(mesh, [&](const Vec3& v, std::size_t) { return v.z() > z_tragion && v.y() > y_clav; });
    if (out.vertices.empty() || out.triangles.empty())
        throw EmptyCropError("face crop of " + mesh.subject_id + " is empty");
    return out;
}

AlignedFace align_face(const Mesh& face, const LandmarkSet& lms)
{
    constexpr int ids[4] = {lm::Sellion, lm::RtInfraorbitale, lm::LtInfraorbitale, lm::Supramenton};
    const auto tmpl = canonical_face_template();
    Eigen::Matrix<double, 3, 4> src, dst;
    for (int i = 0; i < 4; ++i) {
        src.col(i) = lms.at(ids[i]);
        dst.col(i) = tmpl[i];
    }
    const Vec3 sc = src.rowwise().mean(), dc = dst.rowwise().mean();
    const Eigen::Matrix<double, 3, 4> s0 = src.colwise() - sc, d0 = dst.colwise() - dc;

    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> shape(s0);
    const auto sv = shape.singularValues();
    if (!(sv(0) > 0) || sv(1) <= 1e-6 * sv(0))
        throw DegenerateConfigurationError("facial landmarks of " + lms.subject_id + " are collinear");

    const Eigen::Matrix3d H = s0 * d0.transpose();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
    if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0) D(2, 2) = -1.0;
    const Eigen::Matrix3d R = svd.matrixV() * D * svd.matrixU().transpose();

    AlignedFace out;
    out.transform = Eigen::Isometry3d::Identity();
    out.transform.linear() = R;
    out.transform.translation() = dc - R * sc;
    out.mesh = transformed(face, out.transform);
    out.landmarks = lms;
    for (auto& [id, l] : out.landmarks.points) l.position = out.transform * l.position;
    double ss = 0.0;
    for (int i = 0; i < 4; ++i) ss += (out.transform * Vec3(src.col(i)) - tmpl[i]).squaredNorm();
    out.residual_mm = std::sqrt(ss / 4.0);
    return out;
}

namespace {

// Vertex normals with every face normal flipped toward +Z.
std::vector<Vec3> upward_vertex_normals(const Mesh& m)
{
    std::vector<Vec3> n(m.vertices.size(), Vec3::Zero());
    for (const auto& t : m.triangles) {
        Vec3 fn = (m.vertices[t[1]] - m.vertices[t[0]]).cross(m.vertices[t[2]] - m.vertices[t[0]]);
        if (fn.z() < 0) fn = -fn;
        for (int k : t) n[k] += fn;
    }
    for (auto& v : n) {
        const double len = v.norm();
        v = len > 0 ? Vec3(v / len) : Vec3(0, 0, 0);
    }
    return n;
}

struct CubicTriangle {
    double x[3], y[3], z[3];
    bool linear = false;
    double b210, b201, b120, b021, b102, b012, b111;

    CubicTriangle(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& n0, const Vec3& n1, const Vec3& n2)
    {
        const Vec3* p[3] = {&p0, &p1, &p2};
        const Vec3* n[3] = {&n0, &n1, &n2};
        double gx[3], gy[3];
        for (int i = 0; i < 3; ++i) {
            x[i] = p[i]->x();
            y[i] = p[i]->y();
            z[i] = p[i]->z();
            if (n[i]->z() < 0.25) linear = true;
            gx[i] = linear ? 0.0 : -n[i]->x() / n[i]->z();
            gy[i] = linear ? 0.0 : -n[i]->y() / n[i]->z();
        }
        auto edge = [&](int i, int j) { return z[i] + (gx[i] * (x[j] - x[i]) + gy[i] * (y[j] - y[i])) / 3.0; };
        b210 = edge(0, 1);
        b201 = edge(0, 2);
        b120 = edge(1, 0);
        b021 = edge(1, 2);
        b102 = edge(2, 0);
        b012 = edge(2, 1);
        const double E = (b210 + b201 + b120 + b021 + b102 + b012) / 6.0;
        const double V = (z[0] + z[1] + z[2]) / 3.0;
        b111 = E + 0.5 * (E - V);
    }

    double eval(double u, double v, double w) const
    {
        if (linear) return u * z[0] + v * z[1] + w * z[2];
        return u * u * u * z[0] + v * v * v * z[1] + w * w * w * z[2] + 3 * u * u * v * b210 + 3 * u * u * w * b201 +
               3 * u * v * v * b120 + 3 * v * v * w * b021 + 3 * u * w * w * b102 + 3 * v * w * w * b012 +
               6 * u * v * w * b111;
    }
};

// Two-sweep nearest-seed propagation (8-neighbour), repeated until stable.
void fill_from_nearest(DepthGrid& g, const std::vector<char>& supported)
{
    const int N = kGridSize;
    std::vector<int> seed(kGridCells, -1);
    for (int i = 0; i < kGridCells; ++i)
        if (supported[i]) seed[i] = i;
    auto d2 = [N](int cell, int s) {
        const int dr = cell / N - s / N, dc = cell % N - s % N;
        return dr * dr + dc * dc;
    };
    auto relax = [&](int r, int c, int nr, int nc, bool& changed) {
        if (nr < 0 || nc < 0 || nr >= N || nc >= N) return;
        const int cell = r * N + c, s = seed[nr * N + nc];
        if (s < 0) return;
        if (seed[cell] < 0 || d2(cell, s) < d2(cell, seed[cell]) ||
            (d2(cell, s) == d2(cell, seed[cell]) && s < seed[cell])) {
            if (seed[cell] != s) {
                seed[cell] = s;
                changed = true;
            }
        }
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c) {
                relax(r, c, r - 1, c - 1, changed);
                relax(r, c, r - 1, c, changed);
                relax(r, c, r - 1, c + 1, changed);
                relax(r, c, r, c - 1, changed);
            }
        for (int r = N - 1; r >= 0; --r)
            for (int c = N - 1; c >= 0; --c) {
                relax(r, c, r + 1, c + 1, changed);
                relax(r, c, r + 1, c, changed);
                relax(r, c, r + 1, c - 1, changed);
                relax(r, c, r, c + 1, changed);
            }
    }
    for (int i = 0; i < kGridCells; ++i)
        if (!supported[i]) {
            g.z(i / N, i % N) = g.z(seed[i] / N, seed[i] % N);
            g.mask(i / N, i % N) = true;
        }
}

} // namespace

DepthGrid resample_grid(const Mesh& face, const LandmarkSet& lms, const FaceOptions& opts)
{
    const double d = (lms.at(lm::LtInfraorbitale) - lms.at(lm::RtInfraorbitale)).norm();
    if (!(d > 0)) throw DegenerateConfigurationError("infraorbitale landmarks coincide");
    const double half = opts.alpha * d;
    const double h = 2.0 * half / kGridSize;

    DepthGrid g;
    g.scale_d = d;
    g.subject_id = face.subject_id;
    g.pose = face.pose;
    constexpr double lowest = -std::numeric_limits<double>::infinity();
    g.z.setConstant(lowest);

    const auto normals = upward_vertex_normals(face);
    for (const auto& t : face.triangles) {
        const Vec3 &p0 = face.vertices[t[0]], &p1 = face.vertices[t[1]], &p2 = face.vertices[t[2]];
        const double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
        if (det == 0.0) continue;
        // Column c has x = -half + (c + 0.5) h; row r has y = half - (r + 0.5) h.
        const double xmin = std::min({p0.x(), p1.x(), p2.x()}), xmax = std::max({p0.x(), p1.x(), p2.x()});
        const double ymin = std::min({p0.y(), p1.y(), p2.y()}), ymax = std::max({p0.y(), p1.y(), p2.y()});
        const int c0 = std::max(0, static_cast<int>(std::ceil((xmin + half) / h - 0.5)));
        const int c1 = std::min(kGridSize - 1, static_cast<int>(std::floor((xmax + half) / h - 0.5)));
        const int r0 = std::max(0, static_cast<int>(std::ceil((half - ymax) / h - 0.5)));
        const int r1 = std::min(kGridSize - 1, static_cast<int>(std::floor((half - ymin) / h - 0.5)));
        if (c0 > c1 || r0 > r1) continue;
        const CubicTriangle patch(p0, p1, p2, normals[t[0]], normals[t[1]], normals[t[2]]);
        constexpr double eps = 1e-12;
        for (int r = r0; r <= r1; ++r) {
            const double y = half - (r + 0.5) * h;
            for (int c = c0; c <= c1; ++c) {
                const double x = -half + (c + 0.5) * h;
                const double v = ((x - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (y - p0.y())) / det;
                const double w = ((p1.x() - p0.x()) * (y - p0.y()) - (x - p0.x()) * (p1.y() - p0.y())) / det;
                const double u = 1.0 - v - w;
                if (u < -eps || v < -eps || w < -eps) continue;
                g.z(r, c) = std::max(g.z(r, c), patch.eval(u, v, w));
            }
        }
    }

    std::vector<char> supported(kGridCells);
    std::size_t n_supported = 0;
    for (int i = 0; i < kGridCells; ++i) {
        supported[i] = g.z(i / kGridSize, i % kGridSize) > lowest;
        n_supported += supported[i];
    }
    const double unsupported = 1.0 - static_cast<double>(n_supported) / kGridCells;
    if (unsupported > opts.max_unsupported)
        throw InsufficientSupportError("face grid of " + face.subject_id + ": " +
                                       std::to_string(static_cast<int>(std::round(unsupported * 100))) +
                                       "% of cells unsupported");
    fill_from_nearest(g, supported);
    return g;
}

DepthGrid face_depth_grid(const Mesh& mesh, const LandmarkSet& lms, const FaceOptions& opts)
{
    const Mesh face = crop_face(mesh, lms);
    const AlignedFace aligned = align_face(face, lms);
    return resample_grid(aligned.mesh, aligned.landmarks, opts);
}

} // namespace anthro
