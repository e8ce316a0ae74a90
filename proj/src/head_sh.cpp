#include "anthro/head_desc.hpp"

#include "anthro/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>

namespace anthro {

Eigen::VectorXd sh_basis(const Vec3& u, int lmax)
{
    const double ct = std::clamp(u.z(), -1.0, 1.0);
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double phi = std::atan2(u.y(), u.x());

    // Fully normalised associated Legendre functions pbar(l, m), including
    // the sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) factor.
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(lmax + 1, lmax + 1);
    p(0, 0) = 1.0 / std::sqrt(4.0 * std::numbers::pi);
    for (int m = 1; m <= lmax; ++m) p(m, m) = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * p(m - 1, m - 1);
    for (int m = 0; m < lmax; ++m) p(m + 1, m) = std::sqrt(2.0 * m + 3.0) * ct * p(m, m);
    for (int m = 0; m <= lmax; ++m)
        for (int l = m + 2; l <= lmax; ++l) {
            const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
            const double b = std::sqrt((static_cast<double>(l - 1) * (l - 1) - static_cast<double>(m) * m) /
                                       (4.0 * (l - 1) * (l - 1) - 1.0));
            p(l, m) = a * (ct * p(l - 1, m) - b * p(l - 2, m));
        }

    Eigen::VectorXd y(sh_count(lmax));
    for (int l = 0; l <= lmax; ++l) {
        y(sh_index(l, 0)) = p(l, 0);
        for (int m = 1; m <= l; ++m) {
            y(sh_index(l, m)) = std::numbers::sqrt2 * p(l, m) * std::cos(m * phi);
            y(sh_index(l, -m)) = std::numbers::sqrt2 * p(l, m) * std::sin(m * phi);
        }
    }
    return y;
}

ShCoefficients fit_radial_function(const std::vector<Vec3>& directions, const std::vector<double>& radii, int lmax,
                                   double lambda, const ShFitOptions& opts)
{
    if (lmax < 0) throw InvalidArgument("lmax must be >= 0");
    if (!(lambda >= 0)) throw InvalidArgument("lambda must be >= 0");
    if (directions.size() != radii.size()) throw DimensionMismatchError("direction and radius counts differ");
    if (directions.empty()) throw EmptyMeshError("no samples to fit");

    const int M = sh_count(lmax);
    const auto N = static_cast<Eigen::Index>(directions.size());
    RowMatrix A(N, M);
    Eigen::VectorXd b(N);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < N; ++i) {
        A.row(i) = sh_basis(directions[i], lmax).transpose();
        b(i) = radii[i];
    }

    Eigen::MatrixXd AtA;
    Eigen::VectorXd Atb;
    par::normal_equations(A, b, AtA, Atb);
    for (int l = 0; l <= lmax; ++l) {
        const double w = lambda * l * l * (l + 1.0) * (l + 1.0);
        for (int m = -l; m <= l; ++m) AtA(sh_index(l, m), sh_index(l, m)) += w;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(AtA);
    const double emax = eig.eigenvalues().maxCoeff();
    const double emin = eig.eigenvalues().minCoeff();
    const double rank_tol = emax * M * std::numeric_limits<double>::epsilon();

    ShCoefficients out;
    out.lmax = lmax;
    if (emin <= rank_tol) {
        if (lambda == 0.0)
            throw SingularSystemError("spherical-harmonic normal matrix is rank deficient (lmax=" +
                                      std::to_string(lmax) + ", samples=" + std::to_string(N) + ")");
        out.condition = std::numeric_limits<double>::infinity();
    } else {
        out.condition = emax / emin;
    }

    // Solve in the eigenbasis, zeroing near-null directions.
    Eigen::VectorXd proj = eig.eigenvectors().transpose() * Atb;
    for (Eigen::Index i = 0; i < proj.size(); ++i) {
        const double e = eig.eigenvalues()(i);
        proj(i) = e > rank_tol ? proj(i) / e : 0.0;
    }
    out.c = eig.eigenvectors() * proj;

    const Eigen::VectorXd res = A * out.c - b;
    out.residual_rms = std::sqrt(res.squaredNorm() / static_cast<double>(N));
    const double mean_r = b.mean();
    out.converged = out.condition <= opts.max_condition && std::isfinite(out.residual_rms) &&
                    out.residual_rms <= opts.max_relative_residual * std::abs(mean_r);
    return out;
}

ShCoefficients spherical_fit(const Mesh& head, int lmax, double lambda, const ShFitOptions& opts)
{
    if (head.vertices.empty()) throw EmptyMeshError("cannot fit an empty head mesh");
    const Vec3 c = centroid(head);
    std::vector<Vec3> dirs;
    std::vector<double> radii;
    dirs.reserve(head.vertices.size());
    radii.reserve(head.vertices.size());
    for (const auto& v : head.vertices) {
        const Vec3 d = v - c;
        const double r = d.norm();
        if (r == 0.0) continue;
        dirs.push_back(d / r);
        radii.push_back(r);
    }
    if (dirs.empty()) throw EmptyMeshError("head mesh collapses to its centroid");
    return fit_radial_function(dirs, radii, lmax, lambda, opts);
}

Mesh crop_head(const Mesh& mesh, const LandmarkSet& lms, double neck_margin_mm)
{
    const double cut = lms.at(lm::RtClavicale).y() + neck_margin_mm;
    Mesh out = filter_vertices(mesh, [cut](const Vec3& v, std::size_t) { return v.y() > cut; });
    if (out.vertices.empty()) throw EmptyCropError("head crop of " + mesh.subject_id + " is empty");
    return out;
}

double angular_coverage(const Mesh& head, int bands, int sectors)
{
    if (head.vertices.empty()) return 0.0;
    return angular_coverage(head, centroid(head), bands, sectors);
}

double angular_coverage(const Mesh& head, const Vec3& c, int bands, int sectors)
{
    if (head.vertices.empty()) return 0.0;
    std::vector<char> hit(static_cast<std::size_t>(bands) * sectors, 0);
    for (const auto& v : head.vertices) {
        const Vec3 d = v - c;
        const double r = d.norm();
        if (r == 0.0) continue;
        // Equal-area bands in cos(theta) about +Y.
        const double ct = std::clamp(d.y() / r, -1.0, 1.0);
        const int band = std::min(bands - 1, static_cast<int>((1.0 - ct) / 2.0 * bands));
        const double phi = std::atan2(d.x(), d.z()) + std::numbers::pi;
        const int sector = std::min(sectors - 1, static_cast<int>(phi / (2.0 * std::numbers::pi) * sectors));
        hit[static_cast<std::size_t>(band) * sectors + sector] = 1;
    }
    std::size_t n = 0;
    for (char h : hit) n += h;
    return static_cast<double>(n) / static_cast<double>(hit.size());
}

ShDescriptor sh_descriptor(const ShCoefficients& coeffs)
{
    if (!coeffs.converged)
        throw NotConvergedError("spherical-harmonic fit did not converge (condition " +
                                std::to_string(coeffs.condition) + ", residual " +
                                std::to_string(coeffs.residual_rms) + " mm)");
    ShDescriptor out;
    for (int l = 0; l <= coeffs.lmax; ++l) {
        double s = 0.0;
        for (int m = -l; m <= l; ++m) s += coeffs.c(sh_index(l, m)) * coeffs.c(sh_index(l, m));
        out.e.push_back(std::sqrt(s));
    }
    return out;
}

} // namespace anthro
