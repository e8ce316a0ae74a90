#include "anthro/errors.hpp"
#include "anthro/head_desc.hpp"
#include "anthro/synth.hpp"

#include "support.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <doctest.h>

using namespace anthro;

namespace {

const Dataset& population()
{
    static const Dataset ds = [] {
        SynthParams p;
        p.n_subjects = 4;
        p.seed = 21;
        p.landmark_noise_mm = 0;
        return synth_population(p);
    }();
    return ds;
}

LandmarkSet template_landmarks()
{
    LandmarkSet l;
    l.subject_id = "T";
    const auto t = canonical_face_template();
    l.set(lm::Sellion, t[0]);
    l.set(lm::RtInfraorbitale, t[1]);
    l.set(lm::LtInfraorbitale, t[2]);
    l.set(lm::Supramenton, t[3]);
    return l;
}

DepthGrid grid_from(const Eigen::VectorXd& v)
{
    DepthGrid g;
    for (int r = 0; r < kGridSize; ++r)
        for (int c = 0; c < kGridSize; ++c) g.z(r, c) = v(r * kGridSize + c);
    return g;
}

RowMatrix random_rows(int n, int d, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    RowMatrix X(n, d);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = g(rng);
    return X;
}

} // namespace

TEST_CASE("crop_face: keeps the face, drops the torso")
{
    const auto& r = population().records[0];
    const Mesh face = crop_face(r.mesh, r.landmarks);
    const double y10 = r.landmarks.at(lm::RtClavicale).y(), z5 = r.landmarks.at(lm::RtTragion).z();
    for (const auto& v : face.vertices) {
        CHECK(v.y() > y10);
        CHECK(v.z() > z5);
    }
    std::size_t kept_torso_below = 0;
    for (std::size_t i = 0; i < r.mesh.vertices.size(); ++i) {
        const Vec3& v = r.mesh.vertices[i];
        if (r.vertex_parts[i] == BodyPart::Torso && v.y() <= y10 && v.z() > z5) {
            for (const auto& f : face.vertices) kept_torso_below += f == v;
        }
    }
    CHECK(kept_torso_below == 0);
    Vec3 lo = face.vertices[0], hi = face.vertices[0];
    for (const auto& v : face.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    for (int id : {1, 2, 3, 4}) {
        const Vec3 p = r.landmarks.at(id);
        CHECK(p.y() > y10);
        CHECK(p.z() > z5);
        CHECK(((p.array() >= lo.array() - 5).all() && (p.array() <= hi.array() + 5).all()));
    }
}

TEST_CASE("crop_face: errors")
{
    const auto& r = population().records[0];
    LandmarkSet l = r.landmarks;
    l.points.erase(lm::RtClavicale);
    try {
        crop_face(r.mesh, l);
        FAIL("expected MissingLandmarkError");
    } catch (const MissingLandmarkError& e) {
        CHECK(e.landmark_id() == 10);
    }
    l = r.landmarks;
    l.set(lm::RtTragion, Vec3(0, 0, 1e6));
    CHECK_THROWS_AS(crop_face(r.mesh, l), EmptyCropError);
}

TEST_CASE("align_face: canonical pose is a fixed point")
{
    const Mesh patch = testing_support::height_field(80, 10, [](double, double) { return 100.0; });
    const auto a = align_face(patch, template_landmarks());
    CHECK(a.residual_mm < 1e-9);
    CHECK((a.transform.matrix() - Eigen::Matrix4d::Identity()).norm() < 1e-9);
}

TEST_CASE("align_face: undoes a random rigid motion")
{
    const auto& r = population().records[0];
    const Mesh face = crop_face(r.mesh, r.landmarks);
    const auto base = align_face(face, r.landmarks);
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
        T.linear() = testing_support::random_rotation(rng);
        T.translation() = Vec3(100, -300, 40) * (trial + 1);
        LandmarkSet moved = r.landmarks;
        for (auto& [id, p] : moved.points) p.position = T * p.position;
        const auto out = align_face(transformed(face, T), moved);
        double worst = 0;
        for (std::size_t i = 0; i < face.vertices.size(); ++i)
            worst = std::max(worst, (out.mesh.vertices[i] - base.mesh.vertices[i]).norm());
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("align_face: residual bounded by landmark perturbation")
{
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    LandmarkSet noisy = template_landmarks();
    const auto t = canonical_face_template();
    for (int trial = 0; trial < 100; ++trial) {
        for (int k = 0; k < 4; ++k) {
            const Vec3 dir = Vec3(g(rng), g(rng), g(rng)).normalized();
            noisy.set(k + 1, t[k] + 15.0 * dir);
        }
        const Mesh patch = testing_support::height_field(80, 4, [](double, double) { return 100.0; });
        CHECK(align_face(patch, noisy).residual_mm <= 15.0);
    }
}

TEST_CASE("align_face: collinear landmarks and idempotence")
{
    LandmarkSet l;
    for (int k = 1; k <= 4; ++k) l.set(k, Vec3(k, 2 * k, 3 * k));
    const Mesh patch = testing_support::height_field(80, 4, [](double, double) { return 0.0; });
    CHECK_THROWS_AS(align_face(patch, l), DegenerateConfigurationError);

    const auto& r = population().records[1];
    const auto once = align_face(crop_face(r.mesh, r.landmarks), r.landmarks);
    const auto twice = align_face(once.mesh, once.landmarks);
    double worst = 0;
    for (std::size_t i = 0; i < once.mesh.vertices.size(); ++i)
        worst = std::max(worst, (once.mesh.vertices[i] - twice.mesh.vertices[i]).norm());
    CHECK(worst < 1e-9);
}

TEST_CASE("resample_grid: plane")
{
    const Mesh plane = testing_support::height_field(100, 20, [](double, double) { return 0.0; });
    const DepthGrid g = resample_grid(plane, template_landmarks());
    CHECK(g.z.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.filled_cells() == 0);
    CHECK(g.scale_d == doctest::Approx(62.0));
}

TEST_CASE("resample_grid: paraboloid matches the analytic surface")
{
    auto f = [](double x, double y) { return (x * x + y * y) / 1000.0; };
    const Mesh patch = testing_support::height_field(100, 60, f);
    const DepthGrid g = resample_grid(patch, template_landmarks());
    const double half = 1.25 * 62.0, h = 2 * half / kGridSize;
    double worst = 0;
    for (int r = 1; r < kGridSize - 1; ++r)
        for (int c = 1; c < kGridSize - 1; ++c) {
            const double x = -half + (c + 0.5) * h, y = half - (r + 0.5) * h;
            worst = std::max(worst, std::abs(g.z(r, c) - f(x, y)));
        }
    CHECK(worst < 0.5);
    CHECK(g.filled_cells() == 0);
}

TEST_CASE("resample_grid: partial support")
{
    const double half = 1.25 * 62.0;
    // Covers x in [-half, -half + 0.6 * 2 half] and all y: 60% of the cells.
    Mesh ok = testing_support::height_field(half, 20, [](double, double) { return 1.0; });
    for (auto& v : ok.vertices) v.x() = -half + (v.x() + half) * 0.6;
    const DepthGrid g = resample_grid(ok, template_landmarks());
    CHECK(g.filled_cells() > 0);
    CHECK(g.z.minCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.z.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));

    Mesh thin = testing_support::height_field(half, 20, [](double, double) { return 1.0; });
    for (auto& v : thin.vertices) v.x() = -half + (v.x() + half) * 0.3;
    CHECK_THROWS_AS(resample_grid(thin, template_landmarks()), InsufficientSupportError);
}

TEST_CASE("face_depth_grid on synthetic subjects")
{
    for (const auto& r : population().records) {
        const DepthGrid g = face_depth_grid(r.mesh, r.landmarks);
        CHECK(g.z.allFinite());
        CHECK(static_cast<double>(g.filled_cells()) < 0.5 * kGridCells);
    }
}

TEST_CASE("pca: identical grids are rank deficient")
{
    std::vector<DepthGrid> grids(4, grid_from(Eigen::VectorXd::Constant(kGridCells, 3.0)));
    CHECK_THROWS_AS(train_pca(grids, 1), RankDeficientError);
}

TEST_CASE("pca: one-dimensional family")
{
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    Eigen::VectorXd mean(kGridCells), v(kGridCells);
    for (int i = 0; i < kGridCells; ++i) {
        mean(i) = g(rng);
        v(i) = g(rng);
    }
    std::vector<DepthGrid> grids;
    for (double a : {-1.0, 0.0, 1.0}) grids.push_back(grid_from(mean + a * v));
    const PcaModel m = train_pca(grids, 1);
    const Eigen::VectorXd c0 = m.components.row(0).transpose();
    CHECK(std::abs(c0.dot(v.normalized())) > 1 - 1e-9);
    // Sample variance of a*|v| over a in {-1, 0, 1}.
    CHECK(m.eigenvalues[0] == doctest::Approx(v.squaredNorm()).epsilon(1e-12));
    CHECK_FALSE(m.rank_warning);

    const PcaModel reduced = train_pca(grids, 2);
    CHECK(reduced.k() == 1);
    CHECK(reduced.rank_warning);
    grids.push_back(grid_from(mean + 2 * v));
    CHECK_THROWS_AS(train_pca(grids, 3), RankDeficientError);
}

TEST_CASE("pca: gram route equals the dense covariance on 12x12 grids")
{
    const RowMatrix X = random_rows(10, 144, 4) + RowMatrix::Constant(10, 144, 5.0);
    const PcaModel m = pca_fit(X, 5);
    const Eigen::MatrixXd C = m.components * m.components.transpose();
    CHECK((C - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);

    const Eigen::RowVectorXd mu = X.colwise().mean();
    const Eigen::MatrixXd Xc = X.rowwise() - mu;
    const Eigen::MatrixXd cov = Xc.transpose() * Xc / 9.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(cov);
    for (int i = 0; i < 5; ++i) {
        const double ref = dense.eigenvalues()(143 - i);
        CHECK(std::abs(m.eigenvalues[i] - ref) <= 1e-8 * ref);
    }
    for (int i = 1; i < 5; ++i) CHECK(m.eigenvalues[i] <= m.eigenvalues[i - 1]);
    const Eigen::MatrixXd U = dense.eigenvectors().rightCols(5);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(U.transpose() * m.components.transpose());
    for (int i = 0; i < 5; ++i) CHECK(std::acos(std::min(1.0, svd.singularValues()(i))) < 1e-6);
}

TEST_CASE("pca: projection and reconstruction")
{
    const RowMatrix X = random_rows(8, 200, 6);
    const PcaModel full = pca_fit(X, 7);
    CHECK(project_pca(full, full.mean).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::VectorXd x = full.mean + 2.5 * full.components.row(0).transpose();
    const Eigen::VectorXd c = project_pca(full, x);
    CHECK(std::abs(c(0) - 2.5) < 1e-9);
    for (int i = 1; i < 7; ++i) CHECK(std::abs(c(i)) < 1e-9);

    double prev = 1e300;
    for (int k = 1; k <= 7; ++k) {
        const PcaModel m = pca_fit(X, k);
        double ss = 0;
        for (int r = 0; r < 8; ++r) {
            const Eigen::VectorXd row = X.row(r).transpose();
            ss += (reconstruct_pca(m, project_pca(m, row)) - row).squaredNorm();
        }
        const double rms = std::sqrt(ss / (8.0 * 200));
        CHECK(rms <= prev + 1e-12);
        prev = rms;
    }
    CHECK(prev <= 1e-6);

    const Eigen::RowVectorXd mu = X.colwise().mean();
    const double total = (X.rowwise() - mu).squaredNorm() / 7.0;
    double sum = 0;
    for (double e : full.eigenvalues) sum += e;
    CHECK(sum == doctest::Approx(total).epsilon(1e-6));
    CHECK_THROWS_AS(project_pca(full, Eigen::VectorXd::Zero(3)), DimensionMismatchError);
}

TEST_CASE("pca: select_k and persistence")
{
    CHECK(select_k({5, 3, 1, 1}, 0.95, 40) == 4);
    CHECK(select_k({90, 6, 4}, 0.95, 40) == 2);
    CHECK(select_k({90, 6, 4}, 0.95, 1) == 1);

    const PcaModel m = pca_fit(random_rows(6, 50, 8), 3, "unit");
    const auto dir = testing_support::temp_dir("pca");
    save_pca_model(dir / "m.json", m);
    const PcaModel back = load_pca_model(dir / "m.json");
    CHECK(back.k() == 3);
    CHECK(back.mean == m.mean);
    CHECK(back.components == m.components);
    CHECK(back.eigenvalues == m.eigenvalues);
    CHECK(back.id() == "pca:unit:k3");
    std::filesystem::remove_all(dir);
}
