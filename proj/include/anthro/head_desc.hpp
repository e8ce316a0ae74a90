#pragma once

#include "anthro/kernels.hpp"
#include "anthro/landmarks.hpp"
#include "anthro/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace anthro {

// ===========================================================================
// Facial depth grid + PCA

inline constexpr int kGridSize = 128;
inline constexpr int kGridCells = kGridSize * kGridSize;

/// Landmark positions of the canonical face frame the four facial landmarks
/// (Sellion, Rt/Lt Infraorbitale, Supramenton) are registered onto.
std::array<Vec3, 4> canonical_face_template();

struct FaceOptions {
    double alpha = 1.25;          // grid half-width in units of |L3 - L2|
    double max_unsupported = 0.5; // fraction of cells allowed to need fallback
};

/// Depth z(x, y) of the aligned face on a 128 x 128 lattice spanning
/// [-alpha*d, alpha*d]^2. Row 0 is the top (largest y); column 0 is the
/// smallest x. Cell centres sit at half-cell offsets from the borders.
struct DepthGrid {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(kGridSize, kGridSize);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(kGridSize, kGridSize, false);
    double scale_d = 1.0;
    std::string subject_id;
    Pose pose = Pose::Standing;

    /// Row-major flattening used by the PCA model.
    Eigen::VectorXd flatten() const;
    std::size_t filled_cells() const { return static_cast<std::size_t>(mask.count()); }
};

/// Keeps vertices in front of the coronal plane through Rt Tragion and above
/// the transverse plane through Rt Clavicale. Throws MissingLandmarkError,
/// EmptyCropError.
Mesh crop_face(const Mesh& mesh, const LandmarkSet& lms);

struct AlignedFace {
    Mesh mesh;
    LandmarkSet landmarks; // every landmark, mapped by the same transform
    Eigen::Isometry3d transform = Eigen::Isometry3d::Identity();
    double residual_mm = 0.0; // RMS over the four registration landmarks
};

/// Closed-form least-squares rigid registration (no scale) of landmarks
/// 1-4 onto canonical_face_template(). Throws MissingLandmarkError,
/// DegenerateConfigurationError.
AlignedFace align_face(const Mesh& face, const LandmarkSet& lms);

/// Samples the front-most surface over the lattice with a piecewise-cubic
/// (quadratic-precision cubic Bezier triangle) interpolant built from vertex
/// values and normal-derived gradients; unsupported cells copy the nearest
/// supported cell and are flagged in `mask`. Throws MissingLandmarkError,
/// InsufficientSupportError.
DepthGrid resample_grid(const Mesh& face, const LandmarkSet& lms, const FaceOptions& opts = {});

/// crop -> align -> resample.
DepthGrid face_depth_grid(const Mesh& mesh, const LandmarkSet& lms, const FaceOptions& opts = {});

struct PcaModel {
    Eigen::VectorXd mean;
    RowMatrix components; // k x dim, orthonormal rows
    std::vector<double> eigenvalues; // k, non-increasing, > 0
    std::vector<double> discarded_eigenvalues; // the rest of the spectrum
    std::string training_id;
    double alpha = 1.25;
    bool rank_warning = false; // k was reduced by one to the numerical rank

    int k() const { return static_cast<int>(components.rows()); }
    int dim() const { return static_cast<int>(mean.size()); }
    std::string id() const;
};

/// PCA of the rows of `samples` through the n x n Gram matrix of the
/// centred data (sample covariance, 1/(n-1)). Throws InvalidArgument,
/// RankDeficientError.
PcaModel pca_fit(const RowMatrix& samples, int k, std::string training_id = {});

/// Smallest k whose leading eigenvalues explain `fraction` of the total, capped.
int select_k(const std::vector<double>& eigenvalues_desc, double fraction = 0.95, int cap = 40);

PcaModel train_pca(const std::vector<DepthGrid>& grids, int k, std::string training_id = {});
/// k chosen by select_k over the full spectrum.
PcaModel train_pca_auto(const std::vector<DepthGrid>& grids, double fraction = 0.95, int cap = 40,
                        std::string training_id = {});

/// components * (x - mean). Throws DimensionMismatchError.
Eigen::VectorXd project_pca(const PcaModel& model, const Eigen::VectorXd& x);

struct FacePcaDescriptor {
    std::vector<double> coeffs;
    std::string subject_id;
    Pose pose = Pose::Standing;
    std::string model_id;
};

FacePcaDescriptor project_pca(const PcaModel& model, const DepthGrid& grid);
Eigen::VectorXd reconstruct_pca(const PcaModel& model, const Eigen::VectorXd& coeffs);

/// JSON header at `json_path`; mean then components as little-endian f64 in
/// a sidecar `<json_path>.bin`.
void save_pca_model(const std::filesystem::path& json_path, const PcaModel& model);
PcaModel load_pca_model(const std::filesystem::path& json_path);

// ===========================================================================
// Spherical harmonics

inline int sh_count(int lmax) { return (lmax + 1) * (lmax + 1); }
inline int sh_index(int l, int m) { return l * (l + 1) + m; }

/// Real orthonormal spherical harmonics Y_lm, 0 <= l <= lmax, at the unit
/// direction u, stored at sh_index(l, m). theta is measured from +Z.
Eigen::VectorXd sh_basis(const Vec3& u, int lmax);

struct ShFitOptions {
    double max_condition = 1e12;
    double max_relative_residual = 0.2; // residual_rms / mean radius
};

struct ShCoefficients {
    Eigen::VectorXd c; // real coefficients, sh_index layout
    int lmax = 0;
    double residual_rms = 0.0;
    double condition = 1.0;
    bool converged = false;
};

/// Regularised least squares
///   min_c sum_v (r_v - sum c_lm Y_lm(u_v))^2 + lambda * sum l^2 (l+1)^2 c_lm^2.
/// Throws SingularSystemError when lambda == 0 and the normal matrix is
/// numerically rank deficient.
ShCoefficients fit_radial_function(const std::vector<Vec3>& directions, const std::vector<double>& radii, int lmax,
                                   double lambda, const ShFitOptions& opts = {});

/// Radial expansion about the vertex centroid. Throws EmptyMeshError.
ShCoefficients spherical_fit(const Mesh& head, int lmax = 10, double lambda = 1e-6, const ShFitOptions& opts = {});

/// Vertices above Rt Clavicale raised by `neck_margin_mm`. Throws
/// MissingLandmarkError, EmptyCropError.
Mesh crop_head(const Mesh& mesh, const LandmarkSet& lms, double neck_margin_mm = 40.0);

/// Fraction of equal-area direction bins around the vertex centroid that
/// hold at least one vertex.
double angular_coverage(const Mesh& head, int bands = 16, int sectors = 32);
/// Same, about an explicit centre.
double angular_coverage(const Mesh& head, const Vec3& centre, int bands = 16, int sectors = 32);

struct ShDescriptor {
    std::vector<double> e; // per-degree energy sqrt(sum_m c_lm^2), mm
    std::string subject_id;
    Pose pose = Pose::Standing;
};

/// Throws NotConvergedError.
ShDescriptor sh_descriptor(const ShCoefficients& coeffs);

} // namespace anthro
