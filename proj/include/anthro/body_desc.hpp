#pragma once

#include "anthro/landmarks.hpp"
#include "anthro/mesh.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace anthro {

// ---------------------------------------------------------------------------
// Landmark distance descriptor

/// The 15 landmark pairs behind the distance descriptor. Each pair spans a
/// single long bone or a rigid bony breadth.
class PairSpec {
public:
    static constexpr std::size_t kSize = 15;
    using Pair = std::pair<int, int>;

    /// Throws InvalidArgument unless there are exactly 15 distinct pairs of
    /// distinct ids.
    PairSpec(std::vector<Pair> pairs, std::string version);

    /// L/R wrist-elbow, L/R elbow-acromion, L/R trochanterion-knee,
    /// L/R knee-ankle, biacromial, bitrochanteric, cervicale-suprasternale,
    /// L/R tragion-gonion, sellion-supramenton, tragion-tragion.
    static PairSpec default_spec();

    const std::vector<Pair>& pairs() const noexcept { return pairs_; }
    const std::string& version() const noexcept { return version_; }
    std::vector<int> landmark_ids() const; // sorted, unique

private:
    std::vector<Pair> pairs_;
    std::string version_;
};

/// CSV with header `index,landmark_id_a,landmark_id_b` and exactly 15 rows.
PairSpec load_pairspec(const std::filesystem::path& path, std::string version);
PairSpec parse_pairspec(std::istream& in, std::string version);
void write_pairspec(std::ostream& out, const PairSpec& spec);

struct BodyDistanceDescriptor {
    std::array<double, PairSpec::kSize> d{};
    std::string subject_id;
    Pose pose = Pose::Standing;
    std::string pairspec_version;
};

/// Throws MissingLandmarkError naming the landmark and the 0-based pair index.
BodyDistanceDescriptor distance_descriptor(const LandmarkSet& lms, const PairSpec& pairs);

// ---------------------------------------------------------------------------
// Silhouette Fourier descriptor

enum class View { Front, Side, Top };

/// Orthographic occupancy image. Pixel (col, row) covers
/// [origin_u + col*mm, origin_u + (col+1)*mm) horizontally and likewise for
/// rows along v; row 0 is the lowest v.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits; // row-major
    View view = View::Front;
    double mm_per_pixel = 1.0;
    double origin_u = 0.0;
    double origin_v = 0.0;

    bool at(int col, int row) const { return bits[static_cast<std::size_t>(row) * width + col] != 0; }
    std::size_t occupied() const;
};

/// Image-plane coordinates (u, v) of a point for a view: Front looks along
/// -Z and maps (x, y); Side looks along -X and maps (z, y); Top looks along
/// -Y and maps (x, z).
std::array<double, 2> project(const Vec3& p, View view);

/// Rasterizes every triangle (pixel-centre sampling) into a square
/// resolution x resolution image fitted to the projected bounding box with a
/// 5% margin. Throws EmptyMeshError, InvalidArgument (resolution < 64).
BinaryImage render_silhouette(const Mesh& mesh, View view, int resolution = 256);

struct RadialContour {
    std::vector<double> r; // mm, at theta_i = 2*pi*i/n about the area centroid
};

/// Farthest extent of the silhouette along each sampling ray from the
/// centroid of the occupied pixel centres. The silhouette is the union of
/// occupied pixel squares and the reported radius is that union's exit
/// distance minus the half-extent of one pixel along the ray, so a lone
/// pixel has radius 0 and a rasterized disk recovers its radius. Throws
/// EmptyImageError, InvalidArgument (n_samples not a power of two >= 32).
RadialContour radial_contour(const BinaryImage& img, int n_samples = 256);

enum class FourierMode { RealPart, Magnitude };

/// (1/n) * DFT of the radii, coefficients 0..n_modes-1; mode 0 is the mean
/// radius. Throws InvalidModeCountError unless n_modes <= n_samples / 2.
std::vector<double> fourier_descriptor(const RadialContour& contour, int n_modes = 16,
                                       FourierMode mode = FourierMode::RealPart);

struct SilhouetteOptions {
    int resolution = 256;
    int n_samples = 256;
    int n_modes = 16;
    FourierMode mode = FourierMode::RealPart;
};

struct SilhouetteFourierDescriptor {
    std::vector<double> f; // Front, Side, Top blocks of n_modes each
    std::string subject_id;
    Pose pose = Pose::Standing;
};

SilhouetteFourierDescriptor silhouette_descriptor(const Mesh& mesh, const SilhouetteOptions& opts = {});
std::string silhouette_provenance(const SilhouetteOptions& opts);

} // namespace anthro
