#pragma once

#include "anthro/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anthro {

// Landmark ids. 1-8, 10 and 12 follow the CAESAR numbering; the remaining
// ids are this project's own registry for the body landmarks emitted by the
// synthetic generator.
namespace lm {
inline constexpr int Sellion = 1;
inline constexpr int RtInfraorbitale = 2;
inline constexpr int LtInfraorbitale = 3;
inline constexpr int Supramenton = 4;
inline constexpr int RtTragion = 5;
inline constexpr int RtGonion = 6;
inline constexpr int LtTragion = 7;
inline constexpr int LtGonion = 8;
inline constexpr int RtClavicale = 10;
inline constexpr int LtClavicale = 12;
inline constexpr int Suprasternale = 13;
inline constexpr int Cervicale = 14;
inline constexpr int RtAcromion = 15;
inline constexpr int LtAcromion = 16;
inline constexpr int RtWrist = 17;
inline constexpr int LtWrist = 18;
inline constexpr int RtElbow = 19;
inline constexpr int LtElbow = 20;
inline constexpr int RtTrochanterion = 21;
inline constexpr int LtTrochanterion = 22;
inline constexpr int RtKnee = 23;
inline constexpr int LtKnee = 24;
inline constexpr int RtAnkle = 25;
inline constexpr int LtAnkle = 26;
} // namespace lm

/// Registered name for a landmark id, or nullopt when the id is unknown.
std::optional<std::string_view> landmark_name(int id);
std::vector<int> registered_landmark_ids();

struct Landmark {
    std::string name;
    Vec3 position = Vec3::Zero();
};

struct LandmarkSet {
    std::string subject_id;
    Pose pose = Pose::Standing;
    std::map<int, Landmark> points;

    bool has(int id) const { return points.count(id) != 0; }
    /// Throws MissingLandmarkError.
    const Vec3& at(int id) const;
    /// Registers a point under the registry name; overwrites silently.
    void set(int id, const Vec3& p);
};

struct LandmarkFile {
    std::vector<LandmarkSet> sets; // one per (subject_id, pose), first-seen order
    std::vector<std::string> warnings;
};

inline constexpr std::string_view kLandmarkCsvHeader = "subject_id,pose,landmark_id,name,x_mm,y_mm,z_mm";

LandmarkFile parse_landmarks(std::istream& in);
LandmarkFile load_landmarks(const std::filesystem::path& path);
void write_landmarks(std::ostream& out, const std::vector<LandmarkSet>& sets);
void write_landmarks(const std::filesystem::path& path, const std::vector<LandmarkSet>& sets);

} // namespace anthro
