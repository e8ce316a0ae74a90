#pragma once

#include "anthro/landmarks.hpp"
#include "anthro/mesh.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace anthro {

/// Coarse anatomical label carried per vertex by generated meshes. Meshes
/// loaded from disk carry no labels.
enum class BodyPart : std::uint8_t { Head, Neck, Torso, Arm, Leg };

/// One subject in one pose.
struct SubjectRecord {
    Mesh mesh;
    LandmarkSet landmarks;
    std::vector<BodyPart> vertex_parts; // empty, or one per mesh vertex
};

struct Dataset {
    std::vector<SubjectRecord> records;

    const SubjectRecord* find(const std::string& subject_id, Pose pose) const;
    std::vector<std::string> subject_ids() const; // sorted, unique
    std::vector<Pose> poses() const;               // sorted, unique
};

/// Writes `<dir>/<subject>/<pose>.obj` for every record plus one
/// `<dir>/landmarks.csv`.
void write_dataset(const std::filesystem::path& dir, const Dataset& ds);

/// Reads a directory produced by write_dataset. Records are ordered as the
/// landmark groups appear in landmarks.csv. Landmark warnings are appended to
/// `warnings` when given.
Dataset load_dataset(const std::filesystem::path& dir, std::vector<std::string>* warnings = nullptr);

/// Landmarks only, without reading any mesh.
std::vector<LandmarkSet> load_dataset_landmarks(const std::filesystem::path& dir);

std::filesystem::path mesh_path(const std::filesystem::path& dir, const std::string& subject, Pose pose);

} // namespace anthro
