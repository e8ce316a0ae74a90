#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <string_view>

namespace anthro {

// Canonical frame, shared by every module: +Y up, +Z toward the subject's
// front, +X toward the subject's left, origin midway between the hip
// landmarks. Lengths are millimetres.
using Vec3 = Eigen::Vector3d;

enum class Pose { Standing, Sitting };

std::string_view pose_name(Pose p);
Pose parse_pose(std::string_view s); // throws InvalidArgument

enum class DescriptorType { Distance15, Silhouette48, FacePca, ShEnergy };

inline constexpr std::array<DescriptorType, 4> kAllDescriptorTypes = {
    DescriptorType::Distance15, DescriptorType::Silhouette48,
    DescriptorType::FacePca, DescriptorType::ShEnergy};

std::string_view descriptor_type_name(DescriptorType t);
DescriptorType parse_descriptor_type(std::string_view s); // throws InvalidArgument

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Strict full-string number parsing; returns false on trailing garbage.
bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, int& out);

} // namespace anthro
