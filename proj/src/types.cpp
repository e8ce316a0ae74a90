#include "anthro/types.hpp"

#include "anthro/errors.hpp"

#include <charconv>

namespace anthro {

std::string_view pose_name(Pose p)
{
    return p == Pose::Standing ? "standing" : "sitting";
}

Pose parse_pose(std::string_view s)
{
    if (s == "standing") return Pose::Standing;
    if (s == "sitting") return Pose::Sitting;
    throw InvalidArgument("unknown pose '" + std::string(s) + "' (expected standing|sitting)");
}

std::string_view descriptor_type_name(DescriptorType t)
{
    switch (t) {
    case DescriptorType::Distance15: return "distance15";
    case DescriptorType::Silhouette48: return "silhouette48";
    case DescriptorType::FacePca: return "face-pca";
    case DescriptorType::ShEnergy: return "sh-energy";
    }
    return "?";
}

DescriptorType parse_descriptor_type(std::string_view s)
{
    for (auto t : kAllDescriptorTypes)
        if (descriptor_type_name(t) == s) return t;
    throw InvalidArgument("unknown descriptor type '" + std::string(s) +
                          "' (expected distance15|silhouette48|face-pca|sh-energy)");
}

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool parse_double(std::string_view s, double& out)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

bool parse_int(std::string_view s, int& out)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return false;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

} // namespace anthro
