#pragma once

#include "anthro/body_desc.hpp"
#include "anthro/landmarks.hpp"
#include "anthro/mesh.hpp"

#include <map>
#include <string>
#include <vector>

namespace anthro {

enum class CheckStatus { Pass, AtRisk, Fail };

std::string_view check_status_name(CheckStatus s);

struct DescriptorCheck {
    CheckStatus status = CheckStatus::Pass;
    std::vector<std::string> reasons;
};

struct ValidationOptions {
    std::size_t min_face_vertices = 500;
    double min_head_coverage = 0.7;
    double neck_margin_mm = 40.0;
};

struct ValidationReport {
    std::string subject_id;
    Pose pose = Pose::Standing;
    std::map<DescriptorType, std::vector<int>> missing_landmarks;
    std::map<DescriptorType, DescriptorCheck> checks;
    std::size_t face_vertex_count = 0;
    double head_coverage = 0.0;

    bool passes(DescriptorType t) const { return checks.at(t).status != CheckStatus::Fail; }
};

/// Landmark ids each descriptor pipeline reads.
std::vector<int> required_landmarks(DescriptorType t, const PairSpec& pairs = PairSpec::default_spec());

/// Never throws for data problems; every finding lands in the report.
/// Throws InvalidArgument when mesh and landmarks disagree on subject/pose.
ValidationReport validate_subject(const Mesh& mesh, const LandmarkSet& lms, const ValidationOptions& opts = {},
                                  const PairSpec& pairs = PairSpec::default_spec());

} // namespace anthro
