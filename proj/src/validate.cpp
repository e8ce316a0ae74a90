#include "anthro/validate.hpp"

#include "anthro/errors.hpp"
#include "anthro/head_desc.hpp"

namespace anthro {

std::string_view check_status_name(CheckStatus s)
{
    switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::AtRisk: return "at-risk";
    case CheckStatus::Fail: return "fail";
    }
    return "?";
}

std::vector<int> required_landmarks(DescriptorType t, const PairSpec& pairs)
{
    switch (t) {
    case DescriptorType::Distance15: return pairs.landmark_ids();
    case DescriptorType::Silhouette48: return {};
    case DescriptorType::FacePca:
        return {lm::Sellion, lm::RtInfraorbitale, lm::LtInfraorbitale, lm::Supramenton, lm::RtTragion,
                lm::RtClavicale};
    case DescriptorType::ShEnergy: return {lm::RtClavicale};
    }
    return {};
}

ValidationReport validate_subject(const Mesh& mesh, const LandmarkSet& lms, const ValidationOptions& opts,
                                  const PairSpec& pairs)
{
    if (mesh.subject_id != lms.subject_id || mesh.pose != lms.pose)
        throw InvalidArgument("mesh and landmarks belong to different subject/pose");
    ValidationReport rep;
    rep.subject_id = mesh.subject_id;
    rep.pose = mesh.pose;

    for (auto t : kAllDescriptorTypes) {
        auto& check = rep.checks[t];
        auto& missing = rep.missing_landmarks[t];
        for (int id : required_landmarks(t, pairs))
            if (!lms.has(id)) {
                missing.push_back(id);
                auto name = landmark_name(id);
                check.status = CheckStatus::Fail;
                check.reasons.push_back("missing " + (name ? std::string(*name) : "landmark " + std::to_string(id)));
            }
    }

    if (mesh.triangles.empty()) {
        for (auto t : kAllDescriptorTypes)
            if (t != DescriptorType::Distance15) {
                rep.checks[t].status = CheckStatus::Fail;
                rep.checks[t].reasons.push_back("mesh has no triangles");
            }
        return rep;
    }

    auto& face = rep.checks[DescriptorType::FacePca];
    if (face.status != CheckStatus::Fail) {
        try {
            const Mesh patch = crop_face(mesh, lms);
            rep.face_vertex_count = patch.vertices.size();
            if (rep.face_vertex_count < opts.min_face_vertices) {
                face.status = CheckStatus::Fail;
                face.reasons.push_back("face patch has " + std::to_string(rep.face_vertex_count) +
                                       " vertices (< " + std::to_string(opts.min_face_vertices) + ")");
            }
        } catch (const DataError& e) {
            face.status = CheckStatus::Fail;
            face.reasons.push_back(std::string("face crop: ") + e.what());
        }
    }

    auto& sh = rep.checks[DescriptorType::ShEnergy];
    if (sh.status != CheckStatus::Fail) {
        try {
            const Mesh head = crop_head(mesh, lms, opts.neck_margin_mm);
            const Vec3 centre = lms.has(lm::RtTragion) && lms.has(lm::LtTragion)
                                    ? Vec3(0.5 * (lms.at(lm::RtTragion) + lms.at(lm::LtTragion)))
                                    : centroid(head);
            rep.head_coverage = angular_coverage(head, centre);
            if (rep.head_coverage < opts.min_head_coverage) {
                sh.status = CheckStatus::AtRisk;
                sh.reasons.push_back("at-risk: low coverage");
            }
        } catch (const DataError& e) {
            sh.status = CheckStatus::Fail;
            sh.reasons.push_back(std::string("head crop: ") + e.what());
        }
    }
    return rep;
}

} // namespace anthro
