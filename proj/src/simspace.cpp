#include "anthro/simspace.hpp"

#include "anthro/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>

namespace anthro {

void DescriptorSet::add(DescriptorEntry e)
{
    const int d = static_cast<int>(e.vector.size());
    if (entries_.empty())
        dim_ = d;
    else if (d != dim_)
        throw DimensionMismatchError("descriptor of " + e.subject_id + " has dimension " + std::to_string(d) +
                                     ", set has " + std::to_string(dim_));
    if (find(e.subject_id, e.pose))
        throw InvalidArgument("duplicate descriptor for " + e.subject_id + "/" + std::string(pose_name(e.pose)));
    entries_.push_back(std::move(e));
}

const DescriptorEntry* DescriptorSet::find(const std::string& subject_id, Pose pose) const
{
    for (const auto& e : entries_)
        if (e.subject_id == subject_id && e.pose == pose) return &e;
    return nullptr;
}

DescriptorSet DescriptorSet::subset(Pose pose) const
{
    DescriptorSet out(type_, provenance_);
    for (const auto& e : entries_)
        if (e.pose == pose) out.add(e);
    return out;
}

std::vector<Pose> DescriptorSet::poses() const
{
    std::set<Pose> p;
    for (const auto& e : entries_) p.insert(e.pose);
    return {p.begin(), p.end()};
}

RowMatrix DescriptorSet::matrix() const
{
    RowMatrix X(static_cast<Eigen::Index>(entries_.size()), dim_);
    for (std::size_t i = 0; i < entries_.size(); ++i)
        for (int j = 0; j < dim_; ++j) X(static_cast<Eigen::Index>(i), j) = entries_[i].vector[j];
    return X;
}

void check_metric_compatible(DescriptorType t, const Metric& m)
{
    if (m.kind == MetricKind::Mahalanobis && t != DescriptorType::FacePca)
        throw IncompatibleMetricError("Mahalanobis distance is only defined for face-pca descriptors, not " +
                                      std::string(descriptor_type_name(t)));
}

SimilarityMatrix build_similarity_matrix(const DescriptorSet& set, const Metric& m)
{
    check_metric_compatible(set.type(), m);
    if (set.empty()) throw InvalidArgument("cannot build a similarity matrix over an empty set");
    SimilarityMatrix s;
    for (const auto& e : set.entries()) {
        s.ids.push_back(e.subject_id);
        s.poses.push_back(e.pose);
    }
    s.D = par::pairwise_distances(set.matrix(), m);
    return s;
}

void save_descriptors(std::ostream& out, const DescriptorSet& set)
{
    for (const auto& e : set.entries()) {
        nlohmann::ordered_json j;
        j["subject_id"] = e.subject_id;
        j["pose"] = pose_name(e.pose);
        j["type"] = descriptor_type_name(set.type());
        j["dim"] = set.dimension();
        j["provenance"] = set.provenance();
        j["vector"] = e.vector;
        out << j.dump() << '\n';
    }
}

void save_descriptors(const std::filesystem::path& path, const DescriptorSet& set)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    save_descriptors(out, set);
}

LoadedDescriptors load_descriptors(std::istream& in, const std::optional<std::string>& expected_provenance)
{
    LoadedDescriptors out;
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    std::set<std::string> provenances;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        DescriptorEntry e;
        DescriptorType type;
        std::string prov;
        int dim = 0;
        try {
            const auto j = nlohmann::json::parse(line);
            e.subject_id = j.at("subject_id").get<std::string>();
            e.pose = parse_pose(j.at("pose").get<std::string>());
            type = parse_descriptor_type(j.at("type").get<std::string>());
            dim = j.at("dim").get<int>();
            prov = j.at("provenance").get<std::string>();
            e.vector = j.at("vector").get<std::vector<double>>();
        } catch (const nlohmann::json::exception& ex) {
            throw ParseError(ex.what(), lineno);
        } catch (const InvalidArgument& ex) {
            throw ParseError(ex.what(), lineno);
        }
        if (static_cast<int>(e.vector.size()) != dim)
            throw ParseError("subject " + e.subject_id + ": vector length " + std::to_string(e.vector.size()) +
                             " differs from declared dim " + std::to_string(dim), lineno);
        if (first) {
            out.set = DescriptorSet(type, prov);
            first = false;
        } else if (type != out.set.type()) {
            throw ParseError("subject " + e.subject_id + ": mixed descriptor types in one file", lineno);
        }
        if (provenances.insert(prov).second && expected_provenance && prov != *expected_provenance)
            out.warnings.push_back("VersionMismatchWarning: descriptors produced under '" + prov +
                                   "', current configuration is '" + *expected_provenance + "'");
        const std::string subject = e.subject_id;
        try {
            out.set.add(std::move(e));
        } catch (const DimensionMismatchError&) {
            throw ParseError("subject " + subject + ": dimension " + std::to_string(dim) +
                             " differs from the file's dimension " + std::to_string(out.set.dimension()), lineno);
        } catch (const InvalidArgument& ex) {
            throw ParseError(ex.what(), lineno);
        }
    }
    return out;
}

LoadedDescriptors load_descriptors(const std::filesystem::path& path,
                                   const std::optional<std::string>& expected_provenance)
{
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open descriptor file " + path.string());
    return load_descriptors(in, expected_provenance);
}

} // namespace anthro
