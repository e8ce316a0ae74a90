#pragma once

#include "anthro/kernels.hpp"
#include "anthro/metric.hpp"
#include "anthro/types.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace anthro {

struct DescriptorEntry {
    std::string subject_id;
    Pose pose = Pose::Standing;
    std::vector<double> vector;
};

/// One descriptor type over a population; entries are unique per
/// (subject_id, pose) and share one dimension.
class DescriptorSet {
public:
    DescriptorSet() = default;
    DescriptorSet(DescriptorType type, std::string provenance) : type_(type), provenance_(std::move(provenance)) {}

    DescriptorType type() const noexcept { return type_; }
    const std::string& provenance() const noexcept { return provenance_; }
    int dimension() const noexcept { return dim_; }
    const std::vector<DescriptorEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    /// Throws DimensionMismatchError or InvalidArgument (duplicate key).
    void add(DescriptorEntry e);
    const DescriptorEntry* find(const std::string& subject_id, Pose pose) const;
    DescriptorSet subset(Pose pose) const;
    std::vector<Pose> poses() const;
    RowMatrix matrix() const;

private:
    DescriptorType type_ = DescriptorType::Distance15;
    std::string provenance_;
    int dim_ = 0;
    std::vector<DescriptorEntry> entries_;
};

struct SimilarityMatrix {
    std::vector<std::string> ids; // subject ids, entry order
    std::vector<Pose> poses;
    Eigen::MatrixXd D;
};

/// Only FacePca sets accept a Mahalanobis metric.
void check_metric_compatible(DescriptorType t, const Metric& m);

/// Throws IncompatibleMetricError, InvalidArgument (empty set).
SimilarityMatrix build_similarity_matrix(const DescriptorSet& set, const Metric& m);

struct LoadedDescriptors {
    DescriptorSet set;
    std::vector<std::string> warnings; // version mismatches
};

/// JSON Lines, one object per entry:
/// {"subject_id","pose","type","dim","provenance","vector"}.
void save_descriptors(std::ostream& out, const DescriptorSet& set);
void save_descriptors(const std::filesystem::path& path, const DescriptorSet& set);

/// Throws ParseError (malformed line, mixed types or dimensions). A
/// provenance differing from `expected_provenance` yields a warning.
LoadedDescriptors load_descriptors(std::istream& in, const std::optional<std::string>& expected_provenance = {});
LoadedDescriptors load_descriptors(const std::filesystem::path& path,
                                   const std::optional<std::string>& expected_provenance = {});

} // namespace anthro
