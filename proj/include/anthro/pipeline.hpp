#pragma once

#include "anthro/body_desc.hpp"
#include "anthro/dataset.hpp"
#include "anthro/head_desc.hpp"
#include "anthro/simspace.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace anthro {

struct ExtractOptions {
    PairSpec pairs = PairSpec::default_spec();
    SilhouetteOptions silhouette;
    FaceOptions face;
    int pca_k = 0; // 0 picks k from the explained-variance rule
    Pose pca_training_pose = Pose::Standing;
    int lmax = 10;
    double lambda = 1e-6;
    double neck_margin_mm = 40.0;
};

struct ExtractFailure {
    std::string subject_id;
    Pose pose = Pose::Standing;
    std::string message;
};

struct ExtractResult {
    DescriptorSet set;
    std::vector<ExtractFailure> failures;
    std::optional<PcaModel> model; // face-pca only
};

/// Provenance tag written next to every vector of a type.
std::string descriptor_provenance(DescriptorType t, const ExtractOptions& opts, const PcaModel* model = nullptr);

/// Runs one pipeline over every record; records run in parallel. A record
/// whose pipeline throws a DataError is reported in `failures` and skipped.
ExtractResult extract_descriptors(const Dataset& ds, DescriptorType t, const ExtractOptions& opts = {});

std::filesystem::path descriptor_path(const std::filesystem::path& dataset_dir, DescriptorType t);
std::filesystem::path pca_model_path(const std::filesystem::path& dataset_dir);

/// Writes the descriptor file (and the PCA model for face-pca).
void save_extraction(const std::filesystem::path& dataset_dir, const ExtractResult& r);

/// Metric for a stored descriptor type; Mahalanobis reads the eigenvalues of
/// the dataset's PCA model. Throws IncompatibleMetricError, NotFoundError.
Metric resolve_metric(const std::filesystem::path& dataset_dir, DescriptorType t, MetricKind kind);

} // namespace anthro
