#pragma once

#include "anthro/clustering.hpp"
#include "anthro/landmarks.hpp"
#include "anthro/retrieval.hpp"
#include "anthro/simspace.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace anthro {

using Json = nlohmann::ordered_json;

/// One dataset directory as loaded for querying. Immutable once built.
struct DatasetEntry {
    using MatrixKey = std::tuple<DescriptorType, MetricKind, Pose>;

    std::string id;
    std::filesystem::path root;
    std::vector<LandmarkSet> landmarks;
    std::vector<std::string> subjects; // sorted, unique
    std::vector<Pose> poses;
    std::map<DescriptorType, DescriptorSet> descriptors;
    std::optional<std::vector<double>> pca_eigenvalues;
    std::vector<std::string> warnings;

    std::map<MatrixKey, SimilarityMatrix> matrices;
    std::map<MatrixKey, Dendrogram> average_trees;

    /// Throws NotFoundError (type not extracted).
    const DescriptorSet& descriptor_set(DescriptorType t) const;
    /// Throws IncompatibleMetricError, NotFoundError.
    Metric metric(DescriptorType t, MetricKind kind) const;
    /// Precomputed when available, otherwise built on the spot.
    SimilarityMatrix similarity(DescriptorType t, MetricKind kind, Pose pose) const;
    Dendrogram dendrogram(DescriptorType t, MetricKind kind, Pose pose, Linkage linkage) const;
};

/// Loads one dataset directory (landmarks.csv plus descriptors/*.jsonl).
/// Throws NotFoundError, ParseError, ValidationError.
DatasetEntry load_dataset_entry(const std::filesystem::path& dir, bool precompute = true);

class Catalog {
public:
    /// `root` is either a dataset directory or a directory of them.
    static Catalog open(const std::filesystem::path& root, bool precompute = true);

    const std::vector<DatasetEntry>& datasets() const noexcept { return datasets_; }
    /// Empty id selects the only dataset. Throws NotFoundError, InvalidArgument.
    const DatasetEntry& get(const std::string& id) const;

private:
    std::vector<DatasetEntry> datasets_;
};

struct QueryRequest {
    std::string dataset;
    DescriptorType type = DescriptorType::Distance15;
    MetricKind metric = MetricKind::L2;
    std::optional<std::string> subject_id;
    Pose pose = Pose::Standing;
    std::optional<std::vector<double>> vector;
    std::optional<Pose> gallery_pose; // defaults to `pose`
    int k = 5;

    /// Throws InvalidArgument.
    static QueryRequest from_json(const Json& j);
    void validate() const;
};

/// Shared by the CLI `query` command and POST /api/query.
RankedList run_query(const Catalog& cat, const QueryRequest& q);

Json ranked_list_json(const RankedList& r, const QueryRequest& q);
Json cmc_summary_json(const CmcCurve& c, MetricKind m, DescriptorType t);
Json cluster_json(const ClusterAssignment& a);

struct ApiRequest {
    std::string method = "GET";
    std::string path;
    std::multimap<std::string, std::string> params;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Routes one HTTP request; never throws. Errors are JSON
/// {"error":{"status","type","message"}} with status 400, 404, 405, 422 or 500.
ApiResponse handle_api(const Catalog& cat, const ApiRequest& req);

/// Listens on `bind` ("host:port", port 0 picks a free one) and serves
/// handle_api until stop() is called.
class HttpServer {
public:
    explicit HttpServer(const Catalog& cat);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and starts the listener thread; returns the bound port.
    /// Throws BindError.
    int start(const std::string& bind);
    void stop();
    void wait();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Blocks until SIGINT or SIGTERM, then shuts the server down.
void serve_until_signal(const Catalog& cat, const std::string& bind, const std::function<void(int port)>& on_ready);

} // namespace anthro
