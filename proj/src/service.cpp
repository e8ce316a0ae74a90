#include "anthro/service.hpp"

#include "anthro/dataset.hpp"
#include "anthro/errors.hpp"
#include "anthro/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace anthro {

// ---------------------------------------------------------------------------
// Dataset entries

const DescriptorSet& DatasetEntry::descriptor_set(DescriptorType t) const
{
    auto it = descriptors.find(t);
    if (it == descriptors.end())
        throw NotFoundError("dataset '" + id + "' has no " + std::string(descriptor_type_name(t)) + " descriptors");
    return it->second;
}

Metric DatasetEntry::metric(DescriptorType t, MetricKind kind) const
{
    switch (kind) {
    case MetricKind::L1: return Metric::l1();
    case MetricKind::L2: return Metric::l2();
    case MetricKind::Mahalanobis: break;
    }
    check_metric_compatible(t, Metric{MetricKind::Mahalanobis, {}});
    if (!pca_eigenvalues) throw NotFoundError("dataset '" + id + "' has no PCA model");
    return Metric::mahalanobis(*pca_eigenvalues);
}

SimilarityMatrix DatasetEntry::similarity(DescriptorType t, MetricKind kind, Pose pose) const
{
    if (auto it = matrices.find({t, kind, pose}); it != matrices.end()) return it->second;
    const DescriptorSet sub = descriptor_set(t).subset(pose);
    if (sub.empty())
        throw NotFoundError("dataset '" + id + "' has no " + std::string(pose_name(pose)) + " " +
                            std::string(descriptor_type_name(t)) + " descriptors");
    return build_similarity_matrix(sub, metric(t, kind));
}

Dendrogram DatasetEntry::dendrogram(DescriptorType t, MetricKind kind, Pose pose, Linkage linkage) const
{
    if (linkage == Linkage::Average)
        if (auto it = average_trees.find({t, kind, pose}); it != average_trees.end()) return it->second;
    return agglomerate(similarity(t, kind, pose), linkage);
}

namespace {

std::optional<std::string> expected_provenance(DescriptorType t)
{
    if (t == DescriptorType::FacePca) return std::nullopt;
    return descriptor_provenance(t, ExtractOptions{});
}

} // namespace

DatasetEntry load_dataset_entry(const std::filesystem::path& dir, bool precompute)
{
    DatasetEntry e;
    e.root = dir;
    e.id = std::filesystem::absolute(dir).lexically_normal().filename().string();
    if (e.id.empty()) e.id = std::filesystem::absolute(dir).lexically_normal().parent_path().filename().string();
    e.landmarks = load_dataset_landmarks(dir);
    std::set<std::string> ids;
    std::set<Pose> poses;
    for (const auto& l : e.landmarks) {
        ids.insert(l.subject_id);
        poses.insert(l.pose);
    }
    e.subjects.assign(ids.begin(), ids.end());
    e.poses.assign(poses.begin(), poses.end());

    for (DescriptorType t : kAllDescriptorTypes) {
        const auto path = descriptor_path(dir, t);
        if (!std::filesystem::exists(path)) continue;
        auto loaded = load_descriptors(path, expected_provenance(t));
        if (loaded.set.type() != t)
            throw ParseError(path.string() + " holds " + std::string(descriptor_type_name(loaded.set.type())) +
                             " descriptors");
        for (const auto& d : loaded.set.entries())
            if (!ids.count(d.subject_id))
                throw ValidationError(path.string() + " references unknown subject '" + d.subject_id + "'");
        for (auto& w : loaded.warnings) e.warnings.push_back(std::move(w));
        e.descriptors.emplace(t, std::move(loaded.set));
    }
    if (std::filesystem::exists(pca_model_path(dir))) e.pca_eigenvalues = load_pca_model(pca_model_path(dir)).eigenvalues;

    if (precompute) {
        for (const auto& [t, set] : e.descriptors) {
            std::vector<MetricKind> kinds{MetricKind::L1, MetricKind::L2};
            if (t == DescriptorType::FacePca && e.pca_eigenvalues) kinds.push_back(MetricKind::Mahalanobis);
            for (Pose pose : set.poses()) {
                const DescriptorSet sub = set.subset(pose);
                for (MetricKind kind : kinds) {
                    auto S = build_similarity_matrix(sub, e.metric(t, kind));
                    if (S.ids.size() >= 2) e.average_trees.emplace(DatasetEntry::MatrixKey{t, kind, pose}, agglomerate(S));
                    e.matrices.emplace(DatasetEntry::MatrixKey{t, kind, pose}, std::move(S));
                }
            }
        }
    }
    return e;
}

Catalog Catalog::open(const std::filesystem::path& root, bool precompute)
{
    if (!std::filesystem::is_directory(root)) throw NotFoundError("dataset root " + root.string() + " does not exist");
    Catalog c;
    if (std::filesystem::exists(root / "landmarks.csv")) {
        c.datasets_.push_back(load_dataset_entry(root, precompute));
        return c;
    }
    std::vector<std::filesystem::path> dirs;
    for (const auto& d : std::filesystem::directory_iterator(root))
        if (d.is_directory() && std::filesystem::exists(d.path() / "landmarks.csv")) dirs.push_back(d.path());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) c.datasets_.push_back(load_dataset_entry(d, precompute));
    if (c.datasets_.empty()) throw NotFoundError("no datasets under " + root.string());
    return c;
}

const DatasetEntry& Catalog::get(const std::string& id) const
{
    if (id.empty()) {
        if (datasets_.size() == 1) return datasets_.front();
        throw InvalidArgument("dataset must be given when the catalog holds " + std::to_string(datasets_.size()));
    }
    for (const auto& d : datasets_)
        if (d.id == id) return d;
    throw NotFoundError("unknown dataset '" + id + "'");
}

// ---------------------------------------------------------------------------
// Queries

QueryRequest QueryRequest::from_json(const Json& j)
{
    if (!j.is_object()) throw InvalidArgument("query must be a JSON object");
    QueryRequest q;
    try {
        q.dataset = j.value("dataset", std::string());
        q.type = parse_descriptor_type(j.at("type").get<std::string>());
        q.metric = parse_metric(j.value("metric", std::string("l2")));
        if (j.contains("subject_id")) q.subject_id = j.at("subject_id").get<std::string>();
        if (j.contains("pose")) q.pose = parse_pose(j.at("pose").get<std::string>());
        if (j.contains("vector")) q.vector = j.at("vector").get<std::vector<double>>();
        if (j.contains("gallery_pose")) q.gallery_pose = parse_pose(j.at("gallery_pose").get<std::string>());
        q.k = j.value("k", 5);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed query: ") + e.what());
    }
    q.validate();
    return q;
}

void QueryRequest::validate() const
{
    if (subject_id.has_value() == vector.has_value())
        throw InvalidArgument("query needs exactly one of subject_id or vector");
    if (k < 1) throw InvalidKError("k must be >= 1, got " + std::to_string(k));
}

RankedList run_query(const Catalog& cat, const QueryRequest& q)
{
    q.validate();
    const DatasetEntry& ds = cat.get(q.dataset);
    const DescriptorSet& set = ds.descriptor_set(q.type);
    const Metric m = ds.metric(q.type, q.metric);
    const Pose gpose = q.gallery_pose.value_or(q.pose);
    const DescriptorSet gallery = set.subset(gpose);
    if (gallery.empty())
        throw NotFoundError("no " + std::string(pose_name(gpose)) + " entries in the " +
                            std::string(descriptor_type_name(q.type)) + " gallery");
    if (q.subject_id) {
        const DescriptorEntry* e = set.find(*q.subject_id, q.pose);
        if (!e)
            throw NotFoundError("unknown subject '" + *q.subject_id + "' (" + std::string(pose_name(q.pose)) +
                                ") in dataset '" + ds.id + "'");
        return rank_gallery(e->vector, gallery, m, q.k, *q.subject_id);
    }
    return rank_gallery(*q.vector, gallery, m, q.k, "vector");
}

Json ranked_list_json(const RankedList& r, const QueryRequest& q)
{
    Json j;
    j["query_id"] = r.query_id;
    j["descriptor_type"] = descriptor_type_name(q.type);
    j["metric"] = metric_name(r.metric);
    j["gallery_pose"] = pose_name(q.gallery_pose.value_or(q.pose));
    Json matches = Json::array();
    for (std::size_t i = 0; i < r.matches.size(); ++i)
        matches.push_back({{"rank", i + 1}, {"subject_id", r.matches[i].subject_id}, {"distance", r.matches[i].distance}});
    j["matches"] = std::move(matches);
    return j;
}

Json cmc_summary_json(const CmcCurve& c, MetricKind m, DescriptorType t)
{
    Json j;
    j["rank1"] = c.at(1);
    j["rank5"] = c.at(std::min(5, c.gallery_size));
    j["gallery_size"] = c.gallery_size;
    j["probe_count"] = c.probe_count;
    j["metric"] = metric_name(m);
    j["descriptor_type"] = descriptor_type_name(t);
    return j;
}

Json cluster_json(const ClusterAssignment& a)
{
    Json j;
    j["k"] = a.k;
    Json labels = Json::array();
    for (std::size_t i = 0; i < a.subjects.size(); ++i)
        labels.push_back({{"subject_id", a.subjects[i]}, {"cluster", a.labels[i]}});
    j["labels"] = std::move(labels);
    return j;
}

// ---------------------------------------------------------------------------
// HTTP routing

namespace {

struct HttpError : Error {
    int status;
    HttpError(int s, const std::string& msg) : Error(msg), status(s) {}
};

std::vector<std::string> split_path(const std::string& path)
{
    std::vector<std::string> out;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '/'))
        if (!part.empty()) out.push_back(part);
    return out;
}

std::optional<std::string> param(const ApiRequest& r, const std::string& key)
{
    auto it = r.params.find(key);
    if (it == r.params.end() || it->second.empty()) return std::nullopt;
    return it->second;
}

std::string required(const ApiRequest& r, const std::string& key)
{
    auto v = param(r, key);
    if (!v) throw InvalidArgument("missing query parameter '" + key + "'");
    return *v;
}

int int_param(const ApiRequest& r, const std::string& key)
{
    int v = 0;
    if (!parse_int(required(r, key), v)) throw InvalidArgument("parameter '" + key + "' must be an integer");
    return v;
}

ApiResponse json_response(const Json& j, int status = 200)
{
    return {status, j.dump(), "application/json"};
}

Json datasets_json(const Catalog& cat)
{
    Json arr = Json::array();
    for (const auto& d : cat.datasets()) {
        Json j;
        j["id"] = d.id;
        j["subject_count"] = d.subjects.size();
        Json poses = Json::array();
        for (Pose p : d.poses) poses.push_back(pose_name(p));
        j["poses"] = std::move(poses);
        Json desc = Json::array();
        for (const auto& [t, set] : d.descriptors)
            desc.push_back({{"type", descriptor_type_name(t)},
                            {"provenance", set.provenance()},
                            {"dimension", set.dimension()},
                            {"count", set.size()}});
        j["descriptors"] = std::move(desc);
        j["warnings"] = d.warnings;
        arr.push_back(std::move(j));
    }
    return arr;
}

Json subjects_json(const DatasetEntry& d)
{
    std::map<std::string, std::vector<std::string>> poses;
    for (const auto& l : d.landmarks) poses[l.subject_id].emplace_back(pose_name(l.pose));
    Json arr = Json::array();
    for (const auto& [id, p] : poses) arr.push_back({{"subject_id", id}, {"poses", p}});
    return arr;
}

Json subject_json(const DatasetEntry& d, const std::string& subject, Pose pose)
{
    const LandmarkSet* lms = nullptr;
    for (const auto& l : d.landmarks)
        if (l.subject_id == subject && l.pose == pose) lms = &l;
    if (!lms) throw NotFoundError("unknown subject '" + subject + "' (" + std::string(pose_name(pose)) + ")");
    Json j;
    j["subject_id"] = subject;
    j["pose"] = pose_name(pose);
    Json pts = Json::array();
    for (const auto& [id, l] : lms->points)
        pts.push_back({{"id", id}, {"name", l.name}, {"position", {l.position.x(), l.position.y(), l.position.z()}}});
    j["landmarks"] = std::move(pts);
    Json desc = Json::object();
    for (const auto& [t, set] : d.descriptors)
        if (const auto* e = set.find(subject, pose)) desc[std::string(descriptor_type_name(t))] = e->vector;
    j["descriptors"] = std::move(desc);
    return j;
}

ApiResponse route(const Catalog& cat, const ApiRequest& req)
{
    const auto seg = split_path(req.path);
    if (seg.empty() || seg[0] != "api") throw HttpError(404, "no route for " + req.path);
    const bool get = req.method == "GET";
    auto expect_get = [&] {
        if (!get) throw HttpError(405, "method " + req.method + " not allowed on " + req.path);
    };
    const std::string dataset = param(req, "dataset").value_or("");

    if (seg.size() == 2 && seg[1] == "datasets") {
        expect_get();
        return json_response(datasets_json(cat));
    }
    if (seg.size() == 4 && seg[1] == "datasets" && seg[3] == "subjects") {
        expect_get();
        return json_response(subjects_json(cat.get(seg[2])));
    }
    if (seg.size() == 3 && seg[1] == "subjects") {
        expect_get();
        const Pose pose = parse_pose(param(req, "pose").value_or("standing"));
        return json_response(subject_json(cat.get(dataset), seg[2], pose));
    }
    if (seg.size() == 2 && seg[1] == "query") {
        if (req.method != "POST") throw HttpError(405, "use POST for /api/query");
        Json body;
        try {
            body = Json::parse(req.body);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument(std::string("request body is not JSON: ") + e.what());
        }
        const QueryRequest q = QueryRequest::from_json(body);
        return json_response(ranked_list_json(run_query(cat, q), q));
    }
    if (seg.size() == 2 && seg[1] == "cmc") {
        expect_get();
        const DatasetEntry& d = cat.get(dataset);
        const DescriptorType t = parse_descriptor_type(required(req, "type"));
        const MetricKind kind = parse_metric(param(req, "metric").value_or("l2"));
        const Pose g = parse_pose(param(req, "gallery").value_or("standing"));
        const Pose p = parse_pose(param(req, "probe").value_or("sitting"));
        const DescriptorSet& set = d.descriptor_set(t);
        const DescriptorSet gallery = set.subset(g);
        std::vector<std::string> dropped;
        const CmcCurve c = cmc(gallery, mated_probes(gallery, set.subset(p), &dropped), d.metric(t, kind));
        Json j = cmc_summary_json(c, kind, t);
        j["rate"] = c.rate;
        j["probes_without_mate"] = dropped;
        return json_response(j);
    }
    if (seg.size() == 2 && (seg[1] == "dendrogram" || seg[1] == "clusters")) {
        expect_get();
        const DatasetEntry& d = cat.get(dataset);
        const DescriptorType t = parse_descriptor_type(required(req, "type"));
        const MetricKind kind = parse_metric(param(req, "metric").value_or("l2"));
        const Linkage linkage = parse_linkage(param(req, "linkage").value_or("average"));
        const Pose pose = parse_pose(param(req, "pose").value_or("standing"));
        const Dendrogram tree = d.dendrogram(t, kind, pose, linkage);
        if (seg[1] == "clusters") return json_response(cluster_json(cut(tree, int_param(req, "k"))));
        if (param(req, "format").value_or("json") == "newick") return {200, to_newick(tree), "text/plain"};
        return {200, to_json(tree), "application/json"};
    }
    if (seg.size() == 4 && seg[1] == "mesh") {
        expect_get();
        const DatasetEntry& d = cat.get(dataset);
        const Pose pose = parse_pose(seg[3]);
        if (!std::binary_search(d.subjects.begin(), d.subjects.end(), seg[2]))
            throw NotFoundError("unknown subject '" + seg[2] + "'");
        std::ifstream in(mesh_path(d.root, seg[2], pose), std::ios::binary);
        if (!in) throw NotFoundError("no " + std::string(pose_name(pose)) + " mesh for subject '" + seg[2] + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return {200, ss.str(), "text/plain"};
    }
    throw HttpError(404, "no route for " + req.path);
}

ApiResponse error_response(int status, std::string_view type, const std::string& msg)
{
    Json j;
    j["error"] = {{"status", status}, {"type", type}, {"message", msg}};
    return json_response(j, status);
}

} // namespace

ApiResponse handle_api(const Catalog& cat, const ApiRequest& req)
{
    try {
        return route(cat, req);
    } catch (const HttpError& e) {
        return error_response(e.status, e.status == 405 ? "MethodNotAllowed" : "NotFound", e.what());
    } catch (const NotFoundError& e) {
        return error_response(404, "NotFound", e.what());
    } catch (const UnmatchedProbeError& e) {
        return error_response(422, "UnmatchedProbe", e.what());
    } catch (const InvalidKError& e) {
        return error_response(400, "InvalidK", e.what());
    } catch (const IncompatibleMetricError& e) {
        return error_response(400, "IncompatibleMetric", e.what());
    } catch (const DimensionMismatchError& e) {
        return error_response(400, "DimensionMismatch", e.what());
    } catch (const InvalidArgument& e) {
        return error_response(400, "InvalidArgument", e.what());
    } catch (const DataError& e) {
        return error_response(422, "DataError", e.what());
    } catch (const std::exception& e) {
        return error_response(500, "Internal", e.what());
    }
}

} // namespace anthro
