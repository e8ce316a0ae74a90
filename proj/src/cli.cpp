#include "anthro/cli.hpp"

#include "anthro/errors.hpp"
#include "anthro/pipeline.hpp"
#include "anthro/service.hpp"
#include "anthro/synth.hpp"
#include "anthro/validate.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <ostream>

namespace anthro {

namespace {

void log_event(std::ostream& err, std::string_view level, std::string_view event, Json fields = Json::object())
{
    Json j;
    j["level"] = level;
    j["event"] = event;
    for (auto& [k, v] : fields.items()) j[k] = v;
    err << j.dump() << '\n';
}

const std::vector<std::string> kTypeNames{"distance15", "silhouette48", "face-pca", "sh-energy"};
const std::vector<std::string> kMetricNames{"l1", "l2", "mahalanobis"};
const std::vector<std::string> kPoseNames{"standing", "sitting"};
const std::vector<std::string> kLinkageNames{"single", "average", "complete"};

struct Args {
    // synth
    int n = 200;
    std::uint64_t seed = 1;
    double noise_mm = 15.0;
    std::string out;
    // shared
    std::string dataset;
    std::string type;
    std::string metric = "l2";
    int k = 5;
    // extract
    std::string pairs;
    int lmax = 10;
    double lambda = 1e-6;
    // query
    std::string subject;
    std::string pose = "standing";
    std::string gallery_pose;
    // cmc
    std::string cmc_gallery = "standing";
    std::string cmc_probe = "sitting";
    // cluster
    std::string linkage = "average";
    std::string newick_out;
    std::string json_out;
    // serve
    std::string dataset_root;
    std::string bind = "127.0.0.1:8080";
};

int run_synth(const Args& a, std::ostream& out, std::ostream& err)
{
    SynthParams p;
    p.n_subjects = a.n;
    p.seed = a.seed;
    p.landmark_noise_mm = a.noise_mm;
    p.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset ds = synth_population(p);
    write_dataset(a.out, ds);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log_event(err, "info", "synth",
              {{"subjects", p.n_subjects}, {"records", ds.records.size()}, {"seconds", secs}, {"out", a.out}});
    out << Json{{"out", a.out}, {"subjects", p.n_subjects}, {"records", ds.records.size()}}.dump() << '\n';
    return 0;
}

int run_extract(const Args& a, const CLI::App* cmd, std::ostream& out, std::ostream& err)
{
    const DescriptorType t = parse_descriptor_type(a.type);
    ExtractOptions opts;
    if (!a.pairs.empty()) opts.pairs = load_pairspec(a.pairs, std::filesystem::path(a.pairs).stem().string());
    if (cmd->count("--k")) opts.pca_k = a.k;
    opts.lmax = a.lmax;
    opts.lambda = a.lambda;

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> warnings;
    const Dataset ds = load_dataset(a.dataset, &warnings);
    for (const auto& w : warnings) log_event(err, "warning", "landmarks", {{"message", w}});
    const ExtractResult r = extract_descriptors(ds, t, opts);
    for (const auto& f : r.failures)
        log_event(err, "warning", "extract_failed",
                  {{"subject_id", f.subject_id}, {"pose", pose_name(f.pose)}, {"message", f.message}});
    if (r.set.empty()) throw DataError("no " + a.type + " descriptor could be extracted");
    save_extraction(a.dataset, r);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Json summary{{"type", a.type},
                 {"entries", r.set.size()},
                 {"failures", r.failures.size()},
                 {"dimension", r.set.dimension()},
                 {"provenance", r.set.provenance()},
                 {"path", descriptor_path(a.dataset, t).string()}};
    if (r.model && r.model->rank_warning) log_event(err, "warning", "pca_rank", {{"k", r.model->k()}});
    log_event(err, "info", "extract", {{"type", a.type}, {"entries", r.set.size()}, {"seconds", secs}});
    out << summary.dump() << '\n';
    return 0;
}

int run_query_cmd(const Args& a, std::ostream& out)
{
    const Catalog cat = Catalog::open(a.dataset, false);
    QueryRequest q;
    q.type = parse_descriptor_type(a.type);
    q.metric = parse_metric(a.metric);
    q.subject_id = a.subject;
    q.pose = parse_pose(a.pose);
    if (!a.gallery_pose.empty()) q.gallery_pose = parse_pose(a.gallery_pose);
    q.k = a.k;
    out << ranked_list_json(run_query(cat, q), q).dump() << '\n';
    return 0;
}

int run_cmc_cmd(const Args& a, std::ostream& out, std::ostream& err)
{
    const DescriptorType t = parse_descriptor_type(a.type);
    const MetricKind kind = parse_metric(a.metric);
    const auto loaded = load_descriptors(descriptor_path(a.dataset, t));
    for (const auto& w : loaded.warnings) log_event(err, "warning", "descriptors", {{"message", w}});
    const Metric m = resolve_metric(a.dataset, t, kind);
    const DescriptorSet gallery = loaded.set.subset(parse_pose(a.cmc_gallery));
    std::vector<std::string> dropped;
    const DescriptorSet probes = mated_probes(gallery, loaded.set.subset(parse_pose(a.cmc_probe)), &dropped);
    for (const auto& id : dropped) log_event(err, "warning", "probe_without_mate", {{"subject_id", id}});
    const CmcCurve c = cmc(gallery, probes, m);
    const std::filesystem::path csv = a.out.empty() ? std::filesystem::path(a.dataset) / "results" /
                                                          ("cmc_" + a.type + "_" + a.metric + ".csv")
                                                    : std::filesystem::path(a.out);
    if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
    std::ofstream f(csv);
    if (!f) throw Error("cannot write " + csv.string());
    write_cmc_csv(f, c);
    log_event(err, "info", "cmc", {{"csv", csv.string()}});
    out << cmc_summary_json(c, kind, t).dump() << '\n';
    return 0;
}

int run_cluster_cmd(const Args& a, std::ostream& out, std::ostream& err)
{
    const DescriptorType t = parse_descriptor_type(a.type);
    const auto loaded = load_descriptors(descriptor_path(a.dataset, t));
    const DescriptorSet set = loaded.set.subset(parse_pose(a.pose));
    if (set.empty()) throw NotFoundError("no " + a.pose + " entries in " + descriptor_path(a.dataset, t).string());
    const Dendrogram tree =
        agglomerate(build_similarity_matrix(set, resolve_metric(a.dataset, t, parse_metric(a.metric))),
                    parse_linkage(a.linkage));
    const ClusterAssignment c = cut(tree, a.k);
    auto write_text = [](const std::string& path, const std::string& text) {
        std::ofstream f(path);
        if (!f) throw Error("cannot write " + path);
        f << text << '\n';
    };
    if (!a.newick_out.empty()) write_text(a.newick_out, to_newick(tree));
    if (!a.json_out.empty()) write_text(a.json_out, to_json(tree));
    log_event(err, "info", "cluster", {{"subjects", set.size()}, {"k", a.k}, {"linkage", a.linkage}});
    write_cluster_csv(out, c);
    return 0;
}

int run_serve(const Args& a, std::ostream& out, std::ostream& err)
{
    const Catalog cat = Catalog::open(a.dataset_root);
    for (const auto& d : cat.datasets()) {
        for (const auto& w : d.warnings) log_event(err, "warning", "catalog", {{"dataset", d.id}, {"message", w}});
        log_event(err, "info", "dataset_loaded",
                  {{"dataset", d.id}, {"subjects", d.subjects.size()}, {"descriptor_types", d.descriptors.size()}});
    }
    serve_until_signal(cat, a.bind, [&](int port) {
        log_event(err, "info", "listening", {{"bind", a.bind}, {"port", port}});
        out.flush();
    });
    log_event(err, "info", "shutdown");
    return 0;
}

int run_validate(const Args& a, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> warnings;
    const Dataset ds = load_dataset(a.dataset, &warnings);
    for (const auto& w : warnings) log_event(err, "warning", "landmarks", {{"message", w}});
    std::size_t failing = 0;
    for (const auto& r : ds.records) {
        const ValidationReport rep = validate_subject(r.mesh, r.landmarks);
        Json j;
        j["subject_id"] = rep.subject_id;
        j["pose"] = pose_name(rep.pose);
        Json checks = Json::object();
        bool any_fail = false;
        for (const auto& [t, c] : rep.checks) {
            checks[std::string(descriptor_type_name(t))] = {{"status", check_status_name(c.status)},
                                                            {"reasons", c.reasons}};
            any_fail |= c.status == CheckStatus::Fail;
        }
        j["checks"] = std::move(checks);
        j["face_vertex_count"] = rep.face_vertex_count;
        j["head_coverage"] = rep.head_coverage;
        failing += any_fail;
        out << j.dump() << '\n';
    }
    log_event(err, "info", "validate", {{"records", ds.records.size()}, {"with_failures", failing}});
    return 0;
}

} // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Args a;
    CLI::App app{"3D body and head shape retrieval", "anthro"};
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "Generate a synthetic population");
    synth->add_option("--n", a.n, "Number of subjects")->check(CLI::PositiveNumber);
    synth->add_option("--seed", a.seed, "Random seed");
    synth->add_option("--noise-mm", a.noise_mm, "Landmark noise (mm, per axis)")->check(CLI::NonNegativeNumber);
    synth->add_option("--out", a.out, "Output directory")->required();

    auto* extract = app.add_subcommand("extract", "Extract one descriptor type for a dataset");
    extract->add_option("--dataset", a.dataset, "Dataset directory")->required();
    extract->add_option("--type", a.type, "Descriptor type")->required()->check(CLI::IsMember(kTypeNames));
    extract->add_option("--pairs", a.pairs, "Landmark pair CSV (distance15)")->check(CLI::ExistingFile);
    extract->add_option("--k", a.k, "PCA components (face-pca; default: 95% variance)")->check(CLI::PositiveNumber);
    extract->add_option("--lmax", a.lmax, "Maximum SH degree (sh-energy)")->check(CLI::NonNegativeNumber);
    extract->add_option("--lambda", a.lambda, "SH regularization weight")->check(CLI::NonNegativeNumber);

    auto* query = app.add_subcommand("query", "Rank the gallery against one subject");
    query->add_option("--dataset", a.dataset, "Dataset directory")->required();
    query->add_option("--type", a.type, "Descriptor type")->required()->check(CLI::IsMember(kTypeNames));
    query->add_option("--metric", a.metric, "Distance")->check(CLI::IsMember(kMetricNames));
    query->add_option("--subject", a.subject, "Query subject id")->required();
    query->add_option("--pose", a.pose, "Query pose")->check(CLI::IsMember(kPoseNames));
    query->add_option("--gallery-pose", a.gallery_pose, "Gallery pose (default: query pose)")
        ->check(CLI::IsMember(kPoseNames));
    query->add_option("--k", a.k, "Number of matches")->check(CLI::PositiveNumber);

    auto* cmc_cmd = app.add_subcommand("cmc", "Cumulative match characteristic");
    cmc_cmd->add_option("--dataset", a.dataset, "Dataset directory")->required();
    cmc_cmd->add_option("--type", a.type, "Descriptor type")->required()->check(CLI::IsMember(kTypeNames));
    cmc_cmd->add_option("--metric", a.metric, "Distance")->check(CLI::IsMember(kMetricNames));
    cmc_cmd->add_option("--gallery-pose,--gallery", a.cmc_gallery, "Gallery pose")->check(CLI::IsMember(kPoseNames));
    cmc_cmd->add_option("--probe-pose,--probe", a.cmc_probe, "Probe pose")->check(CLI::IsMember(kPoseNames));
    cmc_cmd->add_option("--out", a.out, "CSV path (default: <dataset>/results/cmc_<type>_<metric>.csv)");

    auto* cluster = app.add_subcommand("cluster", "Agglomerative clustering and a k-cluster cut");
    cluster->add_option("--dataset", a.dataset, "Dataset directory")->required();
    cluster->add_option("--type", a.type, "Descriptor type")->required()->check(CLI::IsMember(kTypeNames));
    cluster->add_option("--metric", a.metric, "Distance")->check(CLI::IsMember(kMetricNames));
    cluster->add_option("--linkage", a.linkage, "Linkage")->check(CLI::IsMember(kLinkageNames));
    cluster->add_option("--k", a.k, "Number of clusters")->required()->check(CLI::PositiveNumber);
    cluster->add_option("--pose", a.pose, "Pose to cluster")->check(CLI::IsMember(kPoseNames));
    cluster->add_option("--newick", a.newick_out, "Write the dendrogram as Newick");
    cluster->add_option("--json", a.json_out, "Write the dendrogram as JSON");

    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    serve->add_option("--dataset-root", a.dataset_root, "Dataset directory or directory of datasets")->required();
    serve->add_option("--bind", a.bind, "host:port");

    auto* validate = app.add_subcommand("validate", "Report which descriptors each record supports");
    validate->add_option("--dataset", a.dataset, "Dataset directory")->required();

    std::vector<std::string> argv_store{"anthro"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    auto usage = [&](const std::string& msg) {
        err << "error: " << msg << "\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return 1;
    };

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return usage(e.what());
    }

    try {
        if (synth->parsed()) return run_synth(a, out, err);
        if (extract->parsed()) return run_extract(a, extract, out, err);
        if (query->parsed()) return run_query_cmd(a, out);
        if (cmc_cmd->parsed()) return run_cmc_cmd(a, out, err);
        if (cluster->parsed()) return run_cluster_cmd(a, out, err);
        if (serve->parsed()) return run_serve(a, out, err);
        if (validate->parsed()) return run_validate(a, out, err);
    } catch (const InvalidArgument& e) {
        log_event(err, "error", "invalid_argument", {{"message", e.what()}});
        return usage(e.what());
    } catch (const Error& e) {
        log_event(err, "error", "data_error", {{"message", e.what()}});
        return 2;
    } catch (const std::exception& e) {
        log_event(err, "error", "failure", {{"message", e.what()}});
        return 2;
    }
    return 1;
}

} // namespace anthro
