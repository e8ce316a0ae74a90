#include "anthro/pipeline.hpp"

#include "anthro/errors.hpp"

#include <fstream>

namespace anthro {

std::string descriptor_provenance(DescriptorType t, const ExtractOptions& opts, const PcaModel* model)
{
    switch (t) {
    case DescriptorType::Distance15: return "pairspec:" + opts.pairs.version();
    case DescriptorType::Silhouette48: return silhouette_provenance(opts.silhouette);
    case DescriptorType::FacePca: return model ? model->id() : std::string("pca:untrained");
    case DescriptorType::ShEnergy:
        return "sh:L" + std::to_string(opts.lmax) + ":lambda" + format_double(opts.lambda);
    }
    return {};
}

namespace {

template <class F>
std::vector<std::optional<std::vector<double>>> run_all(const Dataset& ds, std::vector<ExtractFailure>& failures, F&& f)
{
    const auto n = static_cast<long>(ds.records.size());
    std::vector<std::optional<std::vector<double>>> out(ds.records.size());
    std::vector<std::string> errors(ds.records.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = f(ds.records[i]);
        } catch (const DataError& e) {
            errors[i] = e.what();
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!out[i]) failures.push_back({ds.records[i].mesh.subject_id, ds.records[i].mesh.pose, errors[i]});
    return out;
}

} // namespace

ExtractResult extract_descriptors(const Dataset& ds, DescriptorType t, const ExtractOptions& opts)
{
    ExtractResult res;
    std::vector<std::optional<std::vector<double>>> vecs;
    switch (t) {
    case DescriptorType::Distance15:
        vecs = run_all(ds, res.failures, [&](const SubjectRecord& r) {
            const auto d = distance_descriptor(r.landmarks, opts.pairs);
            return std::vector<double>(d.d.begin(), d.d.end());
        });
        break;
    case DescriptorType::Silhouette48:
        vecs = run_all(ds, res.failures,
                       [&](const SubjectRecord& r) { return silhouette_descriptor(r.mesh, opts.silhouette).f; });
        break;
    case DescriptorType::ShEnergy:
        vecs = run_all(ds, res.failures, [&](const SubjectRecord& r) {
            const Mesh head = crop_head(r.mesh, r.landmarks, opts.neck_margin_mm);
            return sh_descriptor(spherical_fit(head, opts.lmax, opts.lambda)).e;
        });
        break;
    case DescriptorType::FacePca: {
        const auto n = static_cast<long>(ds.records.size());
        std::vector<std::optional<DepthGrid>> grids(ds.records.size());
        std::vector<std::string> errors(ds.records.size());
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < n; ++i) {
            try {
                grids[i] = face_depth_grid(ds.records[i].mesh, ds.records[i].landmarks, opts.face);
            } catch (const DataError& e) {
                errors[i] = e.what();
            }
        }
        std::vector<DepthGrid> training;
        for (const auto& g : grids)
            if (g && g->pose == opts.pca_training_pose) training.push_back(*g);
        if (training.size() < 2)
            throw TooFewSubjectsError("face-pca needs at least 2 " + std::string(pose_name(opts.pca_training_pose)) +
                                      " face grids, got " + std::to_string(training.size()));
        const std::string tid = std::string(pose_name(opts.pca_training_pose)) + "-n" + std::to_string(training.size());
        PcaModel model = opts.pca_k > 0 ? train_pca(training, opts.pca_k, tid) : train_pca_auto(training, 0.95, 40, tid);
        model.alpha = opts.face.alpha;
        vecs.resize(grids.size());
        for (std::size_t i = 0; i < grids.size(); ++i) {
            if (!grids[i]) {
                res.failures.push_back({ds.records[i].mesh.subject_id, ds.records[i].mesh.pose, errors[i]});
                continue;
            }
            vecs[i] = project_pca(model, *grids[i]).coeffs;
        }
        res.model = std::move(model);
        break;
    }
    }

    res.set = DescriptorSet(t, descriptor_provenance(t, opts, res.model ? &*res.model : nullptr));
    for (std::size_t i = 0; i < vecs.size(); ++i)
        if (vecs[i]) res.set.add({ds.records[i].mesh.subject_id, ds.records[i].mesh.pose, std::move(*vecs[i])});
    return res;
}

std::filesystem::path descriptor_path(const std::filesystem::path& dataset_dir, DescriptorType t)
{
    return dataset_dir / "descriptors" / (std::string(descriptor_type_name(t)) + ".jsonl");
}

std::filesystem::path pca_model_path(const std::filesystem::path& dataset_dir)
{
    return dataset_dir / "descriptors" / "face-pca.model.json";
}

void save_extraction(const std::filesystem::path& dataset_dir, const ExtractResult& r)
{
    std::filesystem::create_directories(dataset_dir / "descriptors");
    save_descriptors(descriptor_path(dataset_dir, r.set.type()), r.set);
    if (r.model) save_pca_model(pca_model_path(dataset_dir), *r.model);
}

Metric resolve_metric(const std::filesystem::path& dataset_dir, DescriptorType t, MetricKind kind)
{
    switch (kind) {
    case MetricKind::L1: return Metric::l1();
    case MetricKind::L2: return Metric::l2();
    case MetricKind::Mahalanobis: break;
    }
    check_metric_compatible(t, Metric{MetricKind::Mahalanobis, {1.0}});
    return Metric::mahalanobis(load_pca_model(pca_model_path(dataset_dir)).eigenvalues);
}

} // namespace anthro
