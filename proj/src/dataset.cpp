#include "anthro/dataset.hpp"

#include "anthro/errors.hpp"

#include <algorithm>
#include <set>

namespace fs = std::filesystem;

namespace anthro {

const SubjectRecord* Dataset::find(const std::string& subject_id, Pose pose) const
{
    for (const auto& r : records)
        if (r.mesh.subject_id == subject_id && r.mesh.pose == pose) return &r;
    return nullptr;
}

std::vector<std::string> Dataset::subject_ids() const
{
    std::set<std::string> ids;
    for (const auto& r : records) ids.insert(r.mesh.subject_id);
    return {ids.begin(), ids.end()};
}

std::vector<Pose> Dataset::poses() const
{
    std::set<Pose> p;
    for (const auto& r : records) p.insert(r.mesh.pose);
    return {p.begin(), p.end()};
}

fs::path mesh_path(const fs::path& dir, const std::string& subject, Pose pose)
{
    return dir / subject / (std::string(pose_name(pose)) + ".obj");
}

void write_dataset(const fs::path& dir, const Dataset& ds)
{
    fs::create_directories(dir);
    std::vector<LandmarkSet> sets;
    for (const auto& r : ds.records) {
        fs::create_directories(dir / r.mesh.subject_id);
        write_mesh(mesh_path(dir, r.mesh.subject_id, r.mesh.pose), r.mesh);
        sets.push_back(r.landmarks);
    }
    write_landmarks(dir / "landmarks.csv", sets);
}

std::vector<LandmarkSet> load_dataset_landmarks(const fs::path& dir)
{
    return load_landmarks(dir / "landmarks.csv").sets;
}

Dataset load_dataset(const fs::path& dir, std::vector<std::string>* warnings)
{
    auto file = load_landmarks(dir / "landmarks.csv");
    if (warnings) warnings->insert(warnings->end(), file.warnings.begin(), file.warnings.end());
    Dataset ds;
    ds.records.resize(file.sets.size());
    for (std::size_t i = 0; i < file.sets.size(); ++i) {
        auto& rec = ds.records[i];
        rec.landmarks = std::move(file.sets[i]);
        rec.mesh = load_mesh(mesh_path(dir, rec.landmarks.subject_id, rec.landmarks.pose));
        rec.mesh.subject_id = rec.landmarks.subject_id;
        rec.mesh.pose = rec.landmarks.pose;
    }
    return ds;
}

} // namespace anthro
