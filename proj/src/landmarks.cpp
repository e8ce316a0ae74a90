#include "anthro/landmarks.hpp"

#include "anthro/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <utility>

namespace anthro {

namespace {

constexpr std::pair<int, std::string_view> kRegistry[] = {
    {lm::Sellion, "Sellion"},
    {lm::RtInfraorbitale, "Rt Infraorbitale"},
    {lm::LtInfraorbitale, "Lt Infraorbitale"},
    {lm::Supramenton, "Supramenton"},
    {lm::RtTragion, "Rt Tragion"},
    {lm::RtGonion, "Rt Gonion"},
    {lm::LtTragion, "Lt Tragion"},
    {lm::LtGonion, "Lt Gonion"},
    {lm::RtClavicale, "Rt Clavicale"},
    {lm::LtClavicale, "Lt Clavicale"},
    {lm::Suprasternale, "Suprasternale"},
    {lm::Cervicale, "Cervicale"},
    {lm::RtAcromion, "Rt Acromion"},
    {lm::LtAcromion, "Lt Acromion"},
    {lm::RtWrist, "Rt Radial Styloid"},
    {lm::LtWrist, "Lt Radial Styloid"},
    {lm::RtElbow, "Rt Lateral Humeral Epicondyle"},
    {lm::LtElbow, "Lt Lateral Humeral Epicondyle"},
    {lm::RtTrochanterion, "Rt Trochanterion"},
    {lm::LtTrochanterion, "Lt Trochanterion"},
    {lm::RtKnee, "Rt Lateral Femoral Epicondyle"},
    {lm::LtKnee, "Lt Lateral Femoral Epicondyle"},
    {lm::RtAnkle, "Rt Lateral Malleolus"},
    {lm::LtAnkle, "Lt Lateral Malleolus"},
};

std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

} // namespace

std::optional<std::string_view> landmark_name(int id)
{
    for (const auto& [k, name] : kRegistry)
        if (k == id) return name;
    return std::nullopt;
}

std::vector<int> registered_landmark_ids()
{
    std::vector<int> ids;
    for (const auto& entry : kRegistry) ids.push_back(entry.first);
    return ids;
}

const Vec3& LandmarkSet::at(int id) const
{
    auto it = points.find(id);
    if (it == points.end()) throw MissingLandmarkError(id);
    return it->second.position;
}

void LandmarkSet::set(int id, const Vec3& p)
{
    auto name = landmark_name(id);
    points[id] = Landmark{name ? std::string(*name) : "Landmark " + std::to_string(id), p};
}

LandmarkFile parse_landmarks(std::istream& in)
{
    LandmarkFile file;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError("empty landmark file", 1);
    ++lineno;
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3); // UTF-8 BOM
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kLandmarkCsvHeader)
        throw ParseError("unexpected header, expected '" + std::string(kLandmarkCsvHeader) + "'", lineno);

    std::map<std::pair<std::string, Pose>, std::size_t> group_index;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 7) throw ParseError("expected 7 fields, got " + std::to_string(f.size()), lineno);
        Pose pose;
        try {
            pose = parse_pose(f[1]);
        } catch (const InvalidArgument& e) {
            throw ParseError(e.what(), lineno);
        }
        int id = 0;
        if (!parse_int(f[2], id)) throw ParseError("bad landmark id '" + std::string(f[2]) + "'", lineno);
        Vec3 p;
        for (int k = 0; k < 3; ++k)
            if (!parse_double(f[4 + k], p[k]) || !std::isfinite(p[k]))
                throw ParseError("bad coordinate '" + std::string(f[4 + k]) + "'", lineno);

        std::string subject(f[0]);
        auto key = std::make_pair(subject, pose);
        auto [it, inserted] = group_index.try_emplace(key, file.sets.size());
        if (inserted) file.sets.push_back(LandmarkSet{subject, pose, {}});
        auto& set = file.sets[it->second];
        if (set.has(id)) throw DuplicateLandmarkError(subject + "/" + std::string(pose_name(pose)), id);
        if (!landmark_name(id))
            file.warnings.push_back("line " + std::to_string(lineno) + ": unknown landmark id " +
                                    std::to_string(id));
        set.points[id] = Landmark{std::string(f[3]), p};
    }
    return file;
}

LandmarkFile load_landmarks(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open landmark file " + path.string());
    return parse_landmarks(in);
}

void write_landmarks(std::ostream& out, const std::vector<LandmarkSet>& sets)
{
    out << kLandmarkCsvHeader << '\n';
    for (const auto& s : sets)
        for (const auto& [id, l] : s.points)
            out << s.subject_id << ',' << pose_name(s.pose) << ',' << id << ',' << l.name << ','
                << format_double(l.position.x()) << ',' << format_double(l.position.y()) << ','
                << format_double(l.position.z()) << '\n';
}

void write_landmarks(const std::filesystem::path& path, const std::vector<LandmarkSet>& sets)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write landmark file " + path.string());
    write_landmarks(out, sets);
}

} // namespace anthro
