#include "anthro/body_desc.hpp"

#include "anthro/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string_view>

namespace anthro {

PairSpec::PairSpec(std::vector<Pair> pairs, std::string version)
    : pairs_(std::move(pairs)), version_(std::move(version))
{
    if (pairs_.size() != kSize)
        throw InvalidArgument("PairSpec needs exactly 15 pairs, got " + std::to_string(pairs_.size()));
    std::set<Pair> seen;
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        const auto [a, b] = pairs_[i];
        if (a == b) throw InvalidArgument("PairSpec pair " + std::to_string(i) + " joins landmark " +
                                          std::to_string(a) + " to itself");
        if (!seen.insert({std::min(a, b), std::max(a, b)}).second)
            throw InvalidArgument("PairSpec pair " + std::to_string(i) + " is repeated");
    }
}

PairSpec PairSpec::default_spec()
{
    using namespace lm;
    return PairSpec({{LtWrist, LtElbow},
                     {RtWrist, RtElbow},
                     {LtElbow, LtAcromion},
                     {RtElbow, RtAcromion},
                     {LtTrochanterion, LtKnee},
                     {RtTrochanterion, RtKnee},
                     {LtKnee, LtAnkle},
                     {RtKnee, RtAnkle},
                     {RtAcromion, LtAcromion},
                     {RtTrochanterion, LtTrochanterion},
                     {Cervicale, Suprasternale},
                     {LtTragion, LtGonion},
                     {RtTragion, RtGonion},
                     {Sellion, Supramenton},
                     {RtTragion, LtTragion}},
                    "v1");
}

std::vector<int> PairSpec::landmark_ids() const
{
    std::set<int> ids;
    for (const auto& [a, b] : pairs_) {
        ids.insert(a);
        ids.insert(b);
    }
    return {ids.begin(), ids.end()};
}

PairSpec parse_pairspec(std::istream& in, std::string version)
{
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) throw ParseError("empty pair file", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "index,landmark_id_a,landmark_id_b")
        throw ParseError("unexpected header, expected 'index,landmark_id_a,landmark_id_b'", 1);
    std::vector<PairSpec::Pair> pairs;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string_view s(line);
        auto c1 = s.find(','), c2 = s.find(',', c1 == s.npos ? c1 : c1 + 1);
        int idx = 0, a = 0, b = 0;
        if (c1 == s.npos || c2 == s.npos || !parse_int(s.substr(0, c1), idx) ||
            !parse_int(s.substr(c1 + 1, c2 - c1 - 1), a) || !parse_int(s.substr(c2 + 1), b))
            throw ParseError("expected three integers", lineno);
        if (idx != static_cast<int>(pairs.size()))
            throw ParseError("pair index " + std::to_string(idx) + " out of order", lineno);
        pairs.emplace_back(a, b);
    }
    try {
        return PairSpec(std::move(pairs), std::move(version));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

PairSpec load_pairspec(const std::filesystem::path& path, std::string version)
{
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open pair file " + path.string());
    return parse_pairspec(in, std::move(version));
}

void write_pairspec(std::ostream& out, const PairSpec& spec)
{
    out << "index,landmark_id_a,landmark_id_b\n";
    for (std::size_t i = 0; i < spec.pairs().size(); ++i)
        out << i << ',' << spec.pairs()[i].first << ',' << spec.pairs()[i].second << '\n';
}

BodyDistanceDescriptor distance_descriptor(const LandmarkSet& lms, const PairSpec& pairs)
{
    BodyDistanceDescriptor out;
    out.subject_id = lms.subject_id;
    out.pose = lms.pose;
    out.pairspec_version = pairs.version();
    for (std::size_t k = 0; k < pairs.pairs().size(); ++k) {
        const auto [a, b] = pairs.pairs()[k];
        if (!lms.has(a)) throw MissingLandmarkError(a, static_cast<int>(k));
        if (!lms.has(b)) throw MissingLandmarkError(b, static_cast<int>(k));
        out.d[k] = (lms.at(a) - lms.at(b)).norm();
        if (!(out.d[k] > 0.0) || !std::isfinite(out.d[k]))
            throw ValidationError("pair " + std::to_string(k) + " has zero or non-finite length");
    }
    return out;
}

} // namespace anthro
