#include "anthro/retrieval.hpp"

#include "anthro/errors.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <unordered_set>

namespace anthro {

namespace {

void require_unique_subjects(const DescriptorSet& gallery)
{
    std::map<std::string, int> seen;
    for (const auto& e : gallery.entries())
        if (++seen[e.subject_id] > 1)
            throw InvalidArgument("gallery holds more than one entry for subject " + e.subject_id +
                                  "; restrict it to a single pose");
}

} // namespace

RankedList rank_gallery(std::span<const double> query, const DescriptorSet& gallery, const Metric& m, int k,
                        std::string query_id)
{
    if (gallery.empty()) throw EmptyGalleryError("gallery is empty");
    check_metric_compatible(gallery.type(), m);
    if (static_cast<int>(query.size()) != gallery.dimension())
        throw DimensionMismatchError("query has dimension " + std::to_string(query.size()) + ", gallery has " +
                                     std::to_string(gallery.dimension()));
    const int G = static_cast<int>(gallery.size());
    if (k < 1 || k > G) throw InvalidKError("k must be in [1, " + std::to_string(G) + "], got " + std::to_string(k));
    require_unique_subjects(gallery);

    const auto& entries = gallery.entries();
    std::vector<double> dist(G);
    for (int i = 0; i < G; ++i) dist[i] = vec_distance(query, entries[i].vector, m);
    std::vector<int> order(G);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return entries[a].subject_id < entries[b].subject_id;
    });

    RankedList out;
    out.query_id = std::move(query_id);
    out.metric = m.kind;
    for (int i = 0; i < k; ++i) out.matches.push_back({entries[order[i]].subject_id, dist[order[i]]});
    return out;
}

std::vector<int> mate_ranks(const DescriptorSet& gallery, const DescriptorSet& probe, const Metric& m)
{
    if (gallery.empty()) throw EmptyGalleryError("gallery is empty");
    check_metric_compatible(gallery.type(), m);
    if (!probe.empty() && probe.dimension() != gallery.dimension())
        throw DimensionMismatchError("gallery and probe dimensions differ");
    require_unique_subjects(gallery);
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < gallery.size(); ++i) index[gallery.entries()[i].subject_id] = static_cast<int>(i);
    std::vector<int> mate;
    for (const auto& p : probe.entries()) {
        auto it = index.find(p.subject_id);
        if (it == index.end()) throw UnmatchedProbeError("probe subject " + p.subject_id + " has no gallery mate");
        mate.push_back(it->second);
    }
    return par::mate_ranks(gallery.matrix(), probe.matrix(), mate, m);
}

CmcCurve cmc_from_ranks(const std::vector<int>& ranks, int gallery_size)
{
    CmcCurve c;
    c.gallery_size = gallery_size;
    c.probe_count = static_cast<int>(ranks.size());
    std::vector<int> hist(static_cast<std::size_t>(gallery_size) + 1, 0);
    for (int r : ranks) ++hist.at(static_cast<std::size_t>(r));
    c.rate.resize(gallery_size);
    int acc = 0;
    for (int r = 1; r <= gallery_size; ++r) {
        acc += hist[r];
        c.rate[r - 1] = ranks.empty() ? 0.0 : static_cast<double>(acc) / static_cast<double>(ranks.size());
    }
    return c;
}

CmcCurve cmc(const DescriptorSet& gallery, const DescriptorSet& probe, const Metric& m)
{
    return cmc_from_ranks(mate_ranks(gallery, probe, m), static_cast<int>(gallery.size()));
}

DescriptorSet mated_probes(const DescriptorSet& gallery, const DescriptorSet& probe, std::vector<std::string>* dropped)
{
    std::unordered_set<std::string> enrolled;
    for (const auto& e : gallery.entries()) enrolled.insert(e.subject_id);
    DescriptorSet out(probe.type(), probe.provenance());
    for (const auto& e : probe.entries()) {
        if (enrolled.count(e.subject_id)) out.add(e);
        else if (dropped) dropped->push_back(e.subject_id);
    }
    return out;
}

void write_cmc_csv(std::ostream& out, const CmcCurve& c)
{
    out << "rank,rate\n";
    for (std::size_t r = 0; r < c.rate.size(); ++r) out << r + 1 << ',' << format_double(c.rate[r]) << '\n';
}

} // namespace anthro
