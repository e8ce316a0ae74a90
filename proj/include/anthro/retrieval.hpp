#pragma once

#include "anthro/simspace.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace anthro {

struct Match {
    std::string subject_id;
    double distance = 0.0;
};

struct RankedList {
    std::string query_id;
    std::vector<Match> matches; // ascending distance, ties by subject_id
    MetricKind metric = MetricKind::L2;
};

/// Top-k gallery entries by ascending distance, ties broken by ascending
/// subject_id. The gallery must hold one entry per subject (use
/// DescriptorSet::subset). Throws EmptyGalleryError, DimensionMismatchError,
/// InvalidKError, IncompatibleMetricError.
RankedList rank_gallery(std::span<const double> query, const DescriptorSet& gallery, const Metric& m, int k,
                        std::string query_id = {});

struct CmcCurve {
    std::vector<double> rate; // rate[r-1] for rank r = 1..G
    int gallery_size = 0;
    int probe_count = 0;

    double at(int rank) const { return rate.at(static_cast<std::size_t>(rank - 1)); }
};

/// Identification rate by rank. A probe's mate is the gallery entry with the
/// same subject_id; a mate tied with non-mates takes the worst position in
/// the tied block. Throws UnmatchedProbeError, EmptyGalleryError.
CmcCurve cmc(const DescriptorSet& gallery, const DescriptorSet& probe, const Metric& m);

/// Probe entries whose subject is enrolled in the gallery; the subject ids
/// of the rest are appended to `dropped` when given.
DescriptorSet mated_probes(const DescriptorSet& gallery, const DescriptorSet& probe,
                           std::vector<std::string>* dropped = nullptr);

/// Per-probe mate ranks (1-based), probe entry order.
std::vector<int> mate_ranks(const DescriptorSet& gallery, const DescriptorSet& probe, const Metric& m);

CmcCurve cmc_from_ranks(const std::vector<int>& ranks, int gallery_size);

void write_cmc_csv(std::ostream& out, const CmcCurve& c);

} // namespace anthro
