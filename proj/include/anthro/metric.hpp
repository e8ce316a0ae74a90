#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace anthro {

enum class MetricKind { L1, L2, Mahalanobis };

std::string_view metric_name(MetricKind k);
MetricKind parse_metric(std::string_view s); // throws InvalidArgument

/// Distance rule between descriptor vectors. Mahalanobis whitens coordinate i
/// by the i-th retained PCA eigenvalue.
struct Metric {
    MetricKind kind = MetricKind::L2;
    std::vector<double> eigenvalues; // Mahalanobis only

    static Metric l1() { return {MetricKind::L1, {}}; }
    static Metric l2() { return {MetricKind::L2, {}}; }
    /// Throws NonPositiveEigenvalueError.
    static Metric mahalanobis(std::vector<double> eigenvalues);
};

/// L1 = sum |a-b|, L2 = sqrt(sum (a-b)^2), Mahalanobis = sqrt(sum (a-b)^2 / lambda).
/// Throws DimensionMismatchError.
double vec_distance(std::span<const double> a, std::span<const double> b, const Metric& m);

} // namespace anthro
