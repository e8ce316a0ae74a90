#include "anthro/kernels.hpp"

#include "anthro/errors.hpp"

#include <omp.h>

#include <cmath>
#include <span>

namespace anthro {

std::string_view metric_name(MetricKind k)
{
    switch (k) {
    case MetricKind::L1: return "l1";
    case MetricKind::L2: return "l2";
    case MetricKind::Mahalanobis: return "mahalanobis";
    }
    return "?";
}

MetricKind parse_metric(std::string_view s)
{
    if (s == "l1") return MetricKind::L1;
    if (s == "l2") return MetricKind::L2;
    if (s == "mahalanobis") return MetricKind::Mahalanobis;
    throw InvalidArgument("unknown metric '" + std::string(s) + "' (expected l1|l2|mahalanobis)");
}

Metric Metric::mahalanobis(std::vector<double> eigenvalues)
{
    for (std::size_t i = 0; i < eigenvalues.size(); ++i)
        if (!(eigenvalues[i] > 0.0))
            throw NonPositiveEigenvalueError("Mahalanobis eigenvalue " + std::to_string(i) + " is not positive");
    return {MetricKind::Mahalanobis, std::move(eigenvalues)};
}

double vec_distance(std::span<const double> a, std::span<const double> b, const Metric& m)
{
    if (a.size() != b.size())
        throw DimensionMismatchError("vector lengths differ: " + std::to_string(a.size()) + " vs " +
                                     std::to_string(b.size()));
    const std::size_t n = a.size();
    double acc = 0.0;
    switch (m.kind) {
    case MetricKind::L1:
        for (std::size_t i = 0; i < n; ++i) acc += std::abs(a[i] - b[i]);
        return acc;
    case MetricKind::L2:
        for (std::size_t i = 0; i < n; ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(acc);
    case MetricKind::Mahalanobis:
        if (m.eigenvalues.size() != n)
            throw DimensionMismatchError("Mahalanobis metric has " + std::to_string(m.eigenvalues.size()) +
                                         " eigenvalues for vectors of length " + std::to_string(n));
        for (std::size_t i = 0; i < n; ++i) acc += (a[i] - b[i]) * (a[i] - b[i]) / m.eigenvalues[i];
        return std::sqrt(acc);
    }
    return acc;
}

namespace {

std::span<const double> row(const RowMatrix& X, Eigen::Index i)
{
    return {X.data() + i * X.cols(), static_cast<std::size_t>(X.cols())};
}

void check_mates(const RowMatrix& gallery, const RowMatrix& probes, const std::vector<int>& mate)
{
    if (gallery.cols() != probes.cols()) throw DimensionMismatchError("gallery/probe dimensions differ");
    if (static_cast<Eigen::Index>(mate.size()) != probes.rows())
        throw InvalidArgument("mate index count must equal probe count");
    for (int g : mate)
        if (g < 0 || g >= gallery.rows()) throw InvalidArgument("mate index out of range");
}

int rank_of_mate(const RowMatrix& gallery, std::span<const double> probe, int mate, const Metric& m)
{
    const double dm = vec_distance(probe, row(gallery, mate), m);
    int rank = 1;
    for (Eigen::Index g = 0; g < gallery.rows(); ++g) {
        if (g == mate) continue;
        if (vec_distance(probe, row(gallery, g), m) <= dm) ++rank;
    }
    return rank;
}

} // namespace

namespace par {

Eigen::MatrixXd pairwise_distances(const RowMatrix& X, const Metric& m)
{
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    if (n > 0) (void)vec_distance(row(X, 0), row(X, 0), m); // surface metric errors outside the region
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = vec_distance(row(X, i), row(X, j), m);
            D(i, j) = d;
            D(j, i) = d;
        }
    return D;
}

std::vector<int> mate_ranks(const RowMatrix& gallery, const RowMatrix& probes, const std::vector<int>& mate,
                            const Metric& m)
{
    check_mates(gallery, probes, mate);
    if (probes.rows() > 0) (void)vec_distance(row(probes, 0), row(gallery, 0), m);
    std::vector<int> ranks(probes.rows());
#pragma omp parallel for schedule(dynamic, 4)
    for (Eigen::Index p = 0; p < probes.rows(); ++p) ranks[p] = rank_of_mate(gallery, row(probes, p), mate[p], m);
    return ranks;
}

Eigen::MatrixXd gram(const RowMatrix& X)
{
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd G(n, n);
#pragma omp parallel for schedule(dynamic, 4)
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = X.row(i).dot(X.row(j));
            G(i, j) = v;
            G(j, i) = v;
        }
    return G;
}

void normal_equations(const RowMatrix& A, const Eigen::VectorXd& b, Eigen::MatrixXd& AtA, Eigen::VectorXd& Atb)
{
    const Eigen::Index n = A.rows(), m = A.cols();
    if (b.size() != n) throw DimensionMismatchError("right-hand side length must equal row count");
    AtA = Eigen::MatrixXd::Zero(m, m);
    Atb = Eigen::VectorXd::Zero(m);
#pragma omp parallel
    {
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd local_b = Eigen::VectorXd::Zero(m);
        const int nt = omp_get_num_threads(), t = omp_get_thread_num();
        const Eigen::Index lo = n * t / nt, hi = n * (t + 1) / nt;
        if (hi > lo) {
            local.selfadjointView<Eigen::Lower>().rankUpdate(A.middleRows(lo, hi - lo).transpose());
            local_b = A.middleRows(lo, hi - lo).transpose() * b.segment(lo, hi - lo);
        }
#pragma omp critical
        {
            AtA += local;
            Atb += local_b;
        }
    }
    AtA = AtA.selfadjointView<Eigen::Lower>();
}

} // namespace par

namespace ref {

Eigen::MatrixXd pairwise_distances(const RowMatrix& X, const Metric& m)
{
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) D(i, j) = D(j, i) = vec_distance(row(X, i), row(X, j), m);
    return D;
}

std::vector<int> mate_ranks(const RowMatrix& gallery, const RowMatrix& probes, const std::vector<int>& mate,
                            const Metric& m)
{
    check_mates(gallery, probes, mate);
    std::vector<int> ranks(probes.rows());
    for (Eigen::Index p = 0; p < probes.rows(); ++p) ranks[p] = rank_of_mate(gallery, row(probes, p), mate[p], m);
    return ranks;
}

Eigen::MatrixXd gram(const RowMatrix& X)
{
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd G(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < X.cols(); ++k) s += X(i, k) * X(j, k);
            G(i, j) = s;
        }
    return G;
}

void normal_equations(const RowMatrix& A, const Eigen::VectorXd& b, Eigen::MatrixXd& AtA, Eigen::VectorXd& Atb)
{
    const Eigen::Index n = A.rows(), m = A.cols();
    if (b.size() != n) throw DimensionMismatchError("right-hand side length must equal row count");
    AtA = Eigen::MatrixXd::Zero(m, m);
    Atb = Eigen::VectorXd::Zero(m);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index i = 0; i < m; ++i) {
            Atb(i) += A(r, i) * b(r);
            for (Eigen::Index j = 0; j < m; ++j) AtA(i, j) += A(r, i) * A(r, j);
        }
}

} // namespace ref

} // namespace anthro
