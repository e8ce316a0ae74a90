#include "anthro/errors.hpp"
#include "anthro/retrieval.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

using namespace anthro;

using oracles::brute_force;

namespace {

DescriptorSet make_set(const std::vector<std::pair<std::string, std::vector<double>>>& rows, Pose pose = Pose::Standing)
{
    DescriptorSet s(DescriptorType::Distance15, "test");
    for (const auto& [id, v] : rows) s.add({id, pose, v});
    return s;
}

/// Integer-valued vectors so distance ties are common.
DescriptorSet tie_heavy_set(int n, unsigned seed, Pose pose)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> u(0, 3);
    DescriptorSet s(DescriptorType::Distance15, "test");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int i : order) s.add({"S" + std::to_string(1000 + i), pose, {double(u(rng)), double(u(rng)), double(u(rng))}});
    return s;
}

} // namespace

TEST_CASE("rank_gallery: self match first")
{
    const auto g = make_set({{"A", {0, 0}}, {"B", {1, 1}}, {"C", {5, 5}}});
    const std::vector<double> q{1, 1};
    const auto r = rank_gallery(q, g, Metric::l2(), 3, "B");
    CHECK(r.matches[0].subject_id == "B");
    CHECK(r.matches[0].distance == 0);
    CHECK(r.query_id == "B");
    CHECK(r.metric == MetricKind::L2);
}

TEST_CASE("rank_gallery: hand-computed order")
{
    const auto g = make_set({{"A", {0, 0}}, {"B", {3, 4}}, {"C", {1, 0}}});
    const std::vector<double> q{0, 1};
    const auto r = rank_gallery(q, g, Metric::l1(), 3);
    REQUIRE(r.matches.size() == 3);
    CHECK(r.matches[0].subject_id == "A");
    CHECK(r.matches[0].distance == 1);
    CHECK(r.matches[1].subject_id == "C");
    CHECK(r.matches[1].distance == 2);
    CHECK(r.matches[2].subject_id == "B");
    CHECK(r.matches[2].distance == 6);
}

TEST_CASE("rank_gallery: ties ordered by subject id")
{
    const auto g = make_set({{"Z", {1, 0}}, {"M", {0, 1}}, {"A", {-1, 0}}});
    const std::vector<double> q{0, 0};
    const auto r = rank_gallery(q, g, Metric::l2(), 3);
    CHECK(r.matches[0].subject_id == "A");
    CHECK(r.matches[1].subject_id == "M");
    CHECK(r.matches[2].subject_id == "Z");
}

TEST_CASE("rank_gallery: errors")
{
    const auto g = make_set({{"A", {0, 0}}, {"B", {1, 1}}});
    const std::vector<double> q{0, 0}, q3{0, 0, 0};
    CHECK_THROWS_AS(rank_gallery(q, g, Metric::l2(), 0), InvalidKError);
    CHECK_THROWS_AS(rank_gallery(q, g, Metric::l2(), 3), InvalidKError);
    CHECK_THROWS_AS(rank_gallery(q3, g, Metric::l2(), 1), DimensionMismatchError);
    CHECK_THROWS_AS(rank_gallery(q, DescriptorSet(DescriptorType::Distance15, "x"), Metric::l2(), 1), EmptyGalleryError);
    CHECK_THROWS_AS(rank_gallery(q, g, Metric::mahalanobis({1, 1}), 1), IncompatibleMetricError);
}

TEST_CASE("rank_gallery equals brute force, prefixes agree")
{
    for (int n : {1, 2, 5, 17, 50, 100}) {
        const auto g = tie_heavy_set(n, static_cast<unsigned>(n), Pose::Standing);
        const auto probes = tie_heavy_set(10, 99u + n, Pose::Sitting);
        for (const Metric& m : {Metric::l1(), Metric::l2()})
            for (const auto& p : probes.entries()) {
                const auto ref = brute_force(p.vector, g, m);
                const auto full = rank_gallery(p.vector, g, m, n);
                REQUIRE(full.matches.size() == ref.size());
                for (int i = 0; i < n; ++i) {
                    CHECK(full.matches[i].subject_id == ref[i].subject_id);
                    CHECK(full.matches[i].distance == ref[i].distance);
                }
                for (int k : {1, n / 2 + 1}) {
                    const auto part = rank_gallery(p.vector, g, m, k);
                    for (int i = 0; i < k; ++i) CHECK(part.matches[i].subject_id == full.matches[i].subject_id);
                }
            }
    }
}

TEST_CASE("cmc: identical probe and gallery")
{
    const auto g = make_set({{"A", {0, 0}}, {"B", {1, 1}}, {"C", {5, 5}}});
    const auto c = cmc(g, g, Metric::l2());
    CHECK(c.at(1) == 1.0);
    CHECK(c.gallery_size == 3);
    CHECK(c.probe_count == 3);
}

TEST_CASE("cmc: two mates first, one second")
{
    const auto g = make_set({{"A", {0}}, {"B", {10}}, {"C", {20}}});
    const auto p = make_set({{"A", {1}}, {"B", {11}}, {"C", {14}}}, Pose::Sitting);
    const auto c = cmc(g, p, Metric::l1());
    REQUIRE(c.rate.size() == 3);
    CHECK(c.rate[0] == doctest::Approx(2.0 / 3.0));
    CHECK(c.rate[1] == 1.0);
    CHECK(c.rate[2] == 1.0);
}

TEST_CASE("cmc: tied mate takes the worst position")
{
    const auto g = make_set({{"A", {0}}, {"B", {2}}, {"C", {9}}});
    const auto p = make_set({{"B", {1}}}, Pose::Sitting);
    CHECK(mate_ranks(g, p, Metric::l1()) == std::vector<int>{2});
    const auto p2 = make_set({{"A", {1}}}, Pose::Sitting);
    CHECK(mate_ranks(g, p2, Metric::l1()) == std::vector<int>{2});
}

TEST_CASE("cmc: unmatched probe")
{
    const auto g = make_set({{"A", {0}}, {"B", {2}}});
    const auto p = make_set({{"Q", {1}}}, Pose::Sitting);
    CHECK_THROWS_AS(cmc(g, p, Metric::l1()), UnmatchedProbeError);
}

TEST_CASE("cmc: monotone, complete, and scale invariant")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0, 0.8);
    DescriptorSet g(DescriptorType::Distance15, "t"), p(DescriptorType::Distance15, "t"), p2(DescriptorType::Distance15, "t"),
        g2(DescriptorType::Distance15, "t");
    for (int i = 0; i < 60; ++i) {
        std::vector<double> v(4), w(4);
        for (int k = 0; k < 4; ++k) {
            v[k] = noise(rng) * 3;
            w[k] = v[k] + noise(rng);
        }
        const std::string id = "S" + std::to_string(i);
        g.add({id, Pose::Standing, v});
        p.add({id, Pose::Sitting, w});
        for (auto& x : v) x *= 12.5;
        for (auto& x : w) x *= 12.5;
        g2.add({id, Pose::Standing, v});
        p2.add({id, Pose::Sitting, w});
    }
    for (const Metric& m : {Metric::l1(), Metric::l2()}) {
        const auto c = cmc(g, p, m);
        for (std::size_t r = 1; r < c.rate.size(); ++r) CHECK(c.rate[r] >= c.rate[r - 1]);
        CHECK(c.rate.back() == 1.0);
        CHECK(c.rate.front() < 1.0);
        CHECK(cmc(g2, p2, m).rate == c.rate);
        CHECK(mate_ranks(g2, p2, m) == mate_ranks(g, p, m));
    }
    std::ostringstream csv;
    write_cmc_csv(csv, cmc_from_ranks({1, 2, 2}, 3));
    CHECK(csv.str().rfind("rank,rate\n1,", 0) == 0);
    CHECK(csv.str().find("\n3,1\n") != std::string::npos);
}

TEST_CASE("mated_probes keeps enrolled subjects only")
{
    const auto g = make_set({{"A", {0.0}}, {"B", {1.0}}});
    const auto p = make_set({{"A", {0.1}}, {"C", {2.0}}, {"B", {0.9}}}, Pose::Sitting);
    std::vector<std::string> dropped;
    const DescriptorSet kept = mated_probes(g, p, &dropped);
    REQUIRE(kept.size() == 2);
    CHECK(kept.entries()[0].subject_id == "A");
    CHECK(kept.entries()[1].subject_id == "B");
    CHECK(dropped == std::vector<std::string>{"C"});
    CHECK(cmc(g, kept, Metric::l2()).at(1) == 1.0);
    CHECK_THROWS_AS(cmc(g, p, Metric::l2()), UnmatchedProbeError);
}
