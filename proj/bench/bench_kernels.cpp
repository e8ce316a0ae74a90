// Serial reference kernels against their OpenMP counterparts.
#include "anthro/kernels.hpp"

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

namespace {

anthro::RowMatrix random_rows(Eigen::Index n, Eigen::Index d, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    anthro::RowMatrix X(n, d);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = g(rng);
    return X;
}

template <bool Parallel>
void BM_pairwise(benchmark::State& state)
{
    const auto X = random_rows(state.range(0), 48, 1);
    const auto m = anthro::Metric::l2();
    for (auto _ : state) {
        auto D = Parallel ? anthro::par::pairwise_distances(X, m) : anthro::ref::pairwise_distances(X, m);
        benchmark::DoNotOptimize(D.data());
    }
    state.SetComplexityN(state.range(0));
}

template <bool Parallel>
void BM_mate_ranks(benchmark::State& state)
{
    const auto G = random_rows(state.range(0), 15, 2);
    const anthro::RowMatrix P = G + 0.1 * random_rows(state.range(0), 15, 3);
    std::vector<int> mate(static_cast<std::size_t>(state.range(0)));
    std::iota(mate.begin(), mate.end(), 0);
    const auto m = anthro::Metric::l1();
    for (auto _ : state) {
        auto r = Parallel ? anthro::par::mate_ranks(G, P, mate, m) : anthro::ref::mate_ranks(G, P, mate, m);
        benchmark::DoNotOptimize(r.data());
    }
}

template <bool Parallel>
void BM_gram(benchmark::State& state)
{
    const auto X = random_rows(state.range(0), 128 * 128, 4);
    for (auto _ : state) {
        auto G = Parallel ? anthro::par::gram(X) : anthro::ref::gram(X);
        benchmark::DoNotOptimize(G.data());
    }
}

template <bool Parallel>
void BM_normal_equations(benchmark::State& state)
{
    const auto A = random_rows(state.range(0), 121, 5);
    const Eigen::VectorXd b = Eigen::VectorXd::Random(state.range(0));
    Eigen::MatrixXd AtA;
    Eigen::VectorXd Atb;
    for (auto _ : state) {
        if constexpr (Parallel)
            anthro::par::normal_equations(A, b, AtA, Atb);
        else
            anthro::ref::normal_equations(A, b, AtA, Atb);
        benchmark::DoNotOptimize(AtA.data());
    }
}

} // namespace

BENCHMARK(BM_pairwise<false>)->Name("pairwise_distances/ref")->Arg(200)->Arg(1000);
BENCHMARK(BM_pairwise<true>)->Name("pairwise_distances/par")->Arg(200)->Arg(1000)->UseRealTime();
BENCHMARK(BM_mate_ranks<false>)->Name("mate_ranks/ref")->Arg(200)->Arg(2000);
BENCHMARK(BM_mate_ranks<true>)->Name("mate_ranks/par")->Arg(200)->Arg(2000)->UseRealTime();
BENCHMARK(BM_gram<false>)->Name("gram/ref")->Arg(50)->Arg(200);
BENCHMARK(BM_gram<true>)->Name("gram/par")->Arg(50)->Arg(200)->UseRealTime();
BENCHMARK(BM_normal_equations<false>)->Name("normal_equations/ref")->Arg(5000)->Arg(20000);
BENCHMARK(BM_normal_equations<true>)->Name("normal_equations/par")->Arg(5000)->Arg(20000)->UseRealTime();

BENCHMARK_MAIN();
