// Serial vs OpenMP kernels on the quartic test problem.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "parahess/kernels.hpp"
#include "parahess/problem.hpp"
#include "parahess/residual.hpp"

using namespace parahess;

namespace {

double norm2(std::span<const double> z) {
    double q = 0.0;
    for (double v : z) q += v * v;
    return q;
}

ProblemSpec quartic(int n, double h) {
    const auto op = SymOpSpec::sigma_k_root(n, n);
    auto u = [](double t, std::span<const double> z) {
        const double q = norm2(z);
        return (1.0 + t) * q + 0.1 * q * q;
    };
    return ProblemSpec::make(
        "quartic", make_ball_domain(n, 1.0, 2.0, h), TimeGrid::make(0.25, 16), op,
        [](double, std::span<const double> z, double r) { return r - norm2(z); },
        [](std::span<const double>) { return 1.0; }, u, [u](std::span<const double> z) { return u(0.0, z); });
}

// args: n, 1/h, exec (0 serial, 1 parallel)
const ProblemSpec& cached(int n, int inv_h) {
    static std::vector<std::pair<std::pair<int, int>, ProblemSpec>> store;
    for (const auto& [key, p] : store)
        if (key == std::pair{n, inv_h}) return p;
    store.emplace_back(std::pair{n, inv_h}, quartic(n, 1.0 / inv_h));
    return store.back().second;
}

Exec exec_of(const benchmark::State& s) { return s.range(2) ? Exec::parallel : Exec::serial; }

void BM_slice_operator(benchmark::State& s) {
    const auto& p = cached(static_cast<int>(s.range(0)), static_cast<int>(s.range(1)));
    for (auto _ : s) benchmark::DoNotOptimize(slice_operator(*p.domain, p.op, p.u0, 1e-10, exec_of(s)));
    s.counters["nodes"] = static_cast<double>(p.domain->interior().size());
    s.counters["threads"] = exec_of(s) == Exec::parallel ? parallel_threads() : 1;
}

void BM_explicit_update(benchmark::State& s) {
    const auto& p = cached(static_cast<int>(s.range(0)), static_cast<int>(s.range(1)));
    for (auto _ : s) benchmark::DoNotOptimize(explicit_update(p, p.u0, 0.0, 1e-4, kDefaultEpsG, exec_of(s)));
    s.counters["nodes"] = static_cast<double>(p.domain->interior().size());
}

void BM_sor_sweep(benchmark::State& s) {
    const auto& p = cached(static_cast<int>(s.range(0)), static_cast<int>(s.range(1)));
    std::vector<double> u(p.u0.begin(), p.u0.end());
    for (auto _ : s) benchmark::DoNotOptimize(sor_sweep(*p.domain, u, 1.5, exec_of(s)));
    s.counters["nodes"] = static_cast<double>(p.domain->interior().size());
}

void grid(benchmark::internal::Benchmark* b) {
    for (int exec : {0, 1}) {
        b->Args({1, 64, exec});
        b->Args({2, 8, exec});
        b->Args({2, 16, exec});
    }
    b->ArgNames({"n", "inv_h", "parallel"})->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(BM_slice_operator)->Apply(grid);
BENCHMARK(BM_explicit_update)->Apply(grid);
BENCHMARK(BM_sor_sweep)->Apply(grid);

BENCHMARK_MAIN();
