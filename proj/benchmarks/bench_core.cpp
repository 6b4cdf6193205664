// bench_core.cpp — eigensolver, expectation evaluation and Wigner transform timings

#include <benchmark/benchmark.h>

#include "rabi/eigensolver.hpp"
#include "rabi/hamiltonian.hpp"
#include "rabi/quench.hpp"
#include "rabi/wigner.hpp"

namespace {

void bm_eigendecompose(benchmark::State& state) {
    const rabi::ModelParams p{1.0, 10.0, 2.0, static_cast<int>(state.range(0))};
    const Eigen::MatrixXd h = rabi::build_hamiltonian(p).sym;
    rabi::EigensolverOptions opts;
    opts.compute_vectors = state.range(1) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(rabi::eigendecompose(h, opts));
}
BENCHMARK(bm_eigendecompose)->ArgsProduct({{64, 128, 256, 512}, {0, 1}})->Unit(benchmark::kMillisecond);

void bm_expectation(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto st = rabi::quench({1.0, 0.1, 0.0, n}, {1.0, 10.0, 2.0, n});
    const auto obs = rabi::to_eigenbasis(rabi::build_observable(rabi::ObservableKind::N, n), *st.decomposition);
    const rabi::ExpectationEvaluator eval(st, obs);
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval(t));
        t += 0.37;
    }
    state.counters["support"] = static_cast<double>(st.support.size());
}
BENCHMARK(bm_expectation)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void bm_wigner(benchmark::State& state) {
    const int n = 200;
    const auto st = rabi::quench({1.0, 0.1, 0.0, n}, {1.0, 5.0, 2.0, n});
    const Eigen::MatrixXcd rho = rabi::reduce_field(rabi::state_at_time(st, 1000.0));
    const auto points = static_cast<int>(state.range(0));
    const rabi::WignerGridSpec spec{-20.0, 20.0, points, -20.0, 20.0, points};
    for (auto _ : state) benchmark::DoNotOptimize(rabi::wigner_transform(rho, spec));
}
BENCHMARK(bm_wigner)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
