#include <benchmark/benchmark.h>

#include "eegcs/prox.hpp"
#include "eegcs/rng.hpp"
#include "eegcs/sensing.hpp"
#include "eegcs/solvers.hpp"

using namespace eegcs;

namespace {

Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

// Smooth multi-channel test signal: a few shared sinusoids plus a little noise.
Matrix smooth_signal(Index n, Index channels) {
    Matrix x(n, channels);
    const Matrix noise = gaussian(n, channels, 99);
    for (Index c = 0; c < channels; ++c)
        for (Index t = 0; t < n; ++t) {
            const double s = static_cast<double>(t) / static_cast<double>(n);
            x(t, c) = std::sin(6.0 * s + 0.1 * static_cast<double>(c)) + 0.3 * std::cos(19.0 * s) +
                      0.01 * noise(t, c);
        }
    return x / x.norm();
}

struct Problem {
    SensingMatrix phi;
    AnalysisDictionary omega;
    SynthesisDictionary psi;
    Matrix y;
};

Problem problem(Index n, Index channels, double ssr_percent) {
    const auto m = static_cast<Index>(std::lround(ssr_percent * static_cast<double>(n) / 100.0));
    auto phi = make_gaussian_sensing(m, n, 7);
    Matrix y = phi.entries() * smooth_signal(n, channels);
    return {std::move(phi), make_second_order_difference(n), make_wavelet_synthesis(n), std::move(y)};
}

void BM_SoftThreshold(benchmark::State& state) {
    const Matrix v = gaussian(state.range(0), 23, 1);
    for (auto _ : state) benchmark::DoNotOptimize(soft_threshold(v, 0.3));
}
BENCHMARK(BM_SoftThreshold)->Arg(256)->Arg(1024);

void BM_Svt(benchmark::State& state) {
    const Matrix x = gaussian(state.range(0), 23, 2);
    for (auto _ : state) benchmark::DoNotOptimize(svt(x, 0.7));
}
BENCHMARK(BM_Svt)->Arg(256)->Arg(1024);

void BM_Omp(benchmark::State& state) {
    const auto p = problem(256, 1, static_cast<double>(state.range(0)));
    const Vector y = p.y.col(0);
    for (auto _ : state) benchmark::DoNotOptimize(omp(y, p.phi, p.psi, p.phi.measurements() / 4, 0.0));
}
BENCHMARK(BM_Omp)->Arg(25)->Arg(45)->Unit(benchmark::kMillisecond);

void BM_Somp(benchmark::State& state) {
    const auto p = problem(256, 23, static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(somp(p.y, p.phi, p.psi, p.phi.measurements() / 4, 0.0));
}
BENCHMARK(BM_Somp)->Arg(25)->Arg(45)->Unit(benchmark::kMillisecond);

void BM_Sgap(benchmark::State& state) {
    const auto p = problem(256, 23, static_cast<double>(state.range(0)));
    const Index q = p.omega.rows();
    const Index target = q - 2 * (p.phi.measurements() / 4);
    for (auto _ : state) benchmark::DoNotOptimize(sgap(p.y, p.phi, p.omega, target, q / 2));
}
BENCHMARK(BM_Sgap)->Arg(25)->Arg(45)->Unit(benchmark::kMillisecond);

void BM_AnalysisL1(benchmark::State& state) {
    const auto p = problem(256, 1, static_cast<double>(state.range(0)));
    const Vector y = p.y.col(0);
    auto params = AdmmParams::constrained_defaults();
    params.inner.max_iter = 2000;
    for (auto _ : state) benchmark::DoNotOptimize(analysis_l1(y, p.phi, p.omega, params));
}
BENCHMARK(BM_AnalysisL1)->Arg(35)->Unit(benchmark::kMillisecond);

void BM_SclrAdmm(benchmark::State& state) {
    const auto p = problem(256, 23, static_cast<double>(state.range(0)));
    const AdmmParams params;
    for (auto _ : state) benchmark::DoNotOptimize(sclr_admm(p.y, p.phi, p.omega, params));
}
BENCHMARK(BM_SclrAdmm)->Arg(25)->Arg(45)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
