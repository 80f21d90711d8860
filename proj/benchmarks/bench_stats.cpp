#include <benchmark/benchmark.h>

#include "ecoreport/mda.hpp"
#include "ecoreport/sem.hpp"
#include "support/synthetic.hpp"

using namespace ecoreport;

namespace {

void BM_FitMda(benchmark::State& state) {
  synthetic::Rng rng(1);
  std::vector<std::vector<double>> means(3, std::vector<double>(10, 0.0));
  means[1][0] = means[2][1] = 1.0;
  const auto d = synthetic::gaussian_groups(rng, means, static_cast<std::size_t>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(run_mda(d));
}

// Three-construct model on data with that structure.
void BM_FitSem(benchmark::State& state) {
  const SemModelSpec model = parse_model(R"(
[observed]
v1 v2 v3 v4 v5 v6 v7 v8 v9 v10
[latents]
a b c
[loadings]
a -> v1 free
a -> v2 free
a -> v3 free
b -> v4 free
b -> v5 free
c -> v6 free
c -> v7 free
c -> v8 free
c -> v9 free
c -> v10 free
[covariances]
a <-> b free
a <-> c free
b <-> c free
)");
  synthetic::Rng rng(2);
  const std::size_t n = 539;
  Matrix x(n, 10);
  for (std::size_t r = 0; r < n; ++r) {
    const double f[3] = {synthetic::normal(rng), synthetic::normal(rng), synthetic::normal(rng)};
    const double shared = synthetic::normal(rng);
    for (std::size_t j = 0; j < 10; ++j) {
      const std::size_t k = j < 3 ? 0 : (j < 5 ? 1 : 2);
      x(r, j) = 0.7 * f[k] + 0.3 * shared + 0.6 * synthetic::normal(rng);
    }
  }
  const Matrix s = sample_covariance(x);
  for (auto _ : state) benchmark::DoNotOptimize(fit_model(model, s, n));
}

}  // namespace

BENCHMARK(BM_FitMda)->Arg(50)->Arg(200)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FitSem)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
