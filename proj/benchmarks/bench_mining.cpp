#include <benchmark/benchmark.h>

#include <map>

#include "ecoreport/miner.hpp"
#include "support/synthetic.hpp"

using namespace ecoreport;

namespace {

struct Workload {
  Corpus corpus;
  CriteriaSet criteria = default_criteria();
  StopList stop = StopList::english_default();
};

// Text over the shipped phrase vocabulary, so every criterion gets hits.
const Workload& workload(std::size_t docs) {
  static std::map<std::size_t, Workload> cache;
  auto [it, fresh] = cache.try_emplace(docs);
  if (fresh) {
    synthetic::Rng rng(docs);
    std::vector<std::string> vocab{"the", "annual", "report", "of", "and", "group"};
    for (const auto& c : it->second.criteria)
      for (const auto& a : c.alternatives)
        for (const auto& t : tokenize(a)) vocab.push_back(t);
    it->second.corpus = synthetic::random_corpus(rng, docs, 2000, 6000, vocab);
  }
  return it->second;
}

void BM_MineLinear(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(mine_linear(w.corpus, w.criteria, w.stop, false));
}

void BM_MineBinary(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const auto kw = build_sorted_keyword_file(w.corpus, w.stop, false);
    benchmark::DoNotOptimize(mine_binary(kw, w.corpus, w.criteria));
  }
}

// Lookup cost alone, keyword file prebuilt.
void BM_MineBinaryLookup(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  const auto kw = build_sorted_keyword_file(w.corpus, w.stop, false);
  for (auto _ : state) benchmark::DoNotOptimize(mine_binary(kw, w.corpus, w.criteria));
}

void BM_MineLinearThreads(benchmark::State& state) {
  const auto& w = workload(200);
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(mine_linear(w.corpus, w.criteria, w.stop, false, threads));
}

}  // namespace

BENCHMARK(BM_MineLinear)->Arg(10)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MineBinary)->Arg(10)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MineBinaryLookup)->Arg(10)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MineLinearThreads)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
