#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "convseg/anchors.hpp"
#include "convseg/baselines.hpp"
#include "convseg/evaluation.hpp"
#include "convseg/pipeline.hpp"

namespace {

using namespace convseg;

Embedding random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(dim);
  for (double& x : v) x = g(rng);
  return Embedding::unit(v);
}

AnchorSet random_anchors(std::mt19937_64& rng, std::size_t per_topic, std::size_t dim) {
  AnchorSet set;
  set.dim = dim;
  for (const std::string& name : default_topics()) {
    TopicAnchors t;
    t.topic = name;
    for (std::size_t a = 0; a < per_topic; ++a) {
      t.anchors.push_back(random_unit(rng, dim));
      t.cluster_sizes.push_back(1);
    }
    set.topics.push_back(std::move(t));
  }
  return set;
}

// Utterances drift between topics every 25 steps, each near one of its anchors.
std::vector<Embedding> call_near(const AnchorSet& anchors, std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 0.05);
  std::vector<Embedding> out;
  for (std::size_t i = 0; i < n; ++i) {
    const TopicAnchors& t = anchors.topics[(i / 25) % anchors.topics.size()];
    const Embedding& a = t.anchors[i % t.anchors.size()];
    std::vector<double> v(a.values().begin(), a.values().end());
    for (double& x : v) x += g(rng);
    out.push_back(Embedding::unit(v));
  }
  return out;
}

Transcript transcript_of(std::size_t n) {
  Transcript t{"bench", {}};
  for (std::size_t i = 0; i < n; ++i) t.utterances.push_back({i, "u", {}, {}, {}});
  return t;
}

void BM_SegmentCall(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const AnchorSet anchors = random_anchors(rng, 40, 384);
  const auto emb = call_near(anchors, n, rng);
  const Transcript transcript = transcript_of(n);
  const PipelineConfig cfg = PipelineConfig::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(segment_call(transcript, emb, anchors, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SegmentCall)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond)->Complexity();

void BM_Dbscan(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const AnchorSet centers = random_anchors(rng, 4, 64);
  const auto pts = call_near(centers, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(dbscan(pts, DbscanParams{}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dbscan)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMicrosecond)->Complexity();

void BM_GreedySegment(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto emb = call_near(random_anchors(rng, 2, 384), n, rng);
  GreedyParams p;
  p.tau = 0.25;
  for (auto _ : state) benchmark::DoNotOptimize(greedy_segment(emb, p));
}
BENCHMARK(BM_GreedySegment)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMicrosecond);

void BM_TextTiling(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto emb = call_near(random_anchors(rng, 2, 384), static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(texttiling_segment(emb, TextTilingParams{}));
}
BENCHMARK(BM_TextTiling)->Arg(500)->Unit(benchmark::kMicrosecond);

void BM_PkWindowDiff(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<std::string> ref(n), hyp(n);
  for (std::size_t i = 0; i < n; ++i) {
    ref[i] = "t" + std::to_string(i / 17);
    hyp[i] = "t" + std::to_string((i + rng() % 3) / 19);
  }
  const std::size_t k = default_k(n, n / 17 + 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pk(ref, hyp, k));
    benchmark::DoNotOptimize(window_diff(ref, hyp, k));
  }
}
BENCHMARK(BM_PkWindowDiff)->Arg(500)->Arg(5000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
