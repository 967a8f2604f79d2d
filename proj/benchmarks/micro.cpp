// Copyright 2026 The RuleFuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <memory>
#include <string>
#include <vector>

#include "rulefuse/bench/questions.hpp"
#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/random.hpp"
#include "rulefuse/dsl/regex.hpp"
#include "rulefuse/induction/embed.hpp"
#include "rulefuse/induction/optics.hpp"
#include "rulefuse/synergy/combine.hpp"

using namespace rulefuse;

namespace {

const std::filesystem::path kToy = std::filesystem::path(RULEFUSE_SOURCE_DIR) / "data" / "toy";

const std::vector<core::ChoiceQuestion>& dev() {
  static const auto questions = core::dataset_load(kToy / "dev.jsonl");
  return questions;
}

void BM_Combine(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  core::Rng rng(1);
  std::vector<double> l(k), e(k);
  for (auto& x : l) x = -20 * rng.unit();
  for (auto& x : e) x = 2 * rng.unit() - 1;
  for (auto _ : state) benchmark::DoNotOptimize(synergy::combine(l, e, 1.0));
}
BENCHMARK(BM_Combine)->Arg(2)->Arg(4)->Arg(16);

void BM_ScoreMatrix(benchmark::State& state) {
  const auto demo = bench::demo_ruleset();
  const auto& qs = dev();
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(symbolic::score_matrix(demo, qs[i++ % qs.size()]));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_ScoreMatrix);

void BM_EvaluateCachedDevSet(benchmark::State& state) {
  neural::ScorerHandle scorer{std::make_shared<neural::MockTable>(neural::MockTable::load(kToy / "mock_scorer.json"))};
  auto cache = synergy::EvaluationCache::build(scorer, dev(), synergy::GammaPolicy::fixed(1.0));
  const auto demo = bench::demo_ruleset();
  cache.evaluate(demo);
  for (auto _ : state) benchmark::DoNotOptimize(cache.correct_count(demo));
}
BENCHMARK(BM_EvaluateCachedDevSet);

void BM_RegexSearch(benchmark::State& state) {
  const auto re = dsl::Regex::compile("inventory: ([^\\n]*)");
  std::string text(static_cast<std::size_t>(state.range(0)), 'x');
  text += "\ninventory: log=3, plank=4\n";
  for (auto _ : state) benchmark::DoNotOptimize(re.search(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_RegexSearch)->Arg(100)->Arg(10000);

void BM_Optics(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  core::Rng rng(4);
  std::vector<std::vector<double>> points(n, std::vector<double>(5));
  for (std::size_t i = 0; i < n; ++i)
    for (auto& x : points[i]) x = static_cast<double>(i % 4) * 3.0 + rng.unit();
  for (auto _ : state) benchmark::DoNotOptimize(induction::optics_xi(points));
}
BENCHMARK(BM_Optics)->Arg(100)->Arg(400);

void BM_EmbedTexts(benchmark::State& state) {
  std::vector<std::string> texts;
  for (const auto& q : dev()) texts.push_back(q.belief.rendered);
  for (auto _ : state) benchmark::DoNotOptimize(induction::embed_texts(texts));
}
BENCHMARK(BM_EmbedTexts);

}  // namespace

BENCHMARK_MAIN();
