#include <benchmark/benchmark.h>

#include "twinforge/baselines.hpp"
#include "twinforge/twin_nn.hpp"
#include "twinforge/twin_svm.hpp"

namespace tf = twinforge;

namespace {

tf::Dataset embeddings(std::size_t n_major, std::size_t n_minor, std::size_t dim) {
  tf::Geometry g;
  g.dim = dim;
  g.separation = 1.5;
  return tf::gen_synthetic(tf::SyntheticKind::gaussian_pair, n_major, n_minor, g, 1);
}

// Forward and backward pass of one class network on a 30-sample minibatch.
void BM_TwinLossBatch(benchmark::State& state) {
  const auto planes = static_cast<std::size_t>(state.range(0));
  const auto data = embeddings(27, 3, 32);
  const Eigen::MatrixXd cols = data.features().transpose();
  const auto net = tf::ClassNetwork::random(1, 32, {256, 128}, planes, std::nullopt, 3);
  for (auto _ : state) {
    auto r = tf::twin_loss(net, cols, data.labels(), 1, 1.0);
    benchmark::DoNotOptimize(r.loss);
  }
  state.SetItemsProcessed(state.iterations() * 30);
}
BENCHMARK(BM_TwinLossBatch)->Arg(1)->Arg(4);

void BM_TwinNnTrainEpochs(benchmark::State& state) {
  const auto data = embeddings(1076, 105, 32);
  const auto val = embeddings(153, 15, 32);
  tf::TwinNnConfig cfg;
  cfg.max_epochs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto m = tf::train_twin_nn(data, val, cfg);
    benchmark::DoNotOptimize(m.best_epoch);
  }
}
BENCHMARK(BM_TwinNnTrainEpochs)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_TwinNnPredict(benchmark::State& state) {
  const auto data = embeddings(1076, 105, 32);
  tf::TwinNnModel model;
  model.classes = {-1, 1};
  model.networks.emplace(-1, tf::ClassNetwork::random(-1, 32, {256, 128}, 4, std::nullopt, 1));
  model.networks.emplace(1, tf::ClassNetwork::random(1, 32, {256, 128}, 4, std::nullopt, 2));
  for (auto _ : state) benchmark::DoNotOptimize(tf::predict_twin_nn(model, data));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_TwinNnPredict)->Unit(benchmark::kMillisecond);

void BM_FitTwinSvm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto data = embeddings(n, n / 10, 8);
  for (auto _ : state) {
    auto m = tf::fit_twin_svm(data, tf::TwinSvmConfig{});
    benchmark::DoNotOptimize(m.b1);
  }
}
BENCHMARK(BM_FitTwinSvm)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Adasyn(benchmark::State& state) {
  const auto data = embeddings(1000, 100, 32);
  for (auto _ : state) benchmark::DoNotOptimize(tf::adasyn_oversample(data, tf::AdasynConfig{}).size());
}
BENCHMARK(BM_Adasyn)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
