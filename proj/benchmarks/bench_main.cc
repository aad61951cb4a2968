#include <benchmark/benchmark.h>

#include "spoofsim/features.h"
#include "spoofsim/gmm.h"
#include "spoofsim/room.h"
#include "spoofsim/rng.h"
#include "spoofsim/signal.h"

namespace spoofsim {
namespace {

Waveform Noise(double seconds, int fs) {
  Rng rng(1);
  Waveform w{std::vector<double>(static_cast<std::size_t>(seconds * fs)), fs};
  for (double& v : w.samples) v = 0.1 * rng.Normal();
  return w;
}

void BM_ConvolveFft(benchmark::State& state) {
  const Waveform x = Noise(3.0, 96000);
  const Waveform h = Noise(static_cast<double>(state.range(0)) / 1000.0, 96000);
  for (auto _ : state) benchmark::DoNotOptimize(ConvolveFft(x.samples, h.samples));
}
BENCHMARK(BM_ConvolveFft)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SimulateRir(benchmark::State& state) {
  const char* labels[] = {"aaa", "bbb", "ccc"};
  Rng rng(2);
  const auto room = room::SampleEnvironment(room::EnvironmentLabel::Parse(labels[state.range(0)]),
                                            std::nullopt, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(room::SimulateRir(room, room.talker, room.mic,
                                               room::Directivity::kCardioid, room.talker - room.mic, 96000));
  }
}
BENCHMARK(BM_SimulateRir)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_Resample(benchmark::State& state) {
  const Waveform x = Noise(3.0, 96000);
  for (auto _ : state) benchmark::DoNotOptimize(Resample(x, 16000));
}
BENCHMARK(BM_Resample)->Unit(benchmark::kMillisecond);

void BM_Cqcc(benchmark::State& state) {
  const Waveform x = Noise(3.0, 16000);
  for (auto _ : state) benchmark::DoNotOptimize(features::Cqcc(x));
}
BENCHMARK(BM_Cqcc)->Unit(benchmark::kMillisecond);

void BM_Lfcc(benchmark::State& state) {
  const Waveform x = Noise(3.0, 16000);
  for (auto _ : state) benchmark::DoNotOptimize(features::Lfcc(x));
}
BENCHMARK(BM_Lfcc)->Unit(benchmark::kMillisecond);

void BM_TrainGmm(benchmark::State& state) {
  Rng rng(3);
  features::FeatureMatrix x(20000, 90);
  for (double& v : x.values) v = rng.Normal();
  gmm::TrainConfig cfg;
  cfg.components = static_cast<int>(state.range(0));
  cfg.em_iters = 5;
  for (auto _ : state) benchmark::DoNotOptimize(gmm::TrainGmm(x, cfg));
}
BENCHMARK(BM_TrainGmm)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
}  // namespace spoofsim

BENCHMARK_MAIN();
