// Serial reference vs OpenMP kernels on inputs sized like one engine call:
// overlap over a grid of glyph boxes, a 256² relevance mask, its mean, and
// heatmap resampling to the mask resolution.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "metaglyph/kernels.hpp"

using namespace metaglyph;
namespace k = metaglyph::kernels;

namespace {

std::vector<Rect> boxes(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(0, 1000), size(5, 60);
  std::vector<Rect> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Rect::from_xywh(pos(rng), pos(rng), size(rng), size(rng)));
  return out;
}

std::vector<Polyline> star_outline() {
  Polyline pl;
  pl.closed = true;
  for (int i = 0; i < 400; ++i) {
    const double t = 2 * std::numbers::pi * i / 400, r = 40 + 8 * std::sin(7 * t);
    pl.points.push_back({50 + r * std::cos(t), 50 + r * std::sin(t)});
  }
  return {pl};
}

template <auto F>
void overlap(benchmark::State& state) {
  const auto b = boxes(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(F(b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto F>
void mask(benchmark::State& state) {
  const auto outline = star_outline();
  const auto n = static_cast<std::size_t>(state.range(0));
  k::MaskSpec spec{Rect::from_xywh(0, 0, 100, 100), n, n, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(F(outline, spec));
}

template <auto F>
void mean(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<float> field(n * n);
  std::vector<std::uint8_t> m(n * n);
  std::mt19937_64 rng(2);
  for (std::size_t i = 0; i < field.size(); ++i) {
    field[i] = static_cast<float>(rng() % 1000) / 1000.0f;
    m[i] = rng() % 2;
  }
  for (auto _ : state) benchmark::DoNotOptimize(F(field, m));
}

template <auto F>
void resample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<float> src(64 * 64, 0.5f);
  for (auto _ : state) benchmark::DoNotOptimize(F(src, 64, 64, n, n));
}

}  // namespace

BENCHMARK(overlap<k::serial::overlap_fractions>)->Name("overlap/serial")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(overlap<k::parallel::overlap_fractions>)->Name("overlap/omp")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(mask<k::serial::fill_mask>)->Name("fill_mask/serial")->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(mask<k::parallel::fill_mask>)->Name("fill_mask/omp")->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(mean<k::serial::masked_mean>)->Name("masked_mean/serial")->Arg(256)->Arg(1024);
BENCHMARK(mean<k::parallel::masked_mean>)->Name("masked_mean/omp")->Arg(256)->Arg(1024);
BENCHMARK(resample<k::serial::resample_bilinear>)->Name("resample/serial")->Arg(256)->Arg(1024);
BENCHMARK(resample<k::parallel::resample_bilinear>)->Name("resample/omp")->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
