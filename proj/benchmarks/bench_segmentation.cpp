#include <random>

#include <benchmark/benchmark.h>

#include "svx/motion.hpp"
#include "svx/segmentation.hpp"
#include "svx/ssc.hpp"
#include "svx/synthetic.hpp"

namespace {

svx::VideoVolume noisy_clip(int width, int height, int frames) {
    return svx::synth::render_clip({svx::synth::Shape::ring, svx::synth::Motion::orbit, width, height, frames, 7, 6.0f});
}

void BM_VoxelGraph(benchmark::State& state) {
    const auto volume = noisy_clip(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) * 3 / 4, 10);
    for (auto _ : state) benchmark::DoNotOptimize(svx::build_voxel_graph(volume));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(volume.voxel_count()));
}
BENCHMARK(BM_VoxelGraph)->Arg(64)->Arg(160);

void BM_FhMerge(benchmark::State& state) {
    const auto volume = noisy_clip(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) * 3 / 4, 10);
    const auto edges = svx::build_voxel_graph(svx::gaussian_smooth(volume, 0.4));
    const std::vector<std::uint64_t> sizes(volume.voxel_count(), 1);
    for (auto _ : state) benchmark::DoNotOptimize(svx::fh_merge(sizes, edges, 0.2, 20));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(volume.voxel_count()));
}
BENCHMARK(BM_FhMerge)->Arg(64)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_BuildHierarchy(benchmark::State& state) {
    const auto volume = noisy_clip(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) * 3 / 4, 10);
    const svx::SegmentationParams params;
    for (auto _ : state) benchmark::DoNotOptimize(svx::build_hierarchy(volume, params));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(volume.voxel_count()));
}
BENCHMARK(BM_BuildHierarchy)->Arg(64)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_StreamSegment(benchmark::State& state) {
    const auto volume = noisy_clip(160, 120, static_cast<int>(state.range(0)));
    const svx::SegmentationParams params;
    for (auto _ : state) {
        svx::VolumeFrameStream frames(volume);
        benchmark::DoNotOptimize(svx::stream_segment(frames, params));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(volume.voxel_count()));
}
BENCHMARK(BM_StreamSegment)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_FlowAndDescriptor(benchmark::State& state) {
    const auto volume = noisy_clip(64, 48, 12);
    const auto labels = svx::extract_level(svx::build_hierarchy(volume, {}), svx::LevelPreset::medium);
    for (auto _ : state) {
        const auto flow = svx::compute_flow(volume);
        benchmark::DoNotOptimize(svx::ssc_descriptor(labels, flow));
    }
}
BENCHMARK(BM_FlowAndDescriptor)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
