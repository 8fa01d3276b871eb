#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "support.hpp"
#include "svx/error.hpp"
#include "svx/segmentation.hpp"

using namespace svx;
using svx::testing::random_volume;
using svx::testing::same_partition;
using svx::testing::TempDir;

namespace {

// Straightforward reference merge: relabel-on-union, no path compression.
std::vector<std::uint32_t> reference_merge(std::size_t n, std::vector<LatticeEdge> edges, double k,
                                           std::uint64_t min_size) {
    std::vector<std::uint32_t> comp(n);
    std::iota(comp.begin(), comp.end(), 0u);
    std::vector<double> internal(n, 0.0);
    std::vector<std::uint64_t> size(n, 1);
    auto merge = [&](std::uint32_t a, std::uint32_t b, double w) {
        const double in = std::max({w, internal[a], internal[b]});
        for (auto& c : comp)
            if (c == b) c = a;
        size[a] += size[b];
        internal[a] = in;
    };
    std::stable_sort(edges.begin(), edges.end(), [](const LatticeEdge& l, const LatticeEdge& r) {
        return std::tie(l.weight, l.a, l.b) < std::tie(r.weight, r.a, r.b);
    });
    for (const auto& e : edges) {
        const auto ca = comp[e.a], cb = comp[e.b];
        if (ca == cb) continue;
        const double ta = internal[ca] + k / size[ca];
        const double tb = internal[cb] + k / size[cb];
        if (e.weight <= std::min(ta, tb)) merge(ca, cb, e.weight);
    }
    while (true) {
        // Smallest undersized component (ties by lowest member), merged along its
        // first outgoing edge in sorted order. Scanning nodes in index order
        // visits each component first at its lowest member.
        std::uint32_t pick = UINT32_MAX;
        for (std::uint32_t i = 0; i < n; ++i) {
            const auto r = comp[i];
            if (size[r] < min_size && (pick == UINT32_MAX || size[r] < size[pick])) pick = r;
        }
        if (pick == UINT32_MAX) break;
        bool merged = false;
        for (const auto& e : edges) {
            const auto ca = comp[e.a], cb = comp[e.b];
            if (ca == cb || (ca != pick && cb != pick)) continue;
            merge(pick, ca == pick ? cb : ca, e.weight);
            merged = true;
            break;
        }
        if (!merged) break;
    }
    return comp;
}

std::vector<LatticeEdge> random_graph(std::size_t n, std::mt19937_64& rng) {
    std::vector<LatticeEdge> edges;
    std::uniform_int_distribution<int> w(0, 30);
    for (std::uint32_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, static_cast<float>(w(rng))});
    std::uniform_int_distribution<std::uint32_t> node(0, static_cast<std::uint32_t>(n - 1));
    for (int extra = 0; extra < 4; ++extra) {
        const auto a = node(rng), b = node(rng);
        if (a != b) edges.push_back({std::min(a, b), std::max(a, b), static_cast<float>(w(rng))});
    }
    return edges;
}

// Prim over each region separately, restarting on disconnected parts.
double reference_energy(const std::vector<std::uint32_t>& labels,
                        const std::vector<LatticeEdge>& edges, double tau) {
    double mst = 0.0;
    std::set<std::uint32_t> regions(labels.begin(), labels.end());
    for (auto r : regions) {
        std::vector<std::uint32_t> members;
        for (std::uint32_t i = 0; i < labels.size(); ++i)
            if (labels[i] == r) members.push_back(i);
        std::set<std::uint32_t> in{members.front()};
        while (in.size() < members.size()) {
            double best = INFINITY;
            std::uint32_t add = 0;
            for (const auto& e : edges) {
                if (labels[e.a] != r || labels[e.b] != r) continue;
                const bool ia = in.count(e.a), ib = in.count(e.b);
                if (ia != ib && e.weight < best) {
                    best = e.weight;
                    add = ia ? e.b : e.a;
                }
            }
            if (!std::isfinite(best)) {
                // Disconnected region: continue the spanning forest elsewhere.
                for (auto m : members)
                    if (!in.count(m)) {
                        in.insert(m);
                        break;
                    }
                continue;
            }
            in.insert(add);
            mst += best;
        }
    }
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> cross;
    for (const auto& e : edges) {
        auto a = labels[e.a], b = labels[e.b];
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        auto [it, fresh] = cross.emplace(std::make_pair(a, b), e.weight);
        if (!fresh) it->second = std::min<double>(it->second, e.weight);
    }
    double boundary = 0.0;
    for (const auto& [key, w] : cross) boundary += w;
    return tau * mst + boundary;
}

std::size_t brute_force_edge_count(int w, int h, int f, bool full) {
    std::size_t count = 0;
    const int n = w * h * f;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const int ti = i / (w * h), yi = i / w % h, xi = i % w;
            const int tj = j / (w * h), yj = j / w % h, xj = j % w;
            const int dt = std::abs(ti - tj), dy = std::abs(yi - yj), dx = std::abs(xi - xj);
            if (std::max({dt, dy, dx}) != 1) continue;
            if (full || dt + dy + dx == 1) ++count;
        }
    return count;
}

}  // namespace

TEST(VoxelGraph, TwoVoxelsGiveOneEdgeWithColorDistance) {
    VideoVolume v(2, 1, 1);
    v.at(0, 0, 0) = {0, 0, 0};
    v.at(0, 0, 1) = {3, 4, 12};
    const auto edges = build_voxel_graph(v);
    ASSERT_EQ(edges.size(), 1u);
    EXPECT_EQ(edges[0].a, 0u);
    EXPECT_EQ(edges[0].b, 1u);
    EXPECT_FLOAT_EQ(edges[0].weight, 13.0f);
}

TEST(VoxelGraph, EdgeCountsMatchBruteForceAdjacency) {
    for (auto [w, h, f] : {std::tuple{2, 2, 2}, {3, 4, 2}, {5, 1, 3}, {3, 3, 3}}) {
        const VideoVolume v(w, h, f);
        EXPECT_EQ(build_voxel_graph(v, Connectivity::six).size(), brute_force_edge_count(w, h, f, false));
        EXPECT_EQ(build_voxel_graph(v, Connectivity::twenty_six).size(),
                  brute_force_edge_count(w, h, f, true));
    }
    EXPECT_EQ(build_voxel_graph(VideoVolume(2, 2, 2)).size(), 12u);
}

TEST(VoxelGraph, EdgesAreUniqueAndConstantVolumeHasZeroWeights) {
    const VideoVolume v(4, 3, 3, Rgb{9, 9, 9});
    const auto edges = build_voxel_graph(v, Connectivity::twenty_six);
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& e : edges) {
        EXPECT_EQ(e.weight, 0.0f);
        EXPECT_TRUE(seen.emplace(std::min(e.a, e.b), std::max(e.a, e.b)).second);
    }
}

TEST(FhMerge, ThresholdDecidesTwoVoxelExample) {
    const std::vector<std::uint64_t> sizes{1, 1};
    const std::vector<LatticeEdge> edges{{0, 1, 100.0f}};
    const auto apart = fh_merge(sizes, edges, 0.2, 1);
    EXPECT_EQ(apart.region_count(), 2u);
    const auto forced = fh_merge(sizes, edges, 0.2, 5);
    EXPECT_EQ(forced.region_count(), 1u);
    EXPECT_EQ(forced.sizes[0], 2u);
    // Equality merges: 100 <= 0 + 100/1.
    EXPECT_EQ(fh_merge(sizes, edges, 100.0, 1).region_count(), 1u);
    EXPECT_EQ(fh_merge(sizes, edges, 99.9, 1).region_count(), 2u);
}

TEST(FhMerge, ZeroWeightsCollapseToOneRegion) {
    const VideoVolume v(5, 4, 3, Rgb{1, 2, 3});
    const auto labeling = fh_merge_voxels(v, build_voxel_graph(v), 0.0, 1);
    EXPECT_EQ(labeling.region_count(), 1u);
}

TEST(FhMerge, MatchesReferenceOnSmallRandomGraphs) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 9;
        const auto edges = random_graph(n, rng);
        const double k = static_cast<double>(rng() % 40);
        const std::uint64_t min_size = 1 + rng() % 4;
        const std::vector<std::uint64_t> sizes(n, 1);
        const auto got = fh_merge(sizes, edges, k, min_size);
        EXPECT_TRUE(same_partition(got.labels, reference_merge(n, edges, k, min_size)))
            << "trial " << trial;
    }
}

TEST(FhMerge, RejectsBadEdgesAndConstants) {
    const std::vector<std::uint64_t> sizes{1, 1};
    EXPECT_THROW(fh_merge(sizes, {{0, 2, 1.0f}}, 1.0, 1), ParameterError);
    EXPECT_THROW(fh_merge(sizes, {{1, 1, 1.0f}}, 1.0, 1), ParameterError);
    EXPECT_THROW(fh_merge(sizes, {}, -1.0, 1), ParameterError);
}

TEST(RegionGraph, ParallelEdgesKeepMinimumCrossingWeight) {
    const std::vector<std::uint32_t> labels{0, 0, 1, 1};
    const std::vector<LatticeEdge> edges{{0, 2, 3.0f}, {1, 3, 1.0f}, {1, 2, 2.0f}, {0, 1, 7.0f}};
    const auto region = build_region_edges(labels, edges);
    ASSERT_EQ(region.size(), 1u);
    EXPECT_FLOAT_EQ(region[0].weight, 1.0f);
}

TEST(RegionGraph, MatchesExhaustiveScan) {
    std::mt19937_64 rng(5);
    const VideoVolume v = random_volume(3, 3, 2, 11);
    const auto edges = build_voxel_graph(v);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::uint32_t> labels(v.voxel_count());
        for (auto& l : labels) l = static_cast<std::uint32_t>(rng() % 4);
        std::map<std::pair<std::uint32_t, std::uint32_t>, float> expect;
        for (const auto& e : edges) {
            auto a = labels[e.a], b = labels[e.b];
            if (a == b) continue;
            if (a > b) std::swap(a, b);
            auto [it, fresh] = expect.emplace(std::make_pair(a, b), e.weight);
            if (!fresh) it->second = std::min(it->second, e.weight);
        }
        const auto got = build_region_edges(labels, edges);
        ASSERT_EQ(got.size(), expect.size());
        for (const auto& e : got) {
            ASSERT_LT(e.a, e.b);
            EXPECT_FLOAT_EQ(e.weight, expect.at({e.a, e.b}));
        }
    }
}

TEST(Energy, SingletonsAndTwoVoxelRegion) {
    const std::vector<LatticeEdge> edges{{0, 1, 5.0f}};
    EXPECT_DOUBLE_EQ(segmentation_energy(std::vector<std::uint32_t>{0, 1}, edges, 2.0), 5.0);
    EXPECT_DOUBLE_EQ(segmentation_energy(std::vector<std::uint32_t>{0, 0}, edges, 2.0), 10.0);
}

TEST(Energy, AllThreeRegionLabelingsOfAPathMatchReference) {
    const std::vector<LatticeEdge> edges{{0, 1, 4.0f}, {1, 2, 1.0f}, {2, 3, 6.0f},
                                         {3, 4, 2.0f}, {4, 5, 3.0f}, {0, 5, 5.0f}};
    std::vector<std::uint32_t> labels(6);
    int checked = 0;
    for (int code = 0; code < 729; ++code) {
        int c = code;
        for (auto& l : labels) {
            l = static_cast<std::uint32_t>(c % 3);
            c /= 3;
        }
        for (double tau : {0.0, 0.5, 3.0}) {
            EXPECT_NEAR(segmentation_energy(labels, edges, tau), reference_energy(labels, edges, tau),
                        1e-9);
        }
        ++checked;
    }
    EXPECT_EQ(checked, 729);
}

TEST(Hierarchy, LevelsNestAndCoarsen) {
    const VideoVolume v = svx::testing::blocky_volume(24, 18, 6, 6, 3);
    SegmentationParams params;
    params.hie_num = 12;
    const Hierarchy h = build_hierarchy(v, params);
    ASSERT_EQ(h.level_count(), 12);
    std::size_t previous = h.region_count(1);
    for (int level = 1; level <= h.level_count(); ++level) {
        const auto labeling = h.labeling(level);
        ASSERT_EQ(labeling.labels.size(), v.voxel_count());
        EXPECT_EQ(labeling.region_count(), h.region_count(level));
        EXPECT_EQ(std::accumulate(labeling.region_sizes.begin(), labeling.region_sizes.end(), 0ull),
                  v.voxel_count());
        std::vector<std::uint64_t> counted(labeling.region_count(), 0);
        for (auto l : labeling.labels) ++counted.at(l);
        EXPECT_EQ(counted, labeling.region_sizes);
        EXPECT_LE(labeling.region_count(), previous);
        previous = labeling.region_count();
        if (level > 1) {
            const auto finer = h.labeling(level - 1);
            std::map<std::uint32_t, std::uint32_t> parent;
            for (std::size_t i = 0; i < finer.labels.size(); ++i) {
                auto [it, fresh] = parent.emplace(finer.labels[i], labeling.labels[i]);
                EXPECT_EQ(it->second, labeling.labels[i]);
            }
        }
    }
}

TEST(Hierarchy, TwoColorVolumeStaysTwoRegions) {
    VideoVolume v(12, 8, 4, Rgb{0, 0, 0});
    for (int t = 0; t < 4; ++t)
        for (int y = 0; y < 8; ++y)
            for (int x = 6; x < 12; ++x) v.at(t, y, x) = Rgb{255, 255, 255};
    SegmentationParams params;
    params.sigma = 0.0;
    params.hie_num = 6;
    const Hierarchy h = build_hierarchy(v, params);
    for (int level = 1; level <= 6; ++level) {
        EXPECT_EQ(h.region_count(level), 2u) << "level " << level;
    }
    const auto fine = h.labeling(1);
    EXPECT_NE(fine.at(0, 0, 0), fine.at(0, 0, 11));
    EXPECT_EQ(fine.at(0, 0, 0), fine.at(3, 7, 5));
}

TEST(Hierarchy, ConstantVolumeIsOneRegion) {
    const VideoVolume v(9, 7, 3, Rgb{50, 60, 70});
    SegmentationParams params;
    params.hie_num = 4;
    const Hierarchy h = build_hierarchy(v, params);
    for (int level = 1; level <= 4; ++level) EXPECT_EQ(h.region_count(level), 1u);
}

TEST(Hierarchy, PresetsAndRangeChecks) {
    EXPECT_EQ(preset_level(LevelPreset::fine), 8);
    EXPECT_EQ(preset_level(LevelPreset::medium), 16);
    EXPECT_EQ(preset_level(LevelPreset::coarse), 24);
    EXPECT_EQ(parse_level_preset("medium"), LevelPreset::medium);
    EXPECT_EQ(to_string(LevelPreset::coarse), "coarse");
    EXPECT_THROW(parse_level_preset("huge"), ParameterError);

    const VideoVolume v = random_volume(6, 5, 2, 4);
    SegmentationParams params;
    const Hierarchy h = build_hierarchy(v, params);
    EXPECT_EQ(h.level_count(), 30);
    EXPECT_EQ(extract_level(h, LevelPreset::fine).level, 8);
    EXPECT_THROW(h.labeling(31), RangeError);
    EXPECT_THROW(h.labeling(0), RangeError);
    EXPECT_THROW(extract_level(h, 31), RangeError);
}

TEST(Hierarchy, ThresholdConstantScalesWithLevel) {
    SegmentationParams params;
    params.c = 0.3;
    params.c_reg = 7.0;
    EXPECT_DOUBLE_EQ(params.threshold_constant(1), 0.3);
    EXPECT_DOUBLE_EQ(params.threshold_constant(2), 14.0);
    EXPECT_DOUBLE_EQ(params.threshold_constant(16), 112.0);
    params.c = 0.0;
    EXPECT_THROW(params.validate(), ParameterError);
}

TEST(LabelFiles, RoundTripPreservesPartition) {
    TempDir dir("svxl");
    const VideoVolume v = random_volume(7, 6, 3, 12);
    SegmentationParams params;
    params.hie_num = 5;
    const auto labeling = build_hierarchy(v, params).labeling(3);
    write_labels(dir / "l.svxl", labeling);
    const auto back = read_labels(dir / "l.svxl", 3);
    EXPECT_EQ(back.width, 7);
    EXPECT_EQ(back.height, 6);
    EXPECT_EQ(back.frame_count, 3);
    EXPECT_EQ(back.level, 3);
    EXPECT_EQ(back.labels, labeling.labels);
    EXPECT_EQ(back.region_sizes, labeling.region_sizes);
}

TEST(LabelFiles, SparseIdsAreRemappedDensely) {
    const auto labeling = make_labeling(3, 1, 1, {40, 7, 40});
    EXPECT_EQ(labeling.labels, (std::vector<std::uint32_t>{0, 1, 0}));
    EXPECT_EQ(labeling.region_sizes, (std::vector<std::uint64_t>{2, 1}));
}
