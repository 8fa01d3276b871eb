#include "svx/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>
#include <unordered_map>

#include "disjoint_set.hpp"

namespace svx {
namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();

float color_distance(const Rgb& p, const Rgb& q) {
    const double dr = static_cast<double>(p.r) - q.r;
    const double dg = static_cast<double>(p.g) - q.g;
    const double db = static_cast<double>(p.b) - q.b;
    return static_cast<float>(std::sqrt(dr * dr + dg * dg + db * db));
}

struct Offset {
    int dt, dy, dx;
};

std::vector<Offset> forward_offsets(Connectivity connectivity) {
    if (connectivity == Connectivity::six) return {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
    std::vector<Offset> offsets;
    for (int dt = -1; dt <= 1; ++dt)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const bool forward = dt > 0 || (dt == 0 && (dy > 0 || (dy == 0 && dx > 0)));
                if (forward) offsets.push_back({dt, dy, dx});
            }
    return offsets;
}

// Lattice edges over `frames` frames; with `skip_first_frame` the edges lying
// entirely inside frame 0 are left out (that frame is already committed).
std::vector<LatticeEdge> lattice_edges(std::span<const Rgb> voxels, int width, int height, int frames,
                                       Connectivity connectivity, bool skip_first_frame) {
    const auto offsets = forward_offsets(connectivity);
    std::vector<LatticeEdge> edges;
    edges.reserve(voxels.size() * offsets.size());
    const auto index = [&](int t, int y, int x) {
        return static_cast<std::uint32_t>((static_cast<std::size_t>(t) * height + y) * width + x);
    };
    for (int t = 0; t < frames; ++t) {
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const std::uint32_t a = index(t, y, x);
                for (const Offset& o : offsets) {
                    const int nt = t + o.dt, ny = y + o.dy, nx = x + o.dx;
                    if (nt >= frames || ny < 0 || ny >= height || nx < 0 || nx >= width) continue;
                    if (skip_first_frame && t == 0 && nt == 0) continue;
                    const std::uint32_t b = index(nt, ny, nx);
                    edges.push_back({a, b, color_distance(voxels[a], voxels[b])});
                }
            }
        }
    }
    return edges;
}

void check_voxel_capacity(std::size_t count) {
    if (count >= kUnassigned) throw CapacityError("volume too large for 32-bit voxel ids");
}

}  // namespace

// ---- params --------------------------------------------------------------

void SegmentationParams::validate() const {
    if (!(c > 0.0)) throw ParameterError("c must be positive");
    if (!(c_reg > 0.0)) throw ParameterError("c_reg must be positive");
    if (min_size < 1) throw ParameterError("min_size must be at least 1");
    if (!(sigma >= 0.0)) throw ParameterError("sigma must be non-negative");
    if (stream_range < 1) throw ParameterError("stream range must be at least 1 frame");
    if (hie_num < 1) throw ParameterError("hierarchy needs at least one level");
}

double SegmentationParams::threshold_constant(int level) const {
    return level <= 1 ? c : c_reg * level;
}

// ---- hierarchy -----------------------------------------------------------

Hierarchy::Hierarchy(int width, int height, int frame_count, std::vector<std::uint32_t> base_labels,
                     std::vector<std::vector<std::uint32_t>> parent_maps,
                     std::vector<std::vector<std::uint64_t>> region_sizes)
    : width_(width),
      height_(height),
      frames_(frame_count),
      base_labels_(std::move(base_labels)),
      parent_maps_(std::move(parent_maps)),
      region_sizes_(std::move(region_sizes)) {
    if (region_sizes_.empty() || parent_maps_.size() + 1 != region_sizes_.size()) {
        throw ParameterError("hierarchy needs one parent map per adjacent level pair");
    }
}

void Hierarchy::check_level(int level) const {
    if (level < 1 || level > level_count()) {
        throw RangeError("level " + std::to_string(level) + " out of range; hierarchy has " +
                         std::to_string(level_count()) + " levels (1.." +
                         std::to_string(level_count()) + ")");
    }
}

std::size_t Hierarchy::region_count(int level) const {
    check_level(level);
    return region_sizes_[level - 1].size();
}

std::span<const std::uint64_t> Hierarchy::region_sizes(int level) const {
    check_level(level);
    return region_sizes_[level - 1];
}

std::span<const std::uint32_t> Hierarchy::parent_map(int level) const {
    if (level < 1 || level >= level_count()) {
        throw RangeError("no parent map above level " + std::to_string(level));
    }
    return parent_maps_[level - 1];
}

SupervoxelLabeling Hierarchy::labeling(int level) const {
    check_level(level);
    SupervoxelLabeling out;
    out.level = level;
    out.width = width_;
    out.height = height_;
    out.frame_count = frames_;
    out.region_sizes = region_sizes_[level - 1];

    // Compose parent maps into a single level-1 -> level-h table.
    std::vector<std::uint32_t> table(region_sizes_[0].size());
    std::iota(table.begin(), table.end(), 0u);
    for (int h = 1; h < level; ++h) {
        const auto& parent = parent_maps_[h - 1];
        for (auto& label : table) label = parent[label];
    }
    out.labels.resize(base_labels_.size());
    std::transform(base_labels_.begin(), base_labels_.end(), out.labels.begin(),
                   [&](std::uint32_t label) { return table[label]; });
    return out;
}

// ---- graphs --------------------------------------------------------------

std::vector<LatticeEdge> build_voxel_graph(const VideoVolume& volume, Connectivity connectivity) {
    check_voxel_capacity(volume.voxel_count());
    return lattice_edges(volume.voxels(), volume.width(), volume.height(), volume.frame_count(),
                         connectivity, false);
}

std::vector<LatticeEdge> build_region_edges(std::span<const std::uint32_t> node_labels,
                                            std::span<const LatticeEdge> edges) {
    std::vector<LatticeEdge> crossing;
    crossing.reserve(edges.size() / 4);
    for (const LatticeEdge& e : edges) {
        const std::uint32_t la = node_labels[e.a];
        const std::uint32_t lb = node_labels[e.b];
        if (la == lb) continue;
        crossing.push_back({std::min(la, lb), std::max(la, lb), e.weight});
    }
    std::sort(crossing.begin(), crossing.end(), [](const LatticeEdge& x, const LatticeEdge& y) {
        return std::tie(x.a, x.b, x.weight) < std::tie(y.a, y.b, y.weight);
    });
    // The first entry of each (a, b) run carries the minimum weight.
    const auto last = std::unique(crossing.begin(), crossing.end(),
                                  [](const LatticeEdge& x, const LatticeEdge& y) {
                                      return x.a == y.a && x.b == y.b;
                                  });
    crossing.erase(last, crossing.end());
    crossing.shrink_to_fit();
    return crossing;
}

RegionGraph build_region_graph(const SupervoxelLabeling& prev, std::span<const LatticeEdge> edges) {
    RegionGraph graph;
    graph.node_count = prev.region_count();
    graph.node_sizes = prev.region_sizes;
    graph.edges = build_region_edges(prev.labels, edges);
    return graph;
}

// ---- merging -------------------------------------------------------------

NodePartition fh_merge(std::span<const std::uint64_t> node_sizes, std::vector<LatticeEdge> edges,
                       double threshold_constant, std::uint64_t min_size, const MergeSeed* seed) {
    const std::size_t n = node_sizes.size();
    if (n == 0) throw ParameterError("fh_merge needs at least one node");
    if (!(threshold_constant >= 0.0)) throw ParameterError("threshold constant must be non-negative");
    check_voxel_capacity(n);
    for (const LatticeEdge& e : edges) {
        if (e.a >= n || e.b >= n || e.a == e.b) {
            throw ParameterError("edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) +
                                 ") does not join two distinct nodes");
        }
    }

    detail::DisjointSet sets(n);
    for (std::uint32_t i = 0; i < n; ++i) sets.mass(i) = node_sizes[i];

    if (seed != nullptr) {
        if (seed->node_group.size() != n) throw ParameterError("merge seed does not cover every node");
        std::vector<std::uint32_t> group_root(seed->group_size.size(), kUnassigned);
        for (std::uint32_t i = 0; i < n; ++i) {
            const std::int32_t g = seed->node_group[i];
            if (g < 0) continue;
            if (group_root[g] == kUnassigned) {
                group_root[g] = i;
                sets.group(i) = g;
            } else {
                group_root[g] = sets.unite(sets.find(group_root[g]), i);
            }
        }
        for (std::size_t g = 0; g < group_root.size(); ++g) {
            if (group_root[g] == kUnassigned) continue;
            const std::uint32_t root = sets.find(group_root[g]);
            sets.mass(root) = seed->group_size[g];
            sets.internal(root) = seed->group_internal[g];
            sets.group(root) = static_cast<std::int32_t>(g);
        }
    }

    std::sort(edges.begin(), edges.end(), edge_order);

    const double k = threshold_constant;
    auto relaxed = [&](std::uint32_t root) {
        return static_cast<double>(sets.internal(root)) + k / static_cast<double>(sets.mass(root));
    };
    auto join = [&](std::uint32_t ra, std::uint32_t rb, float weight) {
        const float internal = std::max({weight, sets.internal(ra), sets.internal(rb)});
        const std::uint32_t root = sets.unite(ra, rb);
        sets.internal(root) = internal;
        return root;
    };

    for (const LatticeEdge& e : edges) {
        const std::uint32_t ra = sets.find(e.a);
        const std::uint32_t rb = sets.find(e.b);
        if (ra == rb) continue;
        if (sets.group(ra) >= 0 && sets.group(rb) >= 0) continue;
        if (e.weight <= std::min(relaxed(ra), relaxed(rb))) join(ra, rb, e.weight);
    }

    if (min_size > 1) {
        // Outgoing edge lists (indices into the sorted edge array) are only
        // needed for undersized components: joining one with a component
        // that is already large enough can never leave it undersized.
        // Ties between equally small components go to the lowest member node.
        using Entry = std::tuple<std::uint64_t, std::uint32_t, std::uint32_t>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> small;
        std::vector<std::vector<std::uint32_t>> outgoing(n);
        std::vector<char> tracked(n, 0);
        std::vector<std::uint32_t> lowest(n, kUnassigned);
        for (std::uint32_t i = 0; i < n; ++i) {
            const std::uint32_t root = sets.find(i);
            lowest[root] = std::min(lowest[root], i);
        }
        for (std::uint32_t i = 0; i < n; ++i) {
            if (sets.find(i) == i && sets.mass(i) < min_size) {
                tracked[i] = 1;
                small.push({sets.mass(i), lowest[i], i});
            }
        }
        if (!small.empty()) {
            for (std::uint32_t idx = 0; idx < edges.size(); ++idx) {
                const std::uint32_t ra = sets.find(edges[idx].a);
                const std::uint32_t rb = sets.find(edges[idx].b);
                if (ra == rb) continue;
                if (tracked[ra]) outgoing[ra].push_back(idx);
                if (tracked[rb]) outgoing[rb].push_back(idx);
            }
        }
        while (!small.empty()) {
            const auto [mass, low, root] = small.top();
            small.pop();
            if (sets.find(root) != root || sets.mass(root) != mass) continue;

            auto& list = outgoing[root];
            std::uint32_t best = kUnassigned;
            std::uint32_t best_other = kUnassigned;
            std::size_t keep = 0;
            for (std::uint32_t idx : list) {
                const std::uint32_t ra = sets.find(edges[idx].a);
                const std::uint32_t rb = sets.find(edges[idx].b);
                if (ra == rb) continue;
                list[keep++] = idx;
                const std::uint32_t other = ra == root ? rb : ra;
                if (sets.group(root) >= 0 && sets.group(other) >= 0) continue;
                if (idx < best) {
                    best = idx;
                    best_other = other;
                }
            }
            list.resize(keep);
            if (best == kUnassigned) continue;

            const bool other_tracked = tracked[best_other] && sets.mass(best_other) < min_size;
            const std::uint32_t merged = join(root, best_other, edges[best].weight);
            const std::uint32_t absorbed = merged == root ? best_other : root;
            lowest[merged] = std::min(lowest[root], lowest[best_other]);
            if (sets.mass(merged) < min_size) {
                if (!other_tracked) {
                    throw std::logic_error("undersized merge partner without an edge list");
                }
                auto& into = outgoing[merged];
                auto& from = outgoing[absorbed];
                into.insert(into.end(), from.begin(), from.end());
                std::vector<std::uint32_t>().swap(from);
                tracked[merged] = 1;
                small.push({sets.mass(merged), lowest[merged], merged});
            } else {
                std::vector<std::uint32_t>().swap(outgoing[root]);
                std::vector<std::uint32_t>().swap(outgoing[best_other]);
            }
        }
    }

    NodePartition out;
    out.labels.resize(n);
    std::vector<std::uint32_t> label_of_root(n, kUnassigned);
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t root = sets.find(i);
        if (label_of_root[root] == kUnassigned) {
            label_of_root[root] = static_cast<std::uint32_t>(out.sizes.size());
            out.sizes.push_back(sets.mass(root));
            out.internal.push_back(sets.internal(root));
            out.group.push_back(sets.group(root));
        }
        out.labels[i] = label_of_root[root];
    }
    return out;
}

SupervoxelLabeling fh_merge_voxels(const VideoVolume& volume, std::span<const LatticeEdge> edges,
                                   double threshold_constant, std::uint64_t min_size) {
    const std::vector<std::uint64_t> sizes(volume.voxel_count(), 1);
    NodePartition part = fh_merge(sizes, {edges.begin(), edges.end()}, threshold_constant, min_size);
    SupervoxelLabeling out;
    out.level = 1;
    out.width = volume.width();
    out.height = volume.height();
    out.frame_count = volume.frame_count();
    out.labels = std::move(part.labels);
    out.region_sizes = std::move(part.sizes);
    return out;
}

double segmentation_energy(std::span<const std::uint32_t> labels, std::span<const LatticeEdge> edges,
                           double tau) {
    std::vector<LatticeEdge> internal;
    for (const LatticeEdge& e : edges) {
        if (labels[e.a] == labels[e.b]) internal.push_back(e);
    }
    std::sort(internal.begin(), internal.end(), edge_order);
    detail::DisjointSet forest(labels.size());
    double mst = 0.0;
    for (const LatticeEdge& e : internal) {
        const std::uint32_t ra = forest.find(e.a);
        const std::uint32_t rb = forest.find(e.b);
        if (ra == rb) continue;
        forest.unite(ra, rb);
        mst += e.weight;
    }
    double boundary = 0.0;
    for (const LatticeEdge& e : build_region_edges(labels, edges)) boundary += e.weight;
    return tau * mst + boundary;
}

double segmentation_energy(const SupervoxelLabeling& labeling, std::span<const LatticeEdge> edges,
                           double tau) {
    return segmentation_energy(labeling.labels, edges, tau);
}

// ---- batch hierarchy ---------------------------------------------------

Hierarchy build_hierarchy(const VideoVolume& volume, const SegmentationParams& params) {
    params.validate();
    if (volume.empty()) throw ParameterError("cannot segment an empty volume");
    const VideoVolume smoothed = gaussian_smooth(volume, params.sigma);
    std::vector<LatticeEdge> edges = build_voxel_graph(smoothed, params.connectivity);

    std::vector<std::uint64_t> sizes(smoothed.voxel_count(), 1);
    NodePartition part = fh_merge(sizes, edges, params.threshold_constant(1), params.min_size);

    std::vector<std::uint32_t> base = part.labels;
    std::vector<std::vector<std::uint32_t>> parents;
    std::vector<std::vector<std::uint64_t>> region_sizes{part.sizes};

    for (int level = 2; level <= params.hie_num; ++level) {
        edges = build_region_edges(part.labels, edges);
        sizes = part.sizes;
        part = fh_merge(sizes, edges, params.threshold_constant(level), params.min_size);
        parents.push_back(part.labels);
        region_sizes.push_back(part.sizes);
    }
    return Hierarchy(volume.width(), volume.height(), volume.frame_count(), std::move(base),
                     std::move(parents), std::move(region_sizes));
}

// ---- streaming hierarchy -------------------------------------------------

namespace {

struct LevelState {
    std::vector<std::uint64_t> size;
    std::vector<float> internal;
    std::vector<std::uint32_t> parent;  // label at the next level; unused at the top
};

// Translates a window partition into global ids: seeded components keep
// their committed label, the rest are appended as new regions. Returns the
// global id per local label and the mass each committed region gained.
std::vector<std::uint32_t> commit_partition(const NodePartition& part,
                                            std::span<const std::uint32_t> group_global,
                                            LevelState& state, std::vector<std::int64_t>& growth) {
    std::vector<std::uint32_t> global(part.region_count());
    growth.assign(part.region_count(), 0);
    for (std::size_t c = 0; c < part.region_count(); ++c) {
        if (part.group[c] >= 0) {
            const std::uint32_t g = group_global[part.group[c]];
            growth[c] = static_cast<std::int64_t>(part.sizes[c]) - static_cast<std::int64_t>(state.size[g]);
            state.size[g] = part.sizes[c];
            state.internal[g] = part.internal[c];
            global[c] = g;
        } else {
            global[c] = static_cast<std::uint32_t>(state.size.size());
            state.size.push_back(part.sizes[c]);
            state.internal.push_back(part.internal[c]);
            state.parent.push_back(kUnassigned);
        }
    }
    return global;
}

}  // namespace

Hierarchy stream_segment(FrameStream& frames, const SegmentationParams& params) {
    params.validate();
    const int levels = params.hie_num;
    std::vector<LevelState> state(levels);
    std::vector<std::uint32_t> base_labels;

    int width = 0;
    int height = 0;
    int total_frames = 0;
    std::vector<Rgb> seam_pixels;
    std::vector<std::uint32_t> seam_labels;

    while (true) {
        std::vector<Rgb> voxels = seam_pixels;
        int window_frames = 0;
        while (window_frames < params.stream_range) {
            std::optional<Frame> frame = frames.next();
            if (!frame) break;
            if (total_frames == 0 && window_frames == 0) {
                width = frame->width;
                height = frame->height;
            } else if (frame->width != width || frame->height != height) {
                throw IngestError("frame " + std::to_string(total_frames + window_frames) +
                                  " dimensions differ from the first frame");
            }
            const Frame smoothed = smooth_frame(*frame, params.sigma);
            voxels.insert(voxels.end(), smoothed.pixels.begin(), smoothed.pixels.end());
            ++window_frames;
        }
        if (window_frames == 0) break;

        const bool has_seam = !seam_pixels.empty();
        const std::size_t frame_size = static_cast<std::size_t>(width) * height;
        const std::size_t offset = has_seam ? frame_size : 0;
        const int ext_frames = window_frames + (has_seam ? 1 : 0);
        check_voxel_capacity(voxels.size());
        check_voxel_capacity(base_labels.size() + voxels.size());

        std::vector<LatticeEdge> edges =
            lattice_edges(voxels, width, height, ext_frames, params.connectivity, has_seam);

        // Level 1: seam voxels start in their committed regions.
        MergeSeed seed;
        std::vector<std::uint32_t> group_global;
        if (has_seam) {
            seed.node_group.assign(voxels.size(), -1);
            std::vector<std::int32_t> group_of(state[0].size.size(), -1);
            for (std::size_t i = 0; i < frame_size; ++i) {
                const std::uint32_t g = seam_labels[i];
                if (group_of[g] < 0) {
                    group_of[g] = static_cast<std::int32_t>(group_global.size());
                    group_global.push_back(g);
                    seed.group_size.push_back(state[0].size[g]);
                    seed.group_internal.push_back(state[0].internal[g]);
                }
                seed.node_group[i] = group_of[g];
            }
        }
        std::vector<std::uint64_t> sizes(voxels.size(), 1);
        NodePartition part = fh_merge(sizes, edges, params.threshold_constant(1), params.min_size,
                                      has_seam ? &seed : nullptr);
        std::vector<std::int64_t> growth;
        std::vector<std::uint32_t> global = commit_partition(part, group_global, state[0], growth);
        for (std::size_t i = offset; i < voxels.size(); ++i) base_labels.push_back(global[part.labels[i]]);

        for (int level = 2; level <= levels; ++level) {
            LevelState& below = state[level - 2];
            LevelState& here = state[level - 1];
            edges = build_region_edges(part.labels, edges);
            sizes = part.sizes;

            // Regions committed below keep their committed parent.
            MergeSeed next_seed;
            std::vector<std::uint32_t> next_group_global;
            bool seeded = false;
            next_seed.node_group.assign(part.region_count(), -1);
            std::vector<std::int32_t> group_of;
            for (std::size_t c = 0; c < part.region_count(); ++c) {
                if (part.group[c] < 0) continue;
                seeded = true;
                const std::uint32_t parent = below.parent[global[c]];
                if (group_of.size() <= parent) group_of.resize(parent + 1, -1);
                if (group_of[parent] < 0) {
                    group_of[parent] = static_cast<std::int32_t>(next_group_global.size());
                    next_group_global.push_back(parent);
                    next_seed.group_size.push_back(here.size[parent]);
                    next_seed.group_internal.push_back(here.internal[parent]);
                }
                next_seed.node_group[c] = group_of[parent];
                next_seed.group_size[group_of[parent]] += growth[c];
            }

            NodePartition upper = fh_merge(sizes, edges, params.threshold_constant(level),
                                           params.min_size, seeded ? &next_seed : nullptr);
            std::vector<std::int64_t> upper_growth;
            std::vector<std::uint32_t> upper_global =
                commit_partition(upper, next_group_global, here, upper_growth);
            for (std::size_t c = 0; c < part.region_count(); ++c) {
                const std::uint32_t parent = upper_global[upper.labels[c]];
                if (part.group[c] < 0) {
                    below.parent[global[c]] = parent;
                } else if (below.parent[global[c]] != parent) {
                    throw std::logic_error("committed region changed parent");
                }
            }
            part = std::move(upper);
            global = std::move(upper_global);
            growth = std::move(upper_growth);
        }

        seam_pixels.assign(voxels.end() - static_cast<std::ptrdiff_t>(frame_size), voxels.end());
        seam_labels.assign(base_labels.end() - static_cast<std::ptrdiff_t>(frame_size), base_labels.end());
        total_frames += window_frames;
    }
    if (total_frames == 0) throw IngestError("frame stream is empty");

    std::vector<std::vector<std::uint32_t>> parents;
    std::vector<std::vector<std::uint64_t>> region_sizes;
    for (int level = 1; level <= levels; ++level) {
        region_sizes.push_back(std::move(state[level - 1].size));
        if (level < levels) parents.push_back(std::move(state[level - 1].parent));
    }
    return Hierarchy(width, height, total_frames, std::move(base_labels), std::move(parents),
                     std::move(region_sizes));
}

// ---- levels and files ----------------------------------------------------

int preset_level(LevelPreset preset) {
    switch (preset) {
        case LevelPreset::fine: return 8;
        case LevelPreset::medium: return 16;
        case LevelPreset::coarse: return 24;
    }
    return 0;
}

LevelPreset parse_level_preset(std::string_view name) {
    if (name == "fine") return LevelPreset::fine;
    if (name == "medium") return LevelPreset::medium;
    if (name == "coarse") return LevelPreset::coarse;
    throw ParameterError("unknown level preset '" + std::string(name) + "'");
}

std::string_view to_string(LevelPreset preset) {
    switch (preset) {
        case LevelPreset::fine: return "fine";
        case LevelPreset::medium: return "medium";
        case LevelPreset::coarse: return "coarse";
    }
    return "?";
}

SupervoxelLabeling extract_level(const Hierarchy& hierarchy, LevelPreset preset) {
    return extract_level(hierarchy, preset_level(preset));
}

SupervoxelLabeling extract_level(const Hierarchy& hierarchy, int level) {
    return hierarchy.labeling(level);
}

namespace {

constexpr std::array<char, 4> kLabelMagic = {'S', 'V', 'X', 'L'};

void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                           static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    out.write(bytes, 4);
}

std::uint32_t decode_u32(const unsigned char* p) {
    return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_labels(const fs::path& path, const SupervoxelLabeling& labeling) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot write " + path.string());
    out.write(kLabelMagic.data(), 4);
    put_u32(out, static_cast<std::uint32_t>(labeling.width));
    put_u32(out, static_cast<std::uint32_t>(labeling.height));
    put_u32(out, static_cast<std::uint32_t>(labeling.frame_count));
    for (std::uint32_t label : labeling.labels) put_u32(out, label);
}

SupervoxelLabeling read_labels(const fs::path& path, int level) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open " + path.string());
    unsigned char header[16];
    in.read(reinterpret_cast<char*>(header), 16);
    if (in.gcount() != 16 || !std::equal(kLabelMagic.begin(), kLabelMagic.end(), header)) {
        throw IngestError(path.string() + ": not an SVXL label file");
    }
    const int width = static_cast<int>(decode_u32(header + 4));
    const int height = static_cast<int>(decode_u32(header + 8));
    const int frames = static_cast<int>(decode_u32(header + 12));
    const std::size_t count = static_cast<std::size_t>(width) * height * frames;
    std::vector<unsigned char> raw(count * 4);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
        throw IngestError(path.string() + ": truncated label data");
    }
    std::vector<std::uint32_t> labels(count);
    for (std::size_t i = 0; i < count; ++i) labels[i] = decode_u32(raw.data() + 4 * i);
    return make_labeling(width, height, frames, std::move(labels), level);
}

SupervoxelLabeling make_labeling(int width, int height, int frame_count,
                                 std::vector<std::uint32_t> labels, int level) {
    if (labels.size() != static_cast<std::size_t>(width) * height * frame_count) {
        throw ParameterError("label count does not match dimensions");
    }
    SupervoxelLabeling out;
    out.level = level;
    out.width = width;
    out.height = height;
    out.frame_count = frame_count;
    // Dense renumbering by first appearance.
    std::unordered_map<std::uint32_t, std::uint32_t> dense;
    for (auto& label : labels) {
        auto [it, inserted] = dense.try_emplace(label, static_cast<std::uint32_t>(out.region_sizes.size()));
        if (inserted) out.region_sizes.push_back(0);
        label = it->second;
        ++out.region_sizes[label];
    }
    out.labels = std::move(labels);
    return out;
}

}  // namespace svx
