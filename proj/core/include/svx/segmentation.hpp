#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "svx/video_io.hpp"
#include "svx/volume.hpp"

namespace svx {

enum class Connectivity { six = 6, twenty_six = 26 };

/// Undirected graph edge between two nodes (voxels or regions).
struct LatticeEdge {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    float weight = 0.0f;

    friend bool operator==(const LatticeEdge&, const LatticeEdge&) = default;
};

/// Strict order used by every merge pass: (weight, a, b).
inline bool edge_order(const LatticeEdge& lhs, const LatticeEdge& rhs) {
    if (lhs.weight != rhs.weight) return lhs.weight < rhs.weight;
    if (lhs.a != rhs.a) return lhs.a < rhs.a;
    return lhs.b < rhs.b;
}

/// One complete partition of the voxel lattice.
struct SupervoxelLabeling {
    int level = 0;
    int width = 0;
    int height = 0;
    int frame_count = 0;
    std::vector<std::uint32_t> labels;        ///< per voxel, dense ids
    std::vector<std::uint64_t> region_sizes;  ///< voxel count per label

    std::size_t region_count() const { return region_sizes.size(); }
    std::size_t frame_size() const { return static_cast<std::size_t>(width) * height; }
    std::uint32_t at(int t, int y, int x) const {
        return labels[(static_cast<std::size_t>(t) * height + y) * width + x];
    }
};

struct SegmentationParams {
    double c = 0.2;             ///< threshold constant at level 1
    double c_reg = 10.0;        ///< threshold constant at levels >= 2 (scaled by level)
    std::uint64_t min_size = 20;
    double sigma = 0.4;
    int stream_range = 10;      ///< frames per streaming window
    int hie_num = 30;           ///< number of hierarchy levels
    Connectivity connectivity = Connectivity::six;

    void validate() const;

    /// Threshold constant k for `level` (1-based): c at level 1, c_reg * level above.
    double threshold_constant(int level) const;
};

/// Ordered stack of nested labelings, stored as level-1 voxel labels plus
/// parent maps; per-voxel labelings of higher levels are materialized on demand.
class Hierarchy {
public:
    Hierarchy() = default;
    Hierarchy(int width, int height, int frame_count, std::vector<std::uint32_t> base_labels,
              std::vector<std::vector<std::uint32_t>> parent_maps,
              std::vector<std::vector<std::uint64_t>> region_sizes);

    int width() const { return width_; }
    int height() const { return height_; }
    int frame_count() const { return frames_; }
    int level_count() const { return static_cast<int>(region_sizes_.size()); }
    std::size_t voxel_count() const { return base_labels_.size(); }

    std::size_t region_count(int level) const;
    std::span<const std::uint64_t> region_sizes(int level) const;

    /// Maps level-h labels to level-(h+1) labels; valid for 1 <= h < level_count().
    std::span<const std::uint32_t> parent_map(int level) const;

    /// Per-voxel labeling at `level` (1-based).
    SupervoxelLabeling labeling(int level) const;

    std::span<const std::uint32_t> base_labels() const { return base_labels_; }

private:
    void check_level(int level) const;

    int width_ = 0;
    int height_ = 0;
    int frames_ = 0;
    std::vector<std::uint32_t> base_labels_;
    std::vector<std::vector<std::uint32_t>> parent_maps_;
    std::vector<std::vector<std::uint64_t>> region_sizes_;
};

// ---- graph construction --------------------------------------------------

/// One edge per unordered adjacent voxel pair; weight is the Euclidean RGB
/// distance. Voxel ids are lattice indices (t, y, x) in row-major order.
std::vector<LatticeEdge> build_voxel_graph(const VideoVolume& volume,
                                           Connectivity connectivity = Connectivity::six);

/// Region adjacency: one edge per adjacent label pair, weighted by the
/// minimum crossing edge weight. Output edges have a < b, sorted by (a, b).
struct RegionGraph {
    std::size_t node_count = 0;
    std::vector<std::uint64_t> node_sizes;
    std::vector<LatticeEdge> edges;
};

std::vector<LatticeEdge> build_region_edges(std::span<const std::uint32_t> node_labels,
                                            std::span<const LatticeEdge> edges);
RegionGraph build_region_graph(const SupervoxelLabeling& prev, std::span<const LatticeEdge> edges);

// ---- merging -------------------------------------------------------------

/// Pre-committed node groups for constrained merging. Nodes with the same
/// non-negative group start in one component whose size and internal
/// difference are taken from the group tables. Two components that both carry
/// a group never merge.
struct MergeSeed {
    std::vector<std::int32_t> node_group;  ///< -1 for free nodes
    std::vector<std::uint64_t> group_size;
    std::vector<float> group_internal;
};

struct NodePartition {
    std::vector<std::uint32_t> labels;     ///< per node, dense in first-appearance order
    std::vector<std::uint64_t> sizes;      ///< component mass per label
    std::vector<float> internal;           ///< Int(C): largest merged edge weight
    std::vector<std::int32_t> group;       ///< seed group per label or -1

    std::size_t region_count() const { return sizes.size(); }
};

/// Graph-based merging: edges are visited in (weight, a, b) order and two
/// components merge iff w <= min(Int(C1) + k/|C1|, Int(C2) + k/|C2|). Then any
/// component smaller than `min_size` is merged, smallest first, across its
/// minimum-weight outgoing edge until none remain (or none can merge).
NodePartition fh_merge(std::span<const std::uint64_t> node_sizes, std::vector<LatticeEdge> edges,
                       double threshold_constant, std::uint64_t min_size,
                       const MergeSeed* seed = nullptr);

/// Convenience wrapper over voxel nodes of unit size.
SupervoxelLabeling fh_merge_voxels(const VideoVolume& volume, std::span<const LatticeEdge> edges,
                                   double threshold_constant, std::uint64_t min_size);

/// tau * sum of per-region MST weights + sum over adjacent region pairs of the
/// minimum crossing weight. Test oracle only.
double segmentation_energy(std::span<const std::uint32_t> labels,
                           std::span<const LatticeEdge> edges, double tau);
double segmentation_energy(const SupervoxelLabeling& labeling, std::span<const LatticeEdge> edges,
                           double tau);

// ---- hierarchy -----------------------------------------------------------

/// Batch hierarchy over the whole (pre-smoothing) volume.
Hierarchy build_hierarchy(const VideoVolume& volume, const SegmentationParams& params);

/// Streaming hierarchy over consecutive windows of `stream_range` frames.
/// Each window is joined to the last committed frame of the previous one;
/// committed labels never change.
Hierarchy stream_segment(FrameStream& frames, const SegmentationParams& params);

enum class LevelPreset { fine, medium, coarse };

int preset_level(LevelPreset preset);
LevelPreset parse_level_preset(std::string_view name);
std::string_view to_string(LevelPreset preset);

SupervoxelLabeling extract_level(const Hierarchy& hierarchy, LevelPreset preset);
SupervoxelLabeling extract_level(const Hierarchy& hierarchy, int level);

// ---- label files ---------------------------------------------------------

/// "SVXL" magic, u32 LE width, height, frame_count, then u32 LE per voxel.
void write_labels(const std::filesystem::path& path, const SupervoxelLabeling& labeling);
SupervoxelLabeling read_labels(const std::filesystem::path& path, int level = 0);

/// Recomputes region sizes from labels, remapping ids densely by first appearance.
SupervoxelLabeling make_labeling(int width, int height, int frame_count,
                                 std::vector<std::uint32_t> labels, int level = 0);

}  // namespace svx
