#include "svx/pipeline.hpp"

namespace svx {

std::map<LevelPreset, SscBins> describe_levels(const VideoVolume& volume,
                                               const SegmentationParams& segmentation,
                                               const HornSchunckParams& flow,
                                               std::span<const LevelPreset> levels) {
    const Hierarchy hierarchy = build_hierarchy(volume, segmentation);
    const FlowField field = compute_flow(volume, flow);
    std::map<LevelPreset, SscBins> out;
    for (LevelPreset level : levels) {
        out[level] = ssc_descriptor(extract_level(hierarchy, level), field).aggregate;
    }
    return out;
}

}  // namespace svx
