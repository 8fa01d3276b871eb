#pragma once

#include <map>
#include <span>

#include "svx/motion.hpp"
#include "svx/segmentation.hpp"
#include "svx/ssc.hpp"
#include "svx/volume.hpp"

namespace svx {

/// Segments once, computes flow once, and returns the aggregate SSC
/// descriptor at each requested level.
std::map<LevelPreset, SscBins> describe_levels(const VideoVolume& volume,
                                               const SegmentationParams& segmentation,
                                               const HornSchunckParams& flow,
                                               std::span<const LevelPreset> levels);

}  // namespace svx
