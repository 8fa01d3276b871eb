#pragma once

#include <cstdint>
#include <vector>

#include "svx/segmentation.hpp"
#include "svx/volume.hpp"

namespace svx {

/// Injective label -> color map drawn without replacement from the 24-bit RGB
/// lattice, skipping near-black values (every channel below 16), which are
/// reserved for boundary rendering backgrounds.
struct ColorAssignment {
    std::uint64_t seed = 0;
    std::vector<Rgb> colors;  ///< indexed by label
};

/// Number of colors available to `assign_colors`.
std::size_t color_capacity();

ColorAssignment assign_colors(std::size_t label_count, std::uint64_t seed);

/// Paints every voxel with its region's color.
VideoVolume colorize(const SupervoxelLabeling& labeling, std::uint64_t seed);

/// True where a pixel's label differs from any spatial 4-neighbor in its frame.
std::vector<std::uint8_t> boundary_mask(const SupervoxelLabeling& labeling, int frame);

/// Binary video: boundary pixels white, everything else black.
VideoVolume render_boundaries(const SupervoxelLabeling& labeling);

}  // namespace svx
