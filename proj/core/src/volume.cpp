#include "svx/volume.hpp"

#include <string>

namespace svx {

VideoVolume::VideoVolume(int width, int height, int frame_count, Rgb fill)
    : width_(width), height_(height), frames_(frame_count) {
    if (width < 1 || height < 1 || frame_count < 0) {
        throw ParameterError("invalid volume dimensions " + std::to_string(width) + "x" +
                             std::to_string(height) + "x" + std::to_string(frame_count));
    }
    voxels_.assign(static_cast<std::size_t>(width) * height * frame_count, fill);
}

void VideoVolume::append_frame(std::span<const Rgb> pixels) {
    if (pixels.size() != frame_size()) {
        throw ParameterError("frame size " + std::to_string(pixels.size()) +
                             " does not match volume frame size " + std::to_string(frame_size()));
    }
    voxels_.insert(voxels_.end(), pixels.begin(), pixels.end());
    ++frames_;
}

}  // namespace svx
