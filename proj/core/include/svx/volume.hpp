#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "svx/error.hpp"

namespace svx {

struct Rgb {
    float r = 0.0f;
    float g = 0.0f;
    float b = 0.0f;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Dense frames x height x width lattice of RGB voxels, indexed (t, y, x).
///
/// Channel values are stored as float on the 0..255 scale. Values ingested
/// from 8-bit frames are exact integers, so write-back is lossless.
class VideoVolume {
public:
    VideoVolume() = default;
    VideoVolume(int width, int height, int frame_count, Rgb fill = {});

    int width() const { return width_; }
    int height() const { return height_; }
    int frame_count() const { return frames_; }
    std::size_t frame_size() const { return static_cast<std::size_t>(width_) * height_; }
    std::size_t voxel_count() const { return voxels_.size(); }
    bool empty() const { return voxels_.empty(); }

    std::size_t index(int t, int y, int x) const {
        return (static_cast<std::size_t>(t) * height_ + y) * width_ + x;
    }

    Rgb& at(int t, int y, int x) { return voxels_[index(t, y, x)]; }
    const Rgb& at(int t, int y, int x) const { return voxels_[index(t, y, x)]; }

    std::span<Rgb> frame(int t) { return {voxels_.data() + t * frame_size(), frame_size()}; }
    std::span<const Rgb> frame(int t) const {
        return {voxels_.data() + t * frame_size(), frame_size()};
    }

    std::span<Rgb> voxels() { return voxels_; }
    std::span<const Rgb> voxels() const { return voxels_; }

    /// Appends one frame; dimensions must match.
    void append_frame(std::span<const Rgb> pixels);

    friend bool operator==(const VideoVolume&, const VideoVolume&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int frames_ = 0;
    std::vector<Rgb> voxels_;
};

/// Rec. 601 luma on the 0..255 scale.
inline float luma(const Rgb& c) { return 0.299f * c.r + 0.587f * c.g + 0.114f * c.b; }

}  // namespace svx
