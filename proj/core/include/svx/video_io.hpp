#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "svx/volume.hpp"

namespace svx {

// ---- single frames -------------------------------------------------------

struct Frame {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;
};

Frame read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, std::span<const Rgb> pixels, int width,
               int height);

// ---- volumes -------------------------------------------------------------

/// Loads `frame_%05d.ppm` files from a directory. Indices must be contiguous
/// from 0 and all frames must share the same dimensions.
VideoVolume load_frames(const std::filesystem::path& directory);

/// Writes every frame as `frame_%05d.ppm` into `directory` (created if needed).
void write_frames(const VideoVolume& volume, const std::filesystem::path& directory);

/// Raw "SVXV" volume: magic, u32 LE width, height, frame_count, then
/// frame-major interleaved RGB bytes.
VideoVolume read_raw(std::istream& in);
VideoVolume read_raw(const std::filesystem::path& path);
void write_raw(std::ostream& out, const VideoVolume& volume);
void write_raw(const std::filesystem::path& path, const VideoVolume& volume);

/// Loads a volume from either a `.svxv` file or a directory of PPM frames.
VideoVolume load_volume(const std::filesystem::path& source);

/// Writes `.svxv` when the path has that extension, otherwise a PPM directory.
void save_volume(const VideoVolume& volume, const std::filesystem::path& target);

// ---- frame streams -------------------------------------------------------

/// Pull-based source of frames for the streaming segmenter.
class FrameStream {
public:
    virtual ~FrameStream() = default;
    virtual std::optional<Frame> next() = 0;
};

class VolumeFrameStream : public FrameStream {
public:
    explicit VolumeFrameStream(const VideoVolume& volume) : volume_(&volume) {}
    std::optional<Frame> next() override;

private:
    const VideoVolume* volume_;
    int cursor_ = 0;
};

/// Reads an SVXV stream frame by frame without holding the whole volume.
class RawFrameStream : public FrameStream {
public:
    explicit RawFrameStream(std::istream& in);
    std::optional<Frame> next() override;

    int width() const { return width_; }
    int height() const { return height_; }
    int frame_count() const { return frames_; }

private:
    std::istream* in_;
    int width_ = 0;
    int height_ = 0;
    int frames_ = 0;
    int cursor_ = 0;
};

// ---- preprocessing -------------------------------------------------------

/// Per-frame bilinear resampling with pixel-center alignment. With
/// `preserve_aspect` the output is the largest size fitting the target box
/// at the source aspect ratio (no padding).
VideoVolume resize_bilinear(const VideoVolume& volume, int target_width, int target_height,
                            bool preserve_aspect);

/// Truncated (3 sigma) normalized Gaussian kernel used by gaussian_smooth.
std::vector<double> gaussian_kernel(double sigma);

/// Spatial, per-frame, per-channel separable Gaussian smoothing.
Frame smooth_frame(const Frame& frame, double sigma);
VideoVolume gaussian_smooth(const VideoVolume& volume, double sigma);

}  // namespace svx
