#pragma once

#include <filesystem>
#include <vector>

#include "svx/volume.hpp"

namespace svx {

struct FlowVector {
    float u = 0.0f;
    float v = 0.0f;
};

/// Forward displacement (pixels/frame) for each of frame_count - 1 frame pairs.
struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<std::vector<FlowVector>> pairs;

    int pair_count() const { return static_cast<int>(pairs.size()); }
    const FlowVector& at(int pair, int y, int x) const {
        return pairs[pair][static_cast<std::size_t>(y) * width + x];
    }
};

struct HornSchunckParams {
    double alpha = 15.0;
    int iterations = 100;
    /// Gaussian pre-blur of the grayscale frames before differentiation.
    double presmooth_sigma = 1.5;
};

/// Horn-Schunck flow between two grayscale images of equal size.
std::vector<FlowVector> horn_schunck(const std::vector<float>& first,
                                     const std::vector<float>& second, int width, int height,
                                     const HornSchunckParams& params = {});

/// Dense flow for every consecutive frame pair. Needs at least two frames.
FlowField compute_flow(const VideoVolume& volume, const HornSchunckParams& params = {});

struct ReferencePoint {
    int frame_index = 0;
    double x = 0.0;
    double y = 0.0;
};

/// Magnitude-weighted centroid of one flow pair; falls back to the frame
/// center when the mean magnitude is below 1e-6 px.
ReferencePoint flow_center_of_mass(const FlowField& flow, int pair_index);

/// One reference point per video frame; the last frame reuses the final
/// pair's point.
std::vector<ReferencePoint> reference_points(const FlowField& flow, int frame_count);

/// "SVXF" magic, u32 LE width, height, pair count, then float32 LE (u, v)
/// per pixel, pair-major.
void write_flow(const std::filesystem::path& path, const FlowField& flow);
FlowField read_flow(const std::filesystem::path& path);

}  // namespace svx
