#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "svx/motion.hpp"
#include "svx/segmentation.hpp"

namespace svx {

inline constexpr int kRadialBins = 5;
inline constexpr int kAngularBins = 12;
inline constexpr int kSscBins = kRadialBins * kAngularBins;

/// The innermost ring edge sits at r_max / kRadialSpan.
inline constexpr double kRadialSpan = 16.0;

using SscBins = std::array<double, kSscBins>;

struct PixelPoint {
    int x = 0;
    int y = 0;
};

/// Bin layout: radial * kAngularBins + angular; ring 0 is innermost.
struct SscFrameHistogram {
    int frame_index = 0;
    ReferencePoint reference;
    SscBins bins{};

    double total() const;
};

struct SscVideoDescriptor {
    std::vector<SscFrameHistogram> per_frame;  ///< L1-normalized
    SscBins aggregate{};
};

/// Outer edge of ring `ring` (0..4); ring edges are geometric from r_max/16 to r_max.
double ring_outer_radius(int ring, double r_max);

/// Radial bin for distance d <= r_max; distances inside r_max/16 go to ring 0.
int radial_bin(double distance, double r_max);

/// Angular bin of a displacement in image coordinates. Angles are measured
/// from +x, counterclockwise as displayed (image y axis points down).
int angular_bin(double dx, double dy);

/// Boundary pixels of one frame, in raster order.
std::vector<PixelPoint> boundary_points(const SupervoxelLabeling& labeling, int frame);

/// Raw counts; points farther than r_max are discarded.
SscFrameHistogram log_polar_histogram(std::span<const PixelPoint> points,
                                      const ReferencePoint& center, double r_max);

/// Half the frame diagonal.
double default_r_max(int width, int height);

/// Per-frame histograms around the flow reference point, L1-normalized; the
/// aggregate is their mean over frames that contain boundary points.
SscVideoDescriptor ssc_descriptor(const SupervoxelLabeling& labeling, const FlowField& flow);
SscVideoDescriptor ssc_descriptor(const SupervoxelLabeling& labeling,
                                  std::span<const ReferencePoint> references);

/// "SVXD": u32 LE frame count, 60 float32 per frame, then 60 float32 aggregate.
void write_descriptor(const std::filesystem::path& path, const SscVideoDescriptor& descriptor);
SscVideoDescriptor read_descriptor(const std::filesystem::path& path);

}  // namespace svx
