#include "svx/visualization.hpp"

#include <random>
#include <unordered_set>

namespace svx {

namespace {

constexpr std::uint32_t kColorSpace = 1u << 24;
constexpr std::uint32_t kNearBlackLimit = 16;

bool near_black(std::uint32_t packed) {
    return ((packed >> 16) & 0xFF) < kNearBlackLimit && ((packed >> 8) & 0xFF) < kNearBlackLimit &&
           (packed & 0xFF) < kNearBlackLimit;
}

Rgb unpack(std::uint32_t packed) {
    return {static_cast<float>((packed >> 16) & 0xFF), static_cast<float>((packed >> 8) & 0xFF),
            static_cast<float>(packed & 0xFF)};
}

}  // namespace

std::size_t color_capacity() {
    return kColorSpace - kNearBlackLimit * kNearBlackLimit * kNearBlackLimit;
}

ColorAssignment assign_colors(std::size_t label_count, std::uint64_t seed) {
    if (label_count > color_capacity()) {
        throw CapacityError(std::to_string(label_count) + " labels exceed the " +
                            std::to_string(color_capacity()) + " available colors");
    }
    ColorAssignment out;
    out.seed = seed;
    out.colors.reserve(label_count);
    // Raw engine output only: distribution objects are not portable across
    // standard libraries.
    std::mt19937_64 engine(seed);
    std::unordered_set<std::uint32_t> used;
    used.reserve(label_count * 2);
    while (out.colors.size() < label_count) {
        const auto packed = static_cast<std::uint32_t>(engine() >> 40);
        if (near_black(packed) || !used.insert(packed).second) continue;
        out.colors.push_back(unpack(packed));
    }
    return out;
}

VideoVolume colorize(const SupervoxelLabeling& labeling, std::uint64_t seed) {
    const ColorAssignment colors = assign_colors(labeling.region_count(), seed);
    VideoVolume out(labeling.width, labeling.height, labeling.frame_count);
    auto voxels = out.voxels();
    for (std::size_t i = 0; i < labeling.labels.size(); ++i) {
        voxels[i] = colors.colors[labeling.labels[i]];
    }
    return out;
}

std::vector<std::uint8_t> boundary_mask(const SupervoxelLabeling& labeling, int frame) {
    if (frame < 0 || frame >= labeling.frame_count) {
        throw RangeError("frame " + std::to_string(frame) + " out of range");
    }
    const int w = labeling.width;
    const int h = labeling.height;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint32_t label = labeling.at(frame, y, x);
            const bool edge = (x > 0 && labeling.at(frame, y, x - 1) != label) ||
                              (x + 1 < w && labeling.at(frame, y, x + 1) != label) ||
                              (y > 0 && labeling.at(frame, y - 1, x) != label) ||
                              (y + 1 < h && labeling.at(frame, y + 1, x) != label);
            mask[static_cast<std::size_t>(y) * w + x] = edge ? 1 : 0;
        }
    }
    return mask;
}

VideoVolume render_boundaries(const SupervoxelLabeling& labeling) {
    VideoVolume out(labeling.width, labeling.height, labeling.frame_count);
    const Rgb white{255.0f, 255.0f, 255.0f};
    for (int t = 0; t < labeling.frame_count; ++t) {
        const auto mask = boundary_mask(labeling, t);
        auto pixels = out.frame(t);
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (mask[i]) pixels[i] = white;
        }
    }
    return out;
}

}  // namespace svx
