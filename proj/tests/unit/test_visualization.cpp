#include <set>

#include <gtest/gtest.h>

#include "svx/error.hpp"
#include "svx/visualization.hpp"

using namespace svx;

namespace {

std::uint32_t pack(const Rgb& c) {
    return (static_cast<std::uint32_t>(c.r) << 16) | (static_cast<std::uint32_t>(c.g) << 8) |
           static_cast<std::uint32_t>(c.b);
}

SupervoxelLabeling column_split(int w, int h, int frames, int k) {
    std::vector<std::uint32_t> labels;
    for (int t = 0; t < frames; ++t)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) labels.push_back(x < k ? 0 : 1);
    return make_labeling(w, h, frames, labels);
}

}  // namespace

TEST(Colors, InjectiveAndNeverNearBlack) {
    const auto colors = assign_colors(50000, 17);
    ASSERT_EQ(colors.colors.size(), 50000u);
    std::set<std::uint32_t> seen;
    for (const auto& c : colors.colors) {
        EXPECT_TRUE(seen.insert(pack(c)).second);
        EXPECT_FALSE(c.r < 16 && c.g < 16 && c.b < 16);
        EXPECT_EQ(c.r, static_cast<float>(static_cast<int>(c.r)));
    }
}

TEST(Colors, DeterministicPerSeed) {
    EXPECT_EQ(assign_colors(100, 3).colors, assign_colors(100, 3).colors);
    EXPECT_NE(assign_colors(100, 3).colors, assign_colors(100, 4).colors);
    // A longer assignment extends a shorter one with the same seed.
    const auto shorter = assign_colors(10, 8).colors;
    const auto longer = assign_colors(20, 8).colors;
    EXPECT_TRUE(std::equal(shorter.begin(), shorter.end(), longer.begin()));
}

TEST(Colors, CapacityIsEnforced) {
    EXPECT_EQ(color_capacity(), (1u << 24) - 16u * 16u * 16u);
    EXPECT_THROW(assign_colors(color_capacity() + 1, 0), CapacityError);
}

TEST(Colorize, EveryRegionGetsItsOwnColor) {
    const auto labeling = column_split(6, 3, 2, 2);
    const VideoVolume painted = colorize(labeling, 5);
    const auto colors = assign_colors(2, 5).colors;
    for (int t = 0; t < 2; ++t)
        for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 6; ++x) EXPECT_EQ(painted.at(t, y, x), colors[x < 2 ? 0 : 1]);
}

TEST(Boundaries, ColumnSplitMarksTheTwoAdjacentColumns) {
    const int k = 4;
    const auto labeling = column_split(9, 5, 1, k);
    const auto mask = boundary_mask(labeling, 0);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 9; ++x) {
            EXPECT_EQ(mask[y * 9 + x], (x == k - 1 || x == k) ? 1 : 0) << x << "," << y;
        }
    const VideoVolume rendered = render_boundaries(labeling);
    EXPECT_EQ(rendered.at(0, 2, k), (Rgb{255, 255, 255}));
    EXPECT_EQ(rendered.at(0, 2, 0), (Rgb{0, 0, 0}));
    EXPECT_THROW(boundary_mask(labeling, 1), RangeError);
}

TEST(Boundaries, DiagonalNeighborsDoNotCount) {
    // Label 1 only at (1,1): its 4-neighbors are boundary pixels, corners are not.
    std::vector<std::uint32_t> labels(9, 0);
    labels[4] = 1;
    const auto mask = boundary_mask(make_labeling(3, 3, 1, labels), 0);
    EXPECT_EQ(mask, (std::vector<std::uint8_t>{0, 1, 0, 1, 1, 1, 0, 1, 0}));
}
