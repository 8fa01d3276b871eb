#include <set>

#include <gtest/gtest.h>

#include "svx/error.hpp"
#include "svx/synthetic.hpp"

using namespace svx;
using namespace svx::synth;

TEST(Synthetic, ClipsAreDeterministicPerSeed) {
    const ClipSpec spec{Shape::ring, Motion::orbit, 64, 48, 6, 11, 0.0f};
    EXPECT_EQ(render_clip(spec), render_clip(spec));
    ClipSpec other = spec;
    other.seed = 12;
    EXPECT_NE(render_clip(spec), render_clip(other));
    ClipSpec noisy = spec;
    noisy.noise = 2.0f;
    EXPECT_EQ(render_clip(noisy), render_clip(noisy));
    EXPECT_NE(render_clip(noisy), render_clip(spec));
}

TEST(Synthetic, ClipDimensionsAndTwoColors) {
    const VideoVolume v = render_clip({Shape::box, Motion::translate, 40, 32, 5, 3, 0.0f});
    EXPECT_EQ(v.width(), 40);
    EXPECT_EQ(v.height(), 32);
    EXPECT_EQ(v.frame_count(), 5);
    std::set<std::tuple<float, float, float>> colors;
    for (const auto& p : v.voxels()) colors.insert({p.r, p.g, p.b});
    EXPECT_EQ(colors.size(), 2u);
    EXPECT_THROW(render_clip({Shape::box, Motion::translate, 8, 8, 5, 0, 0.0f}), ParameterError);
}

TEST(Synthetic, StaticFramesDifferForEveryMotion) {
    for (Motion m : kMotions) {
        const VideoVolume v = render_clip({Shape::box, m, 64, 48, 4, 5, 0.0f});
        EXPECT_FALSE(std::equal(v.frame(0).begin(), v.frame(0).end(), v.frame(1).begin())) << to_string(m);
    }
}

TEST(Synthetic, CorpusCoversEveryClass) {
    const auto entries = corpus(3, 2024);
    ASSERT_EQ(entries.size(), 24u);
    EXPECT_EQ(entries[0].id, "box_translate_0");
    EXPECT_EQ(entries[23].id, "ring_expand_2");
    std::set<std::uint64_t> seeds;
    for (const auto& e : entries) seeds.insert(e.spec.seed);
    EXPECT_EQ(seeds.size(), 24u);
    EXPECT_EQ(corpus(3, 2024)[5].spec.seed, entries[5].spec.seed);
    EXPECT_EQ(actor_for(Shape::ring), Actor::animal);
    EXPECT_EQ(action_for(Motion::expand), Action::flying);
}

TEST(Synthetic, TranslatingSquarePlacement) {
    const VideoVolume v = translating_square(20, 20, 4, 2, 3, 2, 1, 3, 100.0f);
    EXPECT_EQ(v.at(0, 3, 2).r, 100.0f);
    EXPECT_EQ(v.at(0, 6, 5).r, 100.0f);
    EXPECT_EQ(v.at(0, 7, 5).r, 0.0f);
    EXPECT_EQ(v.at(2, 5, 6).r, 100.0f);
    EXPECT_EQ(v.at(2, 5, 5).r, 0.0f);
}
