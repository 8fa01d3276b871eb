#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"
#include "svx/error.hpp"
#include "svx/video_io.hpp"

using namespace svx;
using svx::testing::TempDir;

namespace {

VideoVolume integer_volume(int w, int h, int f, std::uint64_t seed) {
    return svx::testing::random_volume(w, h, f, seed);
}

double channel_sum(const VideoVolume& v) {
    double s = 0.0;
    for (const auto& p : v.voxels()) s += p.r + p.g + p.b;
    return s;
}

}  // namespace

TEST(VideoIo, PpmDirectoryRoundTripIsLossless) {
    TempDir dir("ppm");
    const VideoVolume v = integer_volume(7, 5, 3, 1);
    write_frames(v, dir.path());
    EXPECT_TRUE(std::filesystem::exists(dir / "frame_00000.ppm"));
    EXPECT_TRUE(std::filesystem::exists(dir / "frame_00002.ppm"));
    EXPECT_EQ(load_frames(dir.path()), v);
}

TEST(VideoIo, RawRoundTripIsLossless) {
    const VideoVolume v = integer_volume(4, 3, 5, 2);
    std::stringstream buffer;
    write_raw(buffer, v);
    EXPECT_EQ(buffer.str().size(), 4 + 12 + 4 * 3 * 5 * 3);
    EXPECT_EQ(buffer.str().substr(0, 4), "SVXV");
    EXPECT_EQ(read_raw(buffer), v);
}

TEST(VideoIo, RawHeaderIsLittleEndian) {
    std::stringstream buffer;
    write_raw(buffer, VideoVolume(258, 1, 1));
    const std::string bytes = buffer.str();
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 2);
    EXPECT_EQ(static_cast<unsigned char>(bytes[5]), 1);
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1);
    EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 1);
}

TEST(VideoIo, RawStreamYieldsFramesInOrder) {
    const VideoVolume v = integer_volume(3, 2, 4, 3);
    std::stringstream buffer;
    write_raw(buffer, v);
    RawFrameStream stream(buffer);
    EXPECT_EQ(stream.frame_count(), 4);
    for (int t = 0; t < 4; ++t) {
        auto frame = stream.next();
        ASSERT_TRUE(frame.has_value());
        EXPECT_TRUE(std::equal(frame->pixels.begin(), frame->pixels.end(), v.frame(t).begin()));
    }
    EXPECT_FALSE(stream.next().has_value());
}

TEST(VideoIo, TruncatedRawIsAnIngestError) {
    const VideoVolume v = integer_volume(3, 2, 2, 4);
    std::stringstream buffer;
    write_raw(buffer, v);
    std::stringstream cut(buffer.str().substr(0, buffer.str().size() - 5));
    EXPECT_THROW(read_raw(cut), IngestError);
    std::stringstream bad("XXXX0000");
    EXPECT_THROW(read_raw(bad), IngestError);
}

TEST(VideoIo, MissingFrameIsNamed) {
    TempDir dir("gap");
    const VideoVolume v = integer_volume(3, 3, 3, 5);
    write_frames(v, dir.path());
    std::filesystem::remove(dir / "frame_00001.ppm");
    try {
        load_frames(dir.path());
        FAIL() << "expected IngestError";
    } catch (const IngestError& e) {
        EXPECT_NE(std::string(e.what()).find("missing frame 1"), std::string::npos) << e.what();
    }
}

TEST(VideoIo, MismatchedFrameDimensionsAreNamed) {
    TempDir dir("dims");
    write_frames(integer_volume(3, 3, 2, 6), dir.path());
    const VideoVolume other = integer_volume(4, 3, 1, 7);
    write_ppm(dir / "frame_00001.ppm", other.frame(0), 4, 3);
    try {
        load_frames(dir.path());
        FAIL() << "expected IngestError";
    } catch (const IngestError& e) {
        EXPECT_NE(std::string(e.what()).find("frame_00001.ppm"), std::string::npos) << e.what();
    }
}

TEST(VideoIo, PpmWithCommentsAndSixteenBitRejected) {
    TempDir dir("pnm");
    {
        std::ofstream out(dir / "c.ppm", std::ios::binary);
        out << "P6\n# comment\n2 1\n255\n";
        const unsigned char px[6] = {1, 2, 3, 4, 5, 6};
        out.write(reinterpret_cast<const char*>(px), 6);
    }
    const Frame f = read_ppm(dir / "c.ppm");
    ASSERT_EQ(f.width, 2);
    EXPECT_EQ(f.pixels[1], (Rgb{4, 5, 6}));
    {
        std::ofstream out(dir / "d.ppm", std::ios::binary);
        out << "P6 1 1 65535\n" << std::string(6, '\0');
    }
    EXPECT_THROW(read_ppm(dir / "d.ppm"), IngestError);
}

TEST(Resize, CheckerboardToSinglePixelIsTheMean) {
    VideoVolume v(2, 2, 1);
    v.at(0, 0, 0) = {255, 0, 10};
    v.at(0, 0, 1) = {0, 255, 20};
    v.at(0, 1, 0) = {0, 255, 30};
    v.at(0, 1, 1) = {255, 0, 40};
    const VideoVolume out = resize_bilinear(v, 1, 1, false);
    ASSERT_EQ(out.width(), 1);
    EXPECT_FLOAT_EQ(out.at(0, 0, 0).r, 127.5f);
    EXPECT_FLOAT_EQ(out.at(0, 0, 0).g, 127.5f);
    EXPECT_FLOAT_EQ(out.at(0, 0, 0).b, 25.0f);
}

TEST(Resize, IdentityReturnsAnEqualCopy) {
    const VideoVolume v = integer_volume(6, 4, 2, 8);
    EXPECT_EQ(resize_bilinear(v, 6, 4, false), v);
    EXPECT_EQ(resize_bilinear(v, 6, 4, true), v);
}

TEST(Resize, PreserveAspectFitsTheBox) {
    const VideoVolume v(640, 360, 1);
    const VideoVolume out = resize_bilinear(v, 320, 240, true);
    EXPECT_EQ(out.width(), 320);
    EXPECT_EQ(out.height(), 180);
    EXPECT_THROW(resize_bilinear(v, 0, 10, false), ParameterError);
}

TEST(Resize, UpsamplingOneDimensionalRampInterpolatesLinearly) {
    VideoVolume v(2, 1, 1);
    v.at(0, 0, 0) = {0, 0, 0};
    v.at(0, 0, 1) = {100, 100, 100};
    const VideoVolume out = resize_bilinear(v, 4, 1, false);
    // Output centers map to source x = -0.25, 0.25, 0.75, 1.25 (clamped).
    EXPECT_FLOAT_EQ(out.at(0, 0, 0).r, 0.0f);
    EXPECT_FLOAT_EQ(out.at(0, 0, 1).r, 25.0f);
    EXPECT_FLOAT_EQ(out.at(0, 0, 2).r, 75.0f);
    EXPECT_FLOAT_EQ(out.at(0, 0, 3).r, 100.0f);
}

TEST(Smoothing, KernelMatchesTruncatedGaussian) {
    const double sigma = 1.3;
    const auto kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    ASSERT_EQ(kernel.size(), static_cast<std::size_t>(2 * radius + 1));
    double norm = 0.0;
    for (int i = -radius; i <= radius; ++i) norm += std::exp(-(i * i) / (2.0 * sigma * sigma));
    for (int i = -radius; i <= radius; ++i) {
        EXPECT_NEAR(kernel[i + radius], std::exp(-(i * i) / (2.0 * sigma * sigma)) / norm, 1e-15);
    }
    EXPECT_NEAR(std::accumulate(kernel.begin(), kernel.end(), 0.0), 1.0, 1e-12);
}

TEST(Smoothing, ImpulseResponseIsTheSeparableKernel) {
    const double sigma = 1.0;
    VideoVolume v(15, 15, 1);
    v.at(0, 7, 7) = {255, 0, 0};
    const VideoVolume out = gaussian_smooth(v, sigma);
    const auto k = gaussian_kernel(sigma);
    const int r = static_cast<int>(k.size() / 2);
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            EXPECT_NEAR(out.at(0, 7 + dy, 7 + dx).r, 255.0 * k[dy + r] * k[dx + r], 1e-3);
        }
    EXPECT_FLOAT_EQ(out.at(0, 0, 0).r, 0.0f);
}

TEST(Smoothing, ZeroSigmaIsIdentityAndNegativeIsRejected) {
    const VideoVolume v = integer_volume(5, 5, 2, 9);
    EXPECT_EQ(gaussian_smooth(v, 0.0), v);
    EXPECT_THROW(gaussian_smooth(v, -0.5), ParameterError);
}

TEST(Smoothing, PreservesFrameMeanAndConstants) {
    const VideoVolume v = integer_volume(11, 7, 3, 10);
    for (double sigma : {0.4, 1.0, 2.5}) {
        const VideoVolume out = gaussian_smooth(v, sigma);
        EXPECT_NEAR(channel_sum(out), channel_sum(v), 1e-6 * channel_sum(v)) << "sigma " << sigma;
    }
    const VideoVolume flat(6, 6, 1, Rgb{42, 7, 200});
    const VideoVolume out = gaussian_smooth(flat, 1.7);
    for (const auto& p : out.voxels()) {
        EXPECT_NEAR(p.r, 42.0f, 1e-4);
        EXPECT_NEAR(p.b, 200.0f, 1e-4);
    }
}

TEST(Smoothing, BorderSampleNextToEdgeMatchesClamping) {
    // One tap beyond the border reads the edge pixel itself.
    VideoVolume v(5, 1, 1);
    for (int x = 0; x < 5; ++x) v.at(0, 0, x) = Rgb{static_cast<float>(10 * x), 0, 0};
    const double sigma = 0.3;  // radius 1
    const auto k = gaussian_kernel(sigma);
    ASSERT_EQ(k.size(), 3u);
    const VideoVolume out = gaussian_smooth(v, sigma);
    EXPECT_NEAR(out.at(0, 0, 0).r, k[0] * 0 + k[1] * 0 + k[2] * 10, 1e-4);
    EXPECT_NEAR(out.at(0, 0, 4).r, k[0] * 30 + k[1] * 40 + k[2] * 40, 1e-4);
}
