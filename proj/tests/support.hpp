#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "svx/segmentation.hpp"
#include "svx/volume.hpp"

namespace svx::testing {

inline VideoVolume random_volume(int w, int h, int f, std::uint64_t seed, int levels = 256) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, levels - 1);
    const float scale = levels > 1 ? 255.0f / (levels - 1) : 0.0f;
    VideoVolume v(w, h, f);
    for (auto& p : v.voxels()) {
        p = Rgb{pick(rng) * scale, pick(rng) * scale, pick(rng) * scale};
    }
    return v;
}

/// Blocky random video: constant-colored tiles of `tile` pixels that drift by
/// one pixel per frame, so regions persist through time.
inline VideoVolume blocky_volume(int w, int h, int f, int tile, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> color(0.0f, 255.0f);
    const int tw = w / tile + 2;
    const int th = h / tile + 2;
    std::vector<Rgb> palette(static_cast<std::size_t>(tw) * th);
    for (auto& c : palette) c = Rgb{color(rng), color(rng), color(rng)};
    std::normal_distribution<float> noise(0.0f, 3.0f);
    VideoVolume v(w, h, f);
    for (int t = 0; t < f; ++t)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const int tx = (x + t) / tile;
                const int ty = y / tile;
                Rgb c = palette[static_cast<std::size_t>(ty) * tw + tx];
                c.r += noise(rng);
                c.g += noise(rng);
                c.b += noise(rng);
                v.at(t, y, x) = c;
            }
    return v;
}

/// True when both label vectors induce the same partition.
inline bool same_partition(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    if (a.size() != b.size()) return false;
    std::map<std::uint32_t, std::uint32_t> ab;
    std::map<std::uint32_t, std::uint32_t> ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto [it1, new1] = ab.emplace(a[i], b[i]);
        const auto [it2, new2] = ba.emplace(b[i], a[i]);
        if (it1->second != b[i] || it2->second != a[i]) return false;
    }
    return true;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("svx_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace svx::testing
