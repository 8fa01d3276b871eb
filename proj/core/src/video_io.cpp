#include "svx/video_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <regex>
#include <string>

namespace svx {
namespace fs = std::filesystem;

namespace {

constexpr std::array<char, 4> kVolumeMagic = {'S', 'V', 'X', 'V'};

std::uint8_t to_byte(float value) {
    const float rounded = std::nearbyint(value);
    return static_cast<std::uint8_t>(std::clamp(rounded, 0.0f, 255.0f));
}

// Next header token of a PNM file, skipping whitespace and comments.
std::string pnm_token(std::istream& in) {
    std::string token;
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        } else if (std::isspace(ch)) {
            if (!token.empty()) break;
        } else {
            token.push_back(static_cast<char>(ch));
        }
        ch = in.get();
    }
    return token;
}

int pnm_int(std::istream& in, const fs::path& path, const char* what) {
    const std::string token = pnm_token(in);
    try {
        std::size_t used = 0;
        const int value = std::stoi(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return value;
    } catch (const std::exception&) {
        throw IngestError(path.string() + ": bad PPM " + what + " '" + token + "'");
    }
}

void put_u32(std::ostream& out, std::uint32_t value) {
    const std::array<char, 4> bytes = {
        static_cast<char>(value & 0xFF), static_cast<char>((value >> 8) & 0xFF),
        static_cast<char>((value >> 16) & 0xFF), static_cast<char>((value >> 24) & 0xFF)};
    out.write(bytes.data(), 4);
}

std::uint32_t get_u32(std::istream& in) {
    std::array<unsigned char, 4> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), 4);
    if (!in) throw IngestError("truncated SVXV header");
    return bytes[0] | (bytes[1] << 8) | (bytes[2] << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void read_rgb_bytes(std::istream& in, std::span<Rgb> out, const std::string& what) {
    std::vector<unsigned char> buffer(out.size() * 3);
    in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
    if (in.gcount() != static_cast<std::streamsize>(buffer.size())) {
        throw IngestError(what + ": truncated pixel data");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = {static_cast<float>(buffer[3 * i]), static_cast<float>(buffer[3 * i + 1]),
                  static_cast<float>(buffer[3 * i + 2])};
    }
}

void write_rgb_bytes(std::ostream& out, std::span<const Rgb> pixels) {
    std::vector<char> buffer(pixels.size() * 3);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        buffer[3 * i] = static_cast<char>(to_byte(pixels[i].r));
        buffer[3 * i + 1] = static_cast<char>(to_byte(pixels[i].g));
        buffer[3 * i + 2] = static_cast<char>(to_byte(pixels[i].b));
    }
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
}

std::string frame_name(int index) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05d.ppm", index);
    return name;
}

}  // namespace

Frame read_ppm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open " + path.string());
    if (pnm_token(in) != "P6") throw IngestError(path.string() + ": not a binary PPM (P6)");
    Frame frame;
    frame.width = pnm_int(in, path, "width");
    frame.height = pnm_int(in, path, "height");
    const int maxval = pnm_int(in, path, "maxval");
    if (frame.width < 1 || frame.height < 1) throw IngestError(path.string() + ": empty frame");
    if (maxval < 1 || maxval > 255) {
        throw IngestError(path.string() + ": only 8-bit PPM is supported");
    }
    frame.pixels.resize(static_cast<std::size_t>(frame.width) * frame.height);
    read_rgb_bytes(in, frame.pixels, path.string());
    return frame;
}

void write_ppm(const fs::path& path, std::span<const Rgb> pixels, int width, int height) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot write " + path.string());
    out << "P6\n" << width << ' ' << height << "\n255\n";
    write_rgb_bytes(out, pixels);
}

VideoVolume load_frames(const fs::path& directory) {
    if (!fs::is_directory(directory)) throw IngestError(directory.string() + " is not a directory");
    static const std::regex pattern(R"(frame_(\d+)\.ppm)");
    std::map<int, fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        std::smatch match;
        const std::string name = entry.path().filename().string();
        if (std::regex_match(name, match, pattern)) files[std::stoi(match[1])] = entry.path();
    }
    if (files.empty()) throw IngestError("no frame_%05d.ppm files in " + directory.string());

    int expected = 0;
    for (const auto& [index, path] : files) {
        if (index != expected) throw IngestError("missing frame " + std::to_string(expected));
        ++expected;
    }

    VideoVolume volume;
    for (const auto& [index, path] : files) {
        Frame frame = read_ppm(path);
        if (index == 0) {
            volume = VideoVolume(frame.width, frame.height, 0);
        } else if (frame.width != volume.width() || frame.height != volume.height()) {
            throw IngestError("frame " + std::to_string(index) + " (" + path.filename().string() +
                              ") is " + std::to_string(frame.width) + "x" +
                              std::to_string(frame.height) + ", expected " +
                              std::to_string(volume.width()) + "x" +
                              std::to_string(volume.height()));
        }
        volume.append_frame(frame.pixels);
    }
    return volume;
}

void write_frames(const VideoVolume& volume, const fs::path& directory) {
    fs::create_directories(directory);
    for (int t = 0; t < volume.frame_count(); ++t) {
        write_ppm(directory / frame_name(t), volume.frame(t), volume.width(), volume.height());
    }
}

VideoVolume read_raw(std::istream& in) {
    RawFrameStream stream(in);
    VideoVolume volume(stream.width(), stream.height(), 0);
    while (auto frame = stream.next()) volume.append_frame(frame->pixels);
    return volume;
}

VideoVolume read_raw(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open " + path.string());
    return read_raw(in);
}

void write_raw(std::ostream& out, const VideoVolume& volume) {
    out.write(kVolumeMagic.data(), 4);
    put_u32(out, static_cast<std::uint32_t>(volume.width()));
    put_u32(out, static_cast<std::uint32_t>(volume.height()));
    put_u32(out, static_cast<std::uint32_t>(volume.frame_count()));
    write_rgb_bytes(out, volume.voxels());
}

void write_raw(const fs::path& path, const VideoVolume& volume) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot write " + path.string());
    write_raw(out, volume);
}

VideoVolume load_volume(const fs::path& source) {
    if (fs::is_directory(source)) return load_frames(source);
    return read_raw(source);
}

void save_volume(const VideoVolume& volume, const fs::path& target) {
    if (target.extension() == ".svxv") {
        if (target.has_parent_path()) fs::create_directories(target.parent_path());
        write_raw(target, volume);
    } else {
        write_frames(volume, target);
    }
}

std::optional<Frame> VolumeFrameStream::next() {
    if (cursor_ >= volume_->frame_count()) return std::nullopt;
    const auto pixels = volume_->frame(cursor_++);
    return Frame{volume_->width(), volume_->height(), {pixels.begin(), pixels.end()}};
}

RawFrameStream::RawFrameStream(std::istream& in) : in_(&in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), 4);
    if (!in || magic != kVolumeMagic) throw IngestError("not an SVXV volume (bad magic)");
    width_ = static_cast<int>(get_u32(in));
    height_ = static_cast<int>(get_u32(in));
    frames_ = static_cast<int>(get_u32(in));
    if (width_ < 1 || height_ < 1 || frames_ < 1) throw IngestError("SVXV volume has empty dimensions");
}

std::optional<Frame> RawFrameStream::next() {
    if (cursor_ >= frames_) return std::nullopt;
    Frame frame{width_, height_, std::vector<Rgb>(static_cast<std::size_t>(width_) * height_)};
    read_rgb_bytes(*in_, frame.pixels, "SVXV frame " + std::to_string(cursor_));
    ++cursor_;
    return frame;
}

VideoVolume resize_bilinear(const VideoVolume& volume, int target_width, int target_height,
                            bool preserve_aspect) {
    if (target_width < 1 || target_height < 1) {
        throw ParameterError("resize target must be at least 1x1");
    }
    int out_w = target_width;
    int out_h = target_height;
    if (preserve_aspect) {
        const double scale = std::min(static_cast<double>(target_width) / volume.width(),
                                      static_cast<double>(target_height) / volume.height());
        out_w = std::clamp(static_cast<int>(std::lround(volume.width() * scale)), 1, target_width);
        out_h = std::clamp(static_cast<int>(std::lround(volume.height() * scale)), 1, target_height);
    }
    if (out_w == volume.width() && out_h == volume.height()) return volume;

    struct Tap {
        int lo, hi;
        double frac;
    };
    // Pixel-center alignment: source coordinate of output pixel i.
    auto taps = [](int src, int dst) {
        std::vector<Tap> result(dst);
        const double scale = static_cast<double>(src) / dst;
        for (int i = 0; i < dst; ++i) {
            const double pos = std::clamp((i + 0.5) * scale - 0.5, 0.0, src - 1.0);
            const int lo = static_cast<int>(std::floor(pos));
            const int hi = std::min(lo + 1, src - 1);
            result[i] = {lo, hi, pos - lo};
        }
        return result;
    };
    const auto xs = taps(volume.width(), out_w);
    const auto ys = taps(volume.height(), out_h);

    VideoVolume out(out_w, out_h, volume.frame_count());
    for (int t = 0; t < volume.frame_count(); ++t) {
        for (int y = 0; y < out_h; ++y) {
            const Tap ty = ys[y];
            for (int x = 0; x < out_w; ++x) {
                const Tap tx = xs[x];
                const Rgb& p00 = volume.at(t, ty.lo, tx.lo);
                const Rgb& p01 = volume.at(t, ty.lo, tx.hi);
                const Rgb& p10 = volume.at(t, ty.hi, tx.lo);
                const Rgb& p11 = volume.at(t, ty.hi, tx.hi);
                const double w00 = (1 - ty.frac) * (1 - tx.frac);
                const double w01 = (1 - ty.frac) * tx.frac;
                const double w10 = ty.frac * (1 - tx.frac);
                const double w11 = ty.frac * tx.frac;
                auto mix = [&](float Rgb::*channel) {
                    return static_cast<float>(w00 * (p00.*channel) + w01 * (p01.*channel) +
                                              w10 * (p10.*channel) + w11 * (p11.*channel));
                };
                out.at(t, y, x) = {mix(&Rgb::r), mix(&Rgb::g), mix(&Rgb::b)};
            }
        }
    }
    return out;
}

std::vector<double> gaussian_kernel(double sigma) {
    if (sigma < 0.0 || !std::isfinite(sigma)) {
        throw ParameterError("sigma must be non-negative, got " + std::to_string(sigma));
    }
    if (sigma == 0.0) return {1.0};
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;
    return kernel;
}

namespace {

// Half-sample symmetric extension: -1 -> 0, -2 -> 1, n -> n-1. For the
// nearest out-of-range sample this coincides with clamping, and it keeps the
// frame mean exactly.
int reflect(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
}

}  // namespace

Frame smooth_frame(const Frame& frame, double sigma) {
    const std::vector<double> kernel = gaussian_kernel(sigma);
    if (kernel.size() == 1) return frame;
    const int radius = static_cast<int>(kernel.size() / 2);
    const int w = frame.width;
    const int h = frame.height;

    std::vector<std::array<double, 3>> tmp(frame.pixels.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::array<double, 3> acc{};
            for (int k = -radius; k <= radius; ++k) {
                const Rgb& p = frame.pixels[static_cast<std::size_t>(y) * w + reflect(x + k, w)];
                const double wk = kernel[k + radius];
                acc[0] += wk * p.r;
                acc[1] += wk * p.g;
                acc[2] += wk * p.b;
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    Frame out{w, h, std::vector<Rgb>(frame.pixels.size())};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::array<double, 3> acc{};
            for (int k = -radius; k <= radius; ++k) {
                const auto& p = tmp[static_cast<std::size_t>(reflect(y + k, h)) * w + x];
                const double wk = kernel[k + radius];
                acc[0] += wk * p[0];
                acc[1] += wk * p[1];
                acc[2] += wk * p[2];
            }
            out.pixels[static_cast<std::size_t>(y) * w + x] = {
                static_cast<float>(acc[0]), static_cast<float>(acc[1]), static_cast<float>(acc[2])};
        }
    }
    return out;
}

VideoVolume gaussian_smooth(const VideoVolume& volume, double sigma) {
    gaussian_kernel(sigma);  // validates sigma
    if (sigma == 0.0) return volume;
    VideoVolume out(volume.width(), volume.height(), 0);
    for (int t = 0; t < volume.frame_count(); ++t) {
        const auto pixels = volume.frame(t);
        Frame smoothed = smooth_frame(Frame{volume.width(), volume.height(), {pixels.begin(), pixels.end()}}, sigma);
        out.append_frame(smoothed.pixels);
    }
    return out;
}

}  // namespace svx
