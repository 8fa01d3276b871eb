#include "svx/motion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "svx/video_io.hpp"

namespace svx {
namespace fs = std::filesystem;

namespace {

std::vector<float> grayscale(std::span<const Rgb> pixels) {
    std::vector<float> out(pixels.size());
    std::transform(pixels.begin(), pixels.end(), out.begin(), luma);
    return out;
}

std::vector<float> blur_gray(const std::vector<float>& image, int width, int height, double sigma) {
    if (sigma <= 0.0) return image;
    Frame frame{width, height, std::vector<Rgb>(image.size())};
    for (std::size_t i = 0; i < image.size(); ++i) frame.pixels[i] = {image[i], image[i], image[i]};
    const Frame smoothed = smooth_frame(frame, sigma);
    std::vector<float> out(image.size());
    for (std::size_t i = 0; i < image.size(); ++i) out[i] = smoothed.pixels[i].r;
    return out;
}

}  // namespace

std::vector<FlowVector> horn_schunck(const std::vector<float>& first, const std::vector<float>& second,
                                     int width, int height, const HornSchunckParams& params) {
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (first.size() != n || second.size() != n) throw ParameterError("flow images differ in size");
    if (!(params.alpha > 0.0) || params.iterations < 0) throw ParameterError("invalid Horn-Schunck parameters");

    const std::vector<float> e0 = blur_gray(first, width, height, params.presmooth_sigma);
    const std::vector<float> e1 = blur_gray(second, width, height, params.presmooth_sigma);

    auto clamp_x = [&](int x) { return std::clamp(x, 0, width - 1); };
    auto clamp_y = [&](int y) { return std::clamp(y, 0, height - 1); };
    auto at = [&](const std::vector<float>& img, int y, int x) {
        return static_cast<double>(img[static_cast<std::size_t>(clamp_y(y)) * width + clamp_x(x)]);
    };

    // Derivatives estimated over the 2x2x2 cube (forward differences averaged).
    std::vector<double> ex(n), ey(n), et(n);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            ex[i] = 0.25 * (at(e0, y, x + 1) - at(e0, y, x) + at(e0, y + 1, x + 1) - at(e0, y + 1, x) +
                            at(e1, y, x + 1) - at(e1, y, x) + at(e1, y + 1, x + 1) - at(e1, y + 1, x));
            ey[i] = 0.25 * (at(e0, y + 1, x) - at(e0, y, x) + at(e0, y + 1, x + 1) - at(e0, y, x + 1) +
                            at(e1, y + 1, x) - at(e1, y, x) + at(e1, y + 1, x + 1) - at(e1, y, x + 1));
            et[i] = 0.25 * (at(e1, y, x) - at(e0, y, x) + at(e1, y + 1, x) - at(e0, y + 1, x) +
                            at(e1, y, x + 1) - at(e0, y, x + 1) + at(e1, y + 1, x + 1) - at(e0, y + 1, x + 1));
        }
    }

    const double alpha2 = params.alpha * params.alpha;
    std::vector<double> u(n, 0.0), v(n, 0.0), u_next(n), v_next(n);
    auto avg = [&](const std::vector<double>& f, int y, int x) {
        auto g = [&](int yy, int xx) {
            return f[static_cast<std::size_t>(clamp_y(yy)) * width + clamp_x(xx)];
        };
        return (g(y - 1, x) + g(y + 1, x) + g(y, x - 1) + g(y, x + 1)) / 6.0 +
               (g(y - 1, x - 1) + g(y - 1, x + 1) + g(y + 1, x - 1) + g(y + 1, x + 1)) / 12.0;
    };
    for (int iter = 0; iter < params.iterations; ++iter) {
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * width + x;
                const double ub = avg(u, y, x);
                const double vb = avg(v, y, x);
                const double t = (ex[i] * ub + ey[i] * vb + et[i]) / (alpha2 + ex[i] * ex[i] + ey[i] * ey[i]);
                u_next[i] = ub - ex[i] * t;
                v_next[i] = vb - ey[i] * t;
            }
        }
        u.swap(u_next);
        v.swap(v_next);
    }

    std::vector<FlowVector> flow(n);
    for (std::size_t i = 0; i < n; ++i) flow[i] = {static_cast<float>(u[i]), static_cast<float>(v[i])};
    return flow;
}

FlowField compute_flow(const VideoVolume& volume, const HornSchunckParams& params) {
    if (volume.frame_count() < 2) throw ParameterError("optical flow needs at least two frames");
    FlowField field;
    field.width = volume.width();
    field.height = volume.height();
    std::vector<float> previous = grayscale(volume.frame(0));
    for (int t = 1; t < volume.frame_count(); ++t) {
        std::vector<float> current = grayscale(volume.frame(t));
        field.pairs.push_back(horn_schunck(previous, current, volume.width(), volume.height(), params));
        previous = std::move(current);
    }
    return field;
}

ReferencePoint flow_center_of_mass(const FlowField& flow, int pair_index) {
    if (pair_index < 0 || pair_index >= flow.pair_count()) {
        throw RangeError("flow pair " + std::to_string(pair_index) + " out of range");
    }
    const auto& pair = flow.pairs[pair_index];
    double total = 0.0, sx = 0.0, sy = 0.0;
    for (int y = 0; y < flow.height; ++y) {
        for (int x = 0; x < flow.width; ++x) {
            const FlowVector& f = pair[static_cast<std::size_t>(y) * flow.width + x];
            const double m = std::hypot(static_cast<double>(f.u), static_cast<double>(f.v));
            total += m;
            sx += m * x;
            sy += m * y;
        }
    }
    ReferencePoint point{pair_index, (flow.width - 1) / 2.0, (flow.height - 1) / 2.0};
    if (total / static_cast<double>(pair.size()) >= 1e-6) {
        point.x = sx / total;
        point.y = sy / total;
    }
    return point;
}

std::vector<ReferencePoint> reference_points(const FlowField& flow, int frame_count) {
    if (flow.pair_count() == 0) throw ParameterError("flow field has no frame pairs");
    std::vector<ReferencePoint> points;
    points.reserve(frame_count);
    for (int t = 0; t < frame_count; ++t) {
        ReferencePoint p = flow_center_of_mass(flow, std::min(t, flow.pair_count() - 1));
        p.frame_index = t;
        points.push_back(p);
    }
    return points;
}

namespace {

constexpr std::array<char, 4> kFlowMagic = {'S', 'V', 'X', 'F'};

void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                           static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    out.write(bytes, 4);
}

void put_f32(std::ostream& out, float value) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, &value, 4);
    put_u32(out, bits);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw IngestError("truncated SVXF data");
    return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

float get_f32(std::istream& in) {
    const std::uint32_t bits = get_u32(in);
    float value = 0.0f;
    std::memcpy(&value, &bits, 4);
    return value;
}

}  // namespace

void write_flow(const fs::path& path, const FlowField& flow) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot write " + path.string());
    out.write(kFlowMagic.data(), 4);
    put_u32(out, static_cast<std::uint32_t>(flow.width));
    put_u32(out, static_cast<std::uint32_t>(flow.height));
    put_u32(out, static_cast<std::uint32_t>(flow.pair_count()));
    for (const auto& pair : flow.pairs) {
        for (const FlowVector& f : pair) {
            put_f32(out, f.u);
            put_f32(out, f.v);
        }
    }
}

FlowField read_flow(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open " + path.string());
    std::array<char, 4> magic{};
    in.read(magic.data(), 4);
    if (!in || magic != kFlowMagic) throw IngestError(path.string() + ": not an SVXF flow file");
    FlowField flow;
    flow.width = static_cast<int>(get_u32(in));
    flow.height = static_cast<int>(get_u32(in));
    const int pairs = static_cast<int>(get_u32(in));
    flow.pairs.resize(pairs);
    for (auto& pair : flow.pairs) {
        pair.resize(static_cast<std::size_t>(flow.width) * flow.height);
        for (FlowVector& f : pair) {
            f.u = get_f32(in);
            f.v = get_f32(in);
        }
    }
    return flow;
}

}  // namespace svx
