#include "svx/ssc.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>

#include "svx/visualization.hpp"

namespace svx {
namespace fs = std::filesystem;

double SscFrameHistogram::total() const { return std::accumulate(bins.begin(), bins.end(), 0.0); }

double ring_outer_radius(int ring, double r_max) {
    return r_max * std::pow(kRadialSpan, static_cast<double>(ring + 1 - kRadialBins) / kRadialBins);
}

int radial_bin(double distance, double r_max) {
    for (int ring = 0; ring < kRadialBins - 1; ++ring) {
        if (distance <= ring_outer_radius(ring, r_max)) return ring;
    }
    return kRadialBins - 1;
}

int angular_bin(double dx, double dy) {
    double theta = std::atan2(-dy, dx);
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    const int bin = static_cast<int>(std::floor(theta / (2.0 * std::numbers::pi / kAngularBins)));
    return std::min(bin, kAngularBins - 1);
}

std::vector<PixelPoint> boundary_points(const SupervoxelLabeling& labeling, int frame) {
    const auto mask = boundary_mask(labeling, frame);
    std::vector<PixelPoint> points;
    for (int y = 0; y < labeling.height; ++y) {
        for (int x = 0; x < labeling.width; ++x) {
            if (mask[static_cast<std::size_t>(y) * labeling.width + x]) points.push_back({x, y});
        }
    }
    return points;
}

SscFrameHistogram log_polar_histogram(std::span<const PixelPoint> points, const ReferencePoint& center,
                                      double r_max) {
    if (!(r_max > 0.0)) throw ParameterError("r_max must be positive");
    std::array<double, kRadialBins> outer{};
    for (int ring = 0; ring < kRadialBins; ++ring) outer[ring] = ring_outer_radius(ring, r_max);
    outer[kRadialBins - 1] = r_max;

    SscFrameHistogram hist;
    hist.frame_index = center.frame_index;
    hist.reference = center;
    for (const PixelPoint& p : points) {
        const double dx = p.x - center.x;
        const double dy = p.y - center.y;
        const double d = std::hypot(dx, dy);
        if (d > r_max) continue;
        int ring = 0;
        while (d > outer[ring]) ++ring;
        hist.bins[ring * kAngularBins + angular_bin(dx, dy)] += 1.0;
    }
    return hist;
}

double default_r_max(int width, int height) { return 0.5 * std::hypot(width, height); }

SscVideoDescriptor ssc_descriptor(const SupervoxelLabeling& labeling,
                                  std::span<const ReferencePoint> references) {
    if (static_cast<int>(references.size()) != labeling.frame_count) {
        throw ParameterError("need one reference point per frame");
    }
    const double r_max = default_r_max(labeling.width, labeling.height);
    SscVideoDescriptor out;
    int contributing = 0;
    for (int t = 0; t < labeling.frame_count; ++t) {
        const auto points = boundary_points(labeling, t);
        ReferencePoint ref = references[t];
        ref.frame_index = t;
        SscFrameHistogram hist = log_polar_histogram(points, ref, r_max);
        const double total = hist.total();
        if (total > 0.0) {
            for (double& b : hist.bins) b /= total;
            for (int i = 0; i < kSscBins; ++i) out.aggregate[i] += hist.bins[i];
            ++contributing;
        }
        out.per_frame.push_back(hist);
    }
    if (contributing > 0) {
        for (double& b : out.aggregate) b /= contributing;
    }
    return out;
}

SscVideoDescriptor ssc_descriptor(const SupervoxelLabeling& labeling, const FlowField& flow) {
    if (flow.width != labeling.width || flow.height != labeling.height) {
        throw ParameterError("labeling and flow dimensions differ");
    }
    if (flow.pair_count() + 1 != labeling.frame_count) {
        throw ParameterError("flow must have one pair per consecutive frame pair");
    }
    const auto refs = reference_points(flow, labeling.frame_count);
    return ssc_descriptor(labeling, refs);
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                           static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    out.write(bytes, 4);
}

void put_bins(std::ostream& out, const SscBins& bins) {
    for (double b : bins) {
        const auto value = static_cast<float>(b);
        std::uint32_t bits = 0;
        std::memcpy(&bits, &value, 4);
        put_u32(out, bits);
    }
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw IngestError("truncated SVXD data");
    return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

SscBins get_bins(std::istream& in) {
    SscBins bins{};
    for (double& b : bins) {
        const std::uint32_t bits = get_u32(in);
        float value = 0.0f;
        std::memcpy(&value, &bits, 4);
        b = value;
    }
    return bins;
}

}  // namespace

void write_descriptor(const fs::path& path, const SscVideoDescriptor& descriptor) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot write " + path.string());
    out.write("SVXD", 4);
    put_u32(out, static_cast<std::uint32_t>(descriptor.per_frame.size()));
    for (const auto& frame : descriptor.per_frame) put_bins(out, frame.bins);
    put_bins(out, descriptor.aggregate);
}

SscVideoDescriptor read_descriptor(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "SVXD", 4) != 0) {
        throw IngestError(path.string() + ": not an SVXD descriptor");
    }
    SscVideoDescriptor out;
    const std::uint32_t frames = get_u32(in);
    for (std::uint32_t t = 0; t < frames; ++t) {
        SscFrameHistogram hist;
        hist.frame_index = static_cast<int>(t);
        hist.reference.frame_index = static_cast<int>(t);
        hist.bins = get_bins(in);
        out.per_frame.push_back(hist);
    }
    out.aggregate = get_bins(in);
    return out;
}

}  // namespace svx
