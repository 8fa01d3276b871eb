#include "svx/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "svx/error.hpp"

namespace svx::synth {

std::string_view to_string(Shape shape) {
    return shape == Shape::box ? "box" : "ring";
}

std::string_view to_string(Motion motion) {
    switch (motion) {
        case Motion::translate: return "translate";
        case Motion::orbit: return "orbit";
        case Motion::oscillate: return "oscillate";
        case Motion::expand: return "expand";
    }
    return "translate";
}

Actor actor_for(Shape shape) {
    return shape == Shape::box ? Actor::human : Actor::animal;
}

Action action_for(Motion motion) {
    switch (motion) {
        case Motion::translate: return Action::walking;
        case Motion::orbit: return Action::spinning;
        case Motion::oscillate: return Action::jumping;
        case Motion::expand: return Action::flying;
    }
    return Action::walking;
}

namespace {

struct Pose {
    double cx = 0.0;
    double cy = 0.0;
    double angle = 0.0;
    double scale = 1.0;
};

double uniform(std::mt19937_64& engine, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(engine() >> 11) * 0x1.0p-53);
}

}  // namespace

VideoVolume render_clip(const ClipSpec& spec) {
    if (spec.width < 16 || spec.height < 16 || spec.frames < 2) {
        throw ParameterError("synthetic clips need at least 16x16 pixels and 2 frames");
    }
    std::mt19937_64 engine(spec.seed);
    const double w = spec.width;
    const double h = spec.height;
    const double unit = std::min(w, h) / 48.0;

    // Outer half extent in the shape's own frame. Boxes are small and solid,
    // rings large and hollow; every motion scales with the shape.
    const double half = (spec.shape == Shape::box ? 5.0 : 10.0) * unit * uniform(engine, 0.9, 1.1);
    const double hole = spec.shape == Shape::ring ? half * 0.6 : -1.0;

    const float bg = static_cast<float>(uniform(engine, 40.0, 80.0));
    const Rgb background{bg, bg * 0.9f, bg * 1.1f};
    const Rgb foreground{static_cast<float>(uniform(engine, 190.0, 240.0)),
                         static_cast<float>(uniform(engine, 150.0, 230.0)),
                         static_cast<float>(uniform(engine, 60.0, 140.0))};

    const double cx0 = w / 2.0 + uniform(engine, -2.0, 2.0) * unit;
    const double cy0 = h / 2.0 + uniform(engine, -2.0, 2.0) * unit;
    const double angle0 = uniform(engine, -0.1, 0.1);
    const double speed = uniform(engine, 0.25, 0.3) * half;
    const double phase = uniform(engine, 0.0, 0.3);
    const double last = spec.frames - 1;

    auto pose_at = [&](int t) {
        Pose p{cx0, cy0, angle0, 1.0};
        switch (spec.motion) {
            case Motion::translate:
                p.cx = cx0 + speed * (t - last / 2.0);
                break;
            case Motion::orbit: {
                // Revolves around the start point in quarter-turn steps.
                const double turn = std::numbers::pi / 2.0 * t + phase;
                p.cx = cx0 + half * std::cos(turn);
                p.cy = cy0 + half * std::sin(turn);
                break;
            }
            case Motion::oscillate:
                // Jumps between two rest positions every frame.
                p.cx = cx0 + (t % 2 == 0 ? -1.0 : 1.0) * half;
                break;
            case Motion::expand:
                // Grows away from its fixed top-left corner.
                p.scale = 0.5 + 0.9 * t / last;
                p.cx = cx0 - half + half * p.scale;
                p.cy = cy0 - half + half * p.scale;
                break;
        }
        return p;
    };

    VideoVolume volume(spec.width, spec.height, spec.frames, background);
    std::uniform_real_distribution<float> noise(-spec.noise, spec.noise);
    for (int t = 0; t < spec.frames; ++t) {
        const Pose p = pose_at(t);
        const double ca = std::cos(p.angle);
        const double sa = std::sin(p.angle);
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                const double dx = x - p.cx;
                const double dy = y - p.cy;
                const double u = (ca * dx + sa * dy) / p.scale;
                const double v = (-sa * dx + ca * dy) / p.scale;
                const double extent = std::max(std::abs(u), std::abs(v));
                Rgb c = extent <= half && extent > hole ? foreground : background;
                c.r = std::clamp(c.r + noise(engine), 0.0f, 255.0f);
                c.g = std::clamp(c.g + noise(engine), 0.0f, 255.0f);
                c.b = std::clamp(c.b + noise(engine), 0.0f, 255.0f);
                volume.at(t, y, x) = c;
            }
        }
    }
    return volume;
}

std::vector<CorpusEntry> corpus(int clips_per_class, std::uint64_t seed, int width, int height,
                                int frames) {
    std::vector<CorpusEntry> out;
    std::mt19937_64 engine(seed);
    for (Shape shape : kShapes) {
        for (Motion motion : kMotions) {
            for (int i = 0; i < clips_per_class; ++i) {
                CorpusEntry entry;
                entry.id = std::string(to_string(shape)) + "_" + std::string(to_string(motion)) + "_" +
                           std::to_string(i);
                entry.spec = {shape, motion, width, height, frames, engine(), 0.0f};
                out.push_back(std::move(entry));
            }
        }
    }
    return out;
}

VideoVolume translating_square(int width, int height, int size, int x0, int y0, int dx, int dy,
                               int frames, float value) {
    VideoVolume volume(width, height, frames, Rgb{0.0f, 0.0f, 0.0f});
    for (int t = 0; t < frames; ++t) {
        for (int y = y0 + dy * t; y < y0 + dy * t + size; ++y) {
            for (int x = x0 + dx * t; x < x0 + dx * t + size; ++x) {
                if (x >= 0 && y >= 0 && x < width && y < height) volume.at(t, y, x) = Rgb{value, value, value};
            }
        }
    }
    return volume;
}

}  // namespace svx::synth
