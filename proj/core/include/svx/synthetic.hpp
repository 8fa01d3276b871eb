#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svx/taxonomy.hpp"
#include "svx/volume.hpp"

namespace svx::synth {

/// Actor-analog classes: a solid square and a hollow one.
enum class Shape { box, ring };
/// Action-analog classes.
enum class Motion { translate, orbit, oscillate, expand };

inline constexpr Shape kShapes[] = {Shape::box, Shape::ring};
inline constexpr Motion kMotions[] = {Motion::translate, Motion::orbit, Motion::oscillate,
                                      Motion::expand};

std::string_view to_string(Shape shape);
std::string_view to_string(Motion motion);

/// Stand-in labels so synthetic clips flow through the recognition harness.
Actor actor_for(Shape shape);
Action action_for(Motion motion);

struct ClipSpec {
    Shape shape = Shape::box;
    Motion motion = Motion::translate;
    int width = 64;
    int height = 48;
    int frames = 12;
    std::uint64_t seed = 0;  ///< jitters position, phase, colors and noise
    float noise = 0.0f;      ///< per-channel uniform noise amplitude
};

/// Renders one clip: a flat-colored shape moving over a flat background,
/// optionally with per-pixel noise.
VideoVolume render_clip(const ClipSpec& spec);

struct CorpusEntry {
    std::string id;
    ClipSpec spec;
};

/// `clips_per_class` clips for every (shape, motion) pair.
std::vector<CorpusEntry> corpus(int clips_per_class, std::uint64_t seed, int width = 64,
                                int height = 48, int frames = 12);

/// A `size` x `size` square of `value` on black, offset by (dx, dy).
VideoVolume translating_square(int width, int height, int size, int x0, int y0, int dx, int dy,
                               int frames, float value = 220.0f);

}  // namespace svx::synth
