#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "waterfill/image.hpp"
#include "waterfill/scalar_field.hpp"

namespace waterfill {

// Synthetic documents pair a clean grayscale page (uniform background with
// dark glyph boxes) with a copy degraded by multiplicative shading whose
// darkest point always lies on the image border, mimicking shadows cast
// across a photographed page.

enum class ShadingKind {
    linear_ramp,
    corner_shadow,
    spine_gradient,
};

/// For ramps: the edge the shadow clings to (the dark side).
enum class RampDirection {
    left_to_right,
    right_to_left,
    top_to_bottom,
    bottom_to_top,
};

enum class Corner {
    top_left,
    top_right,
    bottom_left,
    bottom_right,
};

enum class Axis {
    vertical,   // dark spine runs top to bottom
    horizontal, // dark spine runs left to right
};

struct ShadingModel {
    ShadingKind kind = ShadingKind::linear_ramp;
    double min_factor = 0.5; // luminance multiplier at the darkest point, (0, 1]
    RampDirection direction = RampDirection::left_to_right; // linear_ramp
    Corner corner = Corner::top_left;                       // corner_shadow
    double radius_fraction = 0.6;                           // corner_shadow, of the diagonal
    Axis axis = Axis::vertical;                             // spine_gradient
};

struct GlyphBox {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
    double level = 40.0; // glyph luminance
};

struct SyntheticSpec {
    std::string id = "synthetic";
    int width = 512;
    int height = 384;
    double background_level = 255.0;
    std::vector<GlyphBox> glyph_boxes; // empty: laid out from seed
    ShadingModel shading;
    std::uint64_t seed = 1;
};

struct SyntheticPair {
    RgbImage ground_truth;
    RgbImage distorted;
};

/// Multiplier field in [min_factor, 1] for the given model; both bounds
/// are attained exactly and the minimum lies on the border ring.
ScalarField shading_field(const ShadingModel& model, int width, int height);

/// Deterministic text-like layout of interior glyph boxes (2+ pixels away
/// from every border). Box sizes scale with the page.
std::vector<GlyphBox> random_glyph_boxes(int width, int height, std::uint64_t seed);

/// Renders the clean/distorted pair. Throws InvalidSpec for out-of-range
/// parameters or boxes that touch the 2-pixel border margin.
SyntheticPair generate_synthetic(const SyntheticSpec& spec);

/// Twenty mixed-model 512x384 pages used by the benchmark default.
std::vector<SyntheticSpec> default_corpus();

} // namespace waterfill
