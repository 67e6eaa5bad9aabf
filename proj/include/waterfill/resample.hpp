#pragma once

#include "waterfill/scalar_field.hpp"

namespace waterfill {

/// Integer downsampling rate. Must be at least 1; whether a rate fits a
/// particular field is checked at the point of use.
struct SamplingRate {
    explicit SamplingRate(int v);
    int value;
};

/// Block-mean downsampling. Output dimensions are ceil(size / ks); partial
/// blocks at the right/bottom edges average only the pixels they cover.
/// Throws RateTooLarge if fewer than 3x3 coarse samples would remain.
ScalarField downsample(const ScalarField& field, SamplingRate ks);

/// Separable Catmull-Rom bicubic upscale (a = -0.5) with pixel-center
/// coordinate mapping and edge-clamped taps. Target must be at least as
/// large as the source in both dimensions (InvalidTarget otherwise).
ScalarField upscale_bicubic(const ScalarField& field, int target_width, int target_height);

} // namespace waterfill
