#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "waterfill/image.hpp"
#include "waterfill/scalar_field.hpp"

namespace waterfill {

/// psnr_db is +infinity when the images are identical (mse == 0).
struct PsnrResult {
    double psnr_db = 0.0;
    double mse = 0.0;
};

/// Peak signal-to-noise ratio against a 255 peak, averaged over all
/// channels. Throws DimensionMismatch when sizes differ.
PsnrResult psnr(const RgbImage& a, const RgbImage& b);
PsnrResult psnr(const ScalarField& a, const ScalarField& b);

/// Levenshtein distance with unit costs over Unicode scalar values.
/// Input is UTF-8; malformed bytes count as one symbol each.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// Collapses every run of whitespace to a single space and trims the ends.
/// Applied to OCR text files before they are compared.
std::string normalize_whitespace(std::string_view text);

} // namespace waterfill
