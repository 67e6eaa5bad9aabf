#pragma once

#include <filesystem>

#include "waterfill/image.hpp"
#include "waterfill/scalar_field.hpp"

namespace waterfill {

/// Loads a PNG or JPEG file (sniffed by magic bytes, not extension).
/// Alpha, if present, is composited over white. Grayscale sources are
/// expanded to RGB. Throws FileNotFound, UnsupportedFormat, ImageTooSmall
/// or IoError.
RgbImage load_image(const std::filesystem::path& path);

/// Writes a lossless 8-bit RGB PNG. Throws IoError on failure.
void save_image(const RgbImage& image, const std::filesystem::path& path);

/// Writes a single-channel 8-bit PNG; values are clamped to [0, 255] and
/// rounded half up. Used for background-surface dumps.
void save_grayscale(const ScalarField& field, const std::filesystem::path& path);

} // namespace waterfill
