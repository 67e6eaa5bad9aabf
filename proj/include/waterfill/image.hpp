#pragma once

#include <cstdint>
#include <vector>

#include "waterfill/scalar_field.hpp"

namespace waterfill {

struct Rgb8 {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
};

/// 8-bit interleaved RGB image, row-major. Minimum size 3x3: anything
/// smaller has no interior pixels and cannot carry a water simulation.
class RgbImage {
public:
    RgbImage() = default;
    RgbImage(int width, int height, Rgb8 fill = {0, 0, 0});

    int width() const { return width_; }
    int height() const { return height_; }

    const std::uint8_t* pixel(int x, int y) const { return bytes_.data() + offset(x, y); }
    std::uint8_t* pixel(int x, int y) { return bytes_.data() + offset(x, y); }

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    std::vector<std::uint8_t>& bytes() { return bytes_; }

    bool same_size(const RgbImage& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x)) * 3;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bytes_;
};

/// Luma plus chroma planes kept as real values so no precision is lost
/// between the forward and inverse transforms. All planes share one size.
struct YCbCrImage {
    ScalarField y;
    ScalarField cb;
    ScalarField cr;

    int width() const { return y.width(); }
    int height() const { return y.height(); }
};

/// BT.601 full-range analysis transform. Output planes are clamped to
/// [0, 255] but otherwise unquantized.
YCbCrImage rgb_to_ycbcr(const RgbImage& image);

/// Inverse transform with round-half-up quantization to 8 bits.
RgbImage ycbcr_to_rgb(const YCbCrImage& image);

} // namespace waterfill
