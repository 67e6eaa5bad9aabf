#include "waterfill/image.hpp"

#include <cmath>

#include "waterfill/errors.hpp"

namespace waterfill {

namespace {

// BT.601 full-range coefficients.
constexpr double kRY = 0.299;
constexpr double kGY = 0.587;
constexpr double kBY = 0.114;
constexpr double kCb = 0.564;
constexpr double kCr = 0.713;

inline double clamp255(double v) {
    if (v < 0.0) return 0.0;
    if (v > 255.0) return 255.0;
    return v;
}

inline std::uint8_t quantize(double v) {
    // Round half up, then clamp.
    return static_cast<std::uint8_t>(clamp255(std::floor(v + 0.5)));
}

} // namespace

RgbImage::RgbImage(int width, int height, Rgb8 fill) : width_(width), height_(height) {
    if (width < 3 || height < 3)
        throw ImageTooSmall("images below 3x3 have no interior pixels");
    bytes_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
    for (std::size_t i = 0; i < bytes_.size(); i += 3) {
        bytes_[i] = fill.r;
        bytes_[i + 1] = fill.g;
        bytes_[i + 2] = fill.b;
    }
}

YCbCrImage rgb_to_ycbcr(const RgbImage& image) {
    const int wd = image.width();
    const int ht = image.height();
    YCbCrImage out{ScalarField(wd, ht), ScalarField(wd, ht), ScalarField(wd, ht)};
    const std::uint8_t* px = image.bytes().data();
    double* yp = out.y.values().data();
    double* cbp = out.cb.values().data();
    double* crp = out.cr.values().data();
    const std::size_t n = static_cast<std::size_t>(wd) * ht;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = px[i * 3];
        const double g = px[i * 3 + 1];
        const double b = px[i * 3 + 2];
        const double y = kRY * r + kGY * g + kBY * b;
        yp[i] = clamp255(y);
        cbp[i] = clamp255(128.0 + (b - y) * kCb);
        crp[i] = clamp255(128.0 + (r - y) * kCr);
    }
    return out;
}

RgbImage ycbcr_to_rgb(const YCbCrImage& image) {
    if (!image.y.same_size(image.cb) || !image.y.same_size(image.cr))
        throw DimensionMismatch("YCbCr planes differ in size");
    RgbImage out(image.width(), image.height());
    const double* yp = image.y.values().data();
    const double* cbp = image.cb.values().data();
    const double* crp = image.cr.values().data();
    std::uint8_t* px = out.bytes().data();
    const std::size_t n = image.y.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double y = yp[i];
        const double r = y + (crp[i] - 128.0) / kCr;
        const double b = y + (cbp[i] - 128.0) / kCb;
        const double g = (y - kRY * r - kBY * b) / kGY;
        px[i * 3] = quantize(r);
        px[i * 3 + 1] = quantize(g);
        px[i * 3 + 2] = quantize(b);
    }
    return out;
}

} // namespace waterfill
