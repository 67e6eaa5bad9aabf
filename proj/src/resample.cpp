#include "waterfill/resample.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "waterfill/errors.hpp"

namespace waterfill {

SamplingRate::SamplingRate(int v) : value(v) {
    if (v < 1)
        throw std::invalid_argument("sampling rate must be at least 1");
}

ScalarField downsample(const ScalarField& field, SamplingRate ks) {
    const int k = ks.value;
    const int out_w = (field.width() + k - 1) / k;
    const int out_h = (field.height() + k - 1) / k;
    if (out_w < 3 || out_h < 3) {
        std::ostringstream msg;
        msg << "rate " << k << " reduces " << field.width() << "x" << field.height()
            << " to " << out_w << "x" << out_h << "; at least 3x3 is required";
        throw RateTooLarge(msg.str());
    }
    ScalarField out(out_w, out_h, 0.0);
    for (int by = 0; by < out_h; ++by) {
        const int y0 = by * k;
        const int y1 = std::min(y0 + k, field.height());
        for (int bx = 0; bx < out_w; ++bx) {
            const int x0 = bx * k;
            const int x1 = std::min(x0 + k, field.width());
            double sum = 0.0;
            for (int y = y0; y < y1; ++y) {
                const double* row = field.row(y);
                for (int x = x0; x < x1; ++x)
                    sum += row[x];
            }
            out.at(bx, by) = sum / ((y1 - y0) * (x1 - x0));
        }
    }
    return out;
}

namespace {

// Catmull-Rom kernel weights (a = -0.5) for the four taps around phase t.
// At t = 0 the weights are exactly {0, 1, 0, 0}, so source-aligned samples
// pass through unchanged.
inline void catmull_rom_weights(double t, double w[4]) {
    w[0] = ((-0.5 * t + 1.0) * t - 0.5) * t;
    w[1] = (1.5 * t - 2.5) * t * t + 1.0;
    w[2] = ((-1.5 * t + 2.0) * t + 0.5) * t;
    w[3] = (0.5 * t - 0.5) * t * t;
}

struct TapPlan {
    int i0, i1, i2, i3;
    double w0, w1, w2, w3;
};

// Precomputed taps for one axis: pixel-center mapping
// src = (dst + 0.5) * (src_size / dst_size) - 0.5, taps clamped to the
// valid range.
std::vector<TapPlan> plan_axis(int src_size, int dst_size) {
    std::vector<TapPlan> plan(static_cast<std::size_t>(dst_size));
    const double scale = static_cast<double>(src_size) / static_cast<double>(dst_size);
    for (int d = 0; d < dst_size; ++d) {
        const double s = (d + 0.5) * scale - 0.5;
        const double base = std::floor(s);
        const double t = s - base;
        const int b = static_cast<int>(base);
        auto clampi = [src_size](int v) {
            if (v < 0) return 0;
            if (v > src_size - 1) return src_size - 1;
            return v;
        };
        TapPlan& p = plan[static_cast<std::size_t>(d)];
        p.i0 = clampi(b - 1);
        p.i1 = clampi(b);
        p.i2 = clampi(b + 1);
        p.i3 = clampi(b + 2);
        double w[4];
        catmull_rom_weights(t, w);
        p.w0 = w[0];
        p.w1 = w[1];
        p.w2 = w[2];
        p.w3 = w[3];
    }
    return plan;
}

// Interpolate around the second tap: v1 + sum of weighted differences.
// Mathematically identical to the plain weighted sum (the weights total
// one) but constant inputs reproduce exactly.
inline double apply(const TapPlan& p, double v0, double v1, double v2, double v3) {
    return v1 + (p.w0 * (v0 - v1) + p.w2 * (v2 - v1) + p.w3 * (v3 - v1));
}

} // namespace

ScalarField upscale_bicubic(const ScalarField& field, int target_width, int target_height) {
    if (target_width < field.width() || target_height < field.height()) {
        std::ostringstream msg;
        msg << "upscale target " << target_width << "x" << target_height
            << " is smaller than the source " << field.width() << "x" << field.height();
        throw InvalidTarget(msg.str());
    }
    const std::vector<TapPlan> cols = plan_axis(field.width(), target_width);
    const std::vector<TapPlan> rows = plan_axis(field.height(), target_height);

    // Horizontal pass into an intermediate src_height x target_width grid.
    ScalarField mid(target_width, field.height(), 0.0);
    for (int y = 0; y < field.height(); ++y) {
        const double* src = field.row(y);
        double* dst = mid.row(y);
        for (int x = 0; x < target_width; ++x) {
            const TapPlan& p = cols[static_cast<std::size_t>(x)];
            dst[x] = apply(p, src[p.i0], src[p.i1], src[p.i2], src[p.i3]);
        }
    }

    // Vertical pass.
    ScalarField out(target_width, target_height, 0.0);
    for (int y = 0; y < target_height; ++y) {
        const TapPlan& p = rows[static_cast<std::size_t>(y)];
        const double* r0 = mid.row(p.i0);
        const double* r1 = mid.row(p.i1);
        const double* r2 = mid.row(p.i2);
        const double* r3 = mid.row(p.i3);
        double* dst = out.row(y);
        for (int x = 0; x < target_width; ++x)
            dst[x] = apply(p, r0[x], r1[x], r2[x], r3[x]);
    }
    return out;
}

} // namespace waterfill
