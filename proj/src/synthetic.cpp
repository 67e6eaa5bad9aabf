#include "waterfill/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "waterfill/errors.hpp"

namespace waterfill {

namespace {

// Raw "darkness" in [0, 1]: 1 at the model's darkest spot, falling towards
// 0 at the brightest. The caller rescales against the grid's actual
// extremes so both endpoints are hit exactly.
double raw_darkness(const ShadingModel& m, int x, int y, int width, int height) {
    switch (m.kind) {
    case ShadingKind::linear_ramp: {
        double u = 0.0;
        switch (m.direction) {
        case RampDirection::left_to_right:
            u = width > 1 ? static_cast<double>(x) / (width - 1) : 0.0;
            break;
        case RampDirection::right_to_left:
            u = width > 1 ? static_cast<double>(width - 1 - x) / (width - 1) : 0.0;
            break;
        case RampDirection::top_to_bottom:
            u = height > 1 ? static_cast<double>(y) / (height - 1) : 0.0;
            break;
        case RampDirection::bottom_to_top:
            u = height > 1 ? static_cast<double>(height - 1 - y) / (height - 1) : 0.0;
            break;
        }
        return 1.0 - u;
    }
    case ShadingKind::corner_shadow: {
        double cx = 0.0, cy = 0.0;
        switch (m.corner) {
        case Corner::top_left: cx = 0.0; cy = 0.0; break;
        case Corner::top_right: cx = width - 1.0; cy = 0.0; break;
        case Corner::bottom_left: cx = 0.0; cy = height - 1.0; break;
        case Corner::bottom_right: cx = width - 1.0; cy = height - 1.0; break;
        }
        const double diag = std::hypot(width - 1.0, height - 1.0);
        const double radius = m.radius_fraction * diag;
        double u = radius > 0.0 ? std::hypot(x - cx, y - cy) / radius : 1.0;
        if (u > 1.0) u = 1.0;
        const double smooth = u * u * (3.0 - 2.0 * u);
        return 1.0 - smooth;
    }
    case ShadingKind::spine_gradient: {
        // Gaussian valley across the middle; its ridge line spans the page
        // and therefore meets the border at both ends.
        double d, half;
        if (m.axis == Axis::vertical) {
            const double cx = (width - 1.0) / 2.0;
            d = x - cx;
            half = (width - 1.0) / 2.0;
        } else {
            const double cy = (height - 1.0) / 2.0;
            d = y - cy;
            half = (height - 1.0) / 2.0;
        }
        const double sigma = 0.65 * half;
        if (sigma <= 0.0) return 1.0;
        const double z = d / sigma;
        return std::exp(-z * z);
    }
    }
    return 0.0;
}

std::uint8_t quantize(double v) {
    double q = std::floor(v + 0.5);
    if (q < 0.0) q = 0.0;
    if (q > 255.0) q = 255.0;
    return static_cast<std::uint8_t>(q);
}

void validate_spec(const SyntheticSpec& spec) {
    std::ostringstream msg;
    if (spec.width < 8 || spec.height < 8) {
        msg << "spec " << spec.id << ": page must be at least 8x8";
        throw InvalidSpec(msg.str());
    }
    if (!(spec.background_level >= 0.0 && spec.background_level <= 255.0)) {
        msg << "spec " << spec.id << ": background level outside [0, 255]";
        throw InvalidSpec(msg.str());
    }
    if (!(spec.shading.min_factor > 0.0 && spec.shading.min_factor <= 1.0)) {
        msg << "spec " << spec.id << ": min_factor must lie in (0, 1]";
        throw InvalidSpec(msg.str());
    }
    if (spec.shading.kind == ShadingKind::corner_shadow && !(spec.shading.radius_fraction > 0.0)) {
        msg << "spec " << spec.id << ": corner radius fraction must be positive";
        throw InvalidSpec(msg.str());
    }
    for (const GlyphBox& b : spec.glyph_boxes) {
        if (b.width < 1 || b.height < 1 || b.x < 2 || b.y < 2 ||
            b.x + b.width > spec.width - 2 || b.y + b.height > spec.height - 2) {
            msg << "spec " << spec.id << ": glyph box " << b.x << "," << b.y << " "
                << b.width << "x" << b.height << " leaves the interior margin";
            throw InvalidSpec(msg.str());
        }
        if (!(b.level >= 0.0 && b.level <= 255.0)) {
            msg << "spec " << spec.id << ": glyph level outside [0, 255]";
            throw InvalidSpec(msg.str());
        }
    }
}

} // namespace

ScalarField shading_field(const ShadingModel& model, int width, int height) {
    ScalarField s(width, height, 1.0);
    if (model.min_factor >= 1.0)
        return s; // no shading at all
    ScalarField raw(width, height, 0.0);
    double lo = 1.0, hi = 0.0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double d = raw_darkness(model, x, y, width, height);
            raw.at(x, y) = d;
            if (d < lo) lo = d;
            if (d > hi) hi = d;
        }
    }
    if (hi <= lo)
        return s;
    const double span = hi - lo;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            // Blend instead of 1 - depth*dn: dn of exactly 0 or 1 then yields
            // 1.0 or min_factor with no rounding detour through 1-(1-f).
            const double dn = (raw.at(x, y) - lo) / span;
            s.at(x, y) = dn * model.min_factor + (1.0 - dn);
        }
    }
    return s;
}

std::vector<GlyphBox> random_glyph_boxes(int width, int height, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<GlyphBox> boxes;
    const int margin = std::max(8, std::min(width, height) / 24);
    const int line_h = std::clamp(height / 16, 6, 48);
    const int leading = 3 * line_h; // two text-heights of clean page between ink bands
    std::uniform_int_distribution<int> word_w(2 * line_h, 5 * line_h);
    std::uniform_int_distribution<int> gap_w(line_h + 2, 2 * line_h);
    std::uniform_int_distribution<int> level(90, 140);
    std::uniform_int_distribution<int> skip(0, 9);
    // Words are loose grids of short dashes rather than solid slabs. Ink on
    // a real page covers maybe a quarter of the text band, and it is that
    // sparseness that lets the background estimate bridge glyphs; a filled
    // rectangle would read as a picture, not as text.
    std::uniform_int_distribution<int> stroke_h(2, 3);
    std::uniform_int_distribution<int> stroke_gap(2, 3);
    std::uniform_int_distribution<int> dash_w(3, std::max(4, line_h / 2));
    std::uniform_int_distribution<int> dash_gap(3, std::max(4, line_h / 2));
    for (int y = margin; y + line_h <= height - margin; y += leading) {
        int x = margin;
        while (x + line_h <= width - margin) {
            const int w = std::min(word_w(rng), width - margin - x);
            if (w < line_h / 2)
                break;
            if (skip(rng) > 1) { // most slots hold a word, some stay blank
                const double lvl = static_cast<double>(level(rng));
                int sy = y;
                while (sy + 2 <= y + line_h) {
                    const int sh = std::min(stroke_h(rng), y + line_h - sy);
                    int sx = x;
                    while (sx + 2 <= x + w) {
                        GlyphBox b;
                        b.x = sx;
                        b.y = sy;
                        b.width = std::min(dash_w(rng), x + w - sx);
                        b.height = sh;
                        b.level = lvl;
                        boxes.push_back(b);
                        sx += b.width + dash_gap(rng);
                    }
                    sy += sh + stroke_gap(rng);
                }
            }
            x += w + gap_w(rng);
        }
    }
    return boxes;
}

SyntheticPair generate_synthetic(const SyntheticSpec& spec) {
    validate_spec(spec);
    const std::vector<GlyphBox> boxes =
        spec.glyph_boxes.empty() ? random_glyph_boxes(spec.width, spec.height, spec.seed)
                                 : spec.glyph_boxes;

    const std::uint8_t bg = quantize(spec.background_level);
    RgbImage gt(spec.width, spec.height, Rgb8{bg, bg, bg});
    for (const GlyphBox& b : boxes) {
        const std::uint8_t lv = quantize(b.level);
        for (int y = b.y; y < b.y + b.height; ++y) {
            for (int x = b.x; x < b.x + b.width; ++x) {
                std::uint8_t* px = gt.pixel(x, y);
                px[0] = lv;
                px[1] = lv;
                px[2] = lv;
            }
        }
    }

    const ScalarField s = shading_field(spec.shading, spec.width, spec.height);
    RgbImage distorted(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const std::uint8_t* src = gt.pixel(x, y);
            const std::uint8_t v = quantize(static_cast<double>(src[0]) * s.at(x, y));
            std::uint8_t* dst = distorted.pixel(x, y);
            dst[0] = v;
            dst[1] = v;
            dst[2] = v;
        }
    }
    return SyntheticPair{std::move(gt), std::move(distorted)};
}

std::vector<SyntheticSpec> default_corpus() {
    std::vector<SyntheticSpec> specs;
    specs.reserve(20);
    int n = 0;
    auto add = [&](ShadingModel m) {
        SyntheticSpec s;
        ++n;
        std::ostringstream id;
        id << "corpus-" << (n < 10 ? "0" : "") << n;
        s.id = id.str();
        s.width = 512;
        s.height = 384;
        s.background_level = 255.0;
        s.seed = 100 + static_cast<std::uint64_t>(n);
        s.shading = m;
        specs.push_back(std::move(s));
    };

    auto ramp = [](RampDirection d, double mf) {
        ShadingModel m;
        m.kind = ShadingKind::linear_ramp;
        m.direction = d;
        m.min_factor = mf;
        return m;
    };
    auto corner = [](Corner c, double rf, double mf) {
        ShadingModel m;
        m.kind = ShadingKind::corner_shadow;
        m.corner = c;
        m.radius_fraction = rf;
        m.min_factor = mf;
        return m;
    };
    auto spine = [](Axis a, double mf) {
        ShadingModel m;
        m.kind = ShadingKind::spine_gradient;
        m.axis = a;
        m.min_factor = mf;
        return m;
    };

    add(ramp(RampDirection::left_to_right, 0.66));
    add(ramp(RampDirection::right_to_left, 0.68));
    add(ramp(RampDirection::top_to_bottom, 0.74));
    add(ramp(RampDirection::bottom_to_top, 0.76));
    add(ramp(RampDirection::left_to_right, 0.64));
    add(ramp(RampDirection::top_to_bottom, 0.78));
    add(ramp(RampDirection::right_to_left, 0.70));

    add(corner(Corner::top_left, 0.80, 0.74));
    add(corner(Corner::top_right, 0.85, 0.75));
    add(corner(Corner::bottom_left, 0.90, 0.77));
    add(corner(Corner::bottom_right, 0.95, 0.73));
    add(corner(Corner::top_left, 0.82, 0.76));
    add(corner(Corner::bottom_right, 0.88, 0.78));
    add(corner(Corner::top_right, 0.92, 0.75));

    add(spine(Axis::vertical, 0.87));
    add(spine(Axis::vertical, 0.88));
    add(spine(Axis::vertical, 0.90));
    add(spine(Axis::vertical, 0.88));
    add(spine(Axis::vertical, 0.89));
    add(spine(Axis::vertical, 0.91));

    return specs;
}

} // namespace waterfill
