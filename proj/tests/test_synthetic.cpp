#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "waterfill/errors.hpp"
#include "waterfill/synthetic.hpp"

using namespace waterfill;

TEST_CASE("ramp shading hits both endpoints exactly") {
    ShadingModel m;
    m.kind = ShadingKind::linear_ramp;
    m.direction = RampDirection::left_to_right;
    m.min_factor = 0.4;
    const ScalarField s = shading_field(m, 64, 48);
    CHECK(s.at(0, 0) == 0.4);
    CHECK(s.at(0, 47) == 0.4);
    CHECK(s.at(63, 20) == 1.0);
    // Monotone across the page.
    CHECK(s.at(16, 10) < s.at(48, 10));

    m.direction = RampDirection::bottom_to_top;
    const ScalarField v = shading_field(m, 64, 48);
    CHECK(v.at(30, 47) == 0.4);
    CHECK(v.at(30, 0) == 1.0);
}

TEST_CASE("corner shadow is darkest at its corner and clears beyond the radius") {
    ShadingModel m;
    m.kind = ShadingKind::corner_shadow;
    m.corner = Corner::bottom_right;
    m.radius_fraction = 0.5;
    m.min_factor = 0.35;
    const ScalarField s = shading_field(m, 80, 60);
    CHECK(s.at(79, 59) == 0.35);
    CHECK(s.at(0, 0) == 1.0); // outside the shadow radius
    CHECK(s.at(60, 45) < s.at(20, 15));
}

TEST_CASE("spine gradient darkens the center line of the chosen axis") {
    ShadingModel m;
    m.kind = ShadingKind::spine_gradient;
    m.axis = Axis::vertical;
    m.min_factor = 0.5;
    const ScalarField s = shading_field(m, 65, 33); // odd width: exact center column
    CHECK(s.at(32, 0) == 0.5);
    CHECK(s.at(32, 16) == 0.5);
    CHECK(s.at(0, 16) == 1.0);
    CHECK(s.at(64, 16) == 1.0);

    m.axis = Axis::horizontal;
    const ScalarField t = shading_field(m, 33, 65);
    CHECK(t.at(16, 32) == 0.5);
    CHECK(t.at(16, 0) == 1.0);
}

TEST_CASE("the darkest shading pixel sits on the border ring") {
    // Required so the induced basin always touches the boundary: that is
    // what lets the flood stage classify it as shading rather than content.
    for (ShadingKind kind :
         {ShadingKind::linear_ramp, ShadingKind::corner_shadow, ShadingKind::spine_gradient}) {
        ShadingModel m;
        m.kind = kind;
        m.min_factor = 0.45;
        const ScalarField s = shading_field(m, 40, 30);
        double best = 2.0;
        int bx = -1, by = -1;
        for (int y = 0; y < 30; ++y) {
            for (int x = 0; x < 40; ++x) {
                if (s.at(x, y) < best) {
                    best = s.at(x, y);
                    bx = x;
                    by = y;
                }
            }
        }
        const bool on_ring = bx == 0 || by == 0 || bx == 39 || by == 29;
        CHECK(on_ring);
        CHECK(best == 0.45);
    }
}

TEST_CASE("min_factor of one disables shading entirely") {
    ShadingModel m;
    m.min_factor = 1.0;
    const ScalarField s = shading_field(m, 16, 16);
    for (double v : s.values())
        CHECK(v == 1.0);
}

TEST_CASE("distorted page is the quantized product of page and shading") {
    SyntheticSpec spec;
    spec.id = "hand";
    spec.width = 64;
    spec.height = 48;
    spec.background_level = 200.0;
    spec.shading.kind = ShadingKind::linear_ramp;
    spec.shading.direction = RampDirection::left_to_right;
    spec.shading.min_factor = 0.4;
    spec.glyph_boxes.push_back(GlyphBox{30, 20, 6, 5, 40.0});

    const SyntheticPair pair = generate_synthetic(spec);
    // Border row carries no glyphs: gt is the plain background there.
    CHECK(int(pair.ground_truth.pixel(0, 0)[0]) == 200);
    CHECK(int(pair.distorted.pixel(0, 0)[0]) == 80);    // 200 * 0.4
    CHECK(int(pair.distorted.pixel(63, 0)[0]) == 200);  // 200 * 1.0
    // Inside the glyph box.
    CHECK(int(pair.ground_truth.pixel(32, 22)[0]) == 40);
    const double s = shading_field(spec.shading, 64, 48).at(32, 22);
    CHECK(int(pair.distorted.pixel(32, 22)[0]) == int(std::floor(40.0 * s + 0.5)));
    // Channels are equal: the pages are grayscale in RGB form.
    CHECK(pair.distorted.pixel(32, 22)[0] == pair.distorted.pixel(32, 22)[1]);
    CHECK(pair.distorted.pixel(32, 22)[1] == pair.distorted.pixel(32, 22)[2]);
}

TEST_CASE("generation is deterministic per seed") {
    SyntheticSpec spec;
    spec.width = 128;
    spec.height = 96;
    spec.seed = 77;
    const SyntheticPair a = generate_synthetic(spec);
    const SyntheticPair b = generate_synthetic(spec);
    CHECK(a.ground_truth.bytes() == b.ground_truth.bytes());
    CHECK(a.distorted.bytes() == b.distorted.bytes());

    spec.seed = 78;
    const SyntheticPair c = generate_synthetic(spec);
    CHECK(a.ground_truth.bytes() != c.ground_truth.bytes());
}

TEST_CASE("random layout stays inside the border margin") {
    const std::vector<GlyphBox> boxes = random_glyph_boxes(512, 384, 5);
    CHECK(!boxes.empty());
    for (const GlyphBox& b : boxes) {
        CHECK(b.x >= 2);
        CHECK(b.y >= 2);
        CHECK(b.x + b.width <= 510);
        CHECK(b.y + b.height <= 382);
        CHECK(b.level >= 90.0);
        CHECK(b.level <= 140.0);
    }
}

TEST_CASE("spec validation rejects out-of-range inputs") {
    SyntheticSpec spec;
    spec.width = 6;
    CHECK_THROWS_AS(generate_synthetic(spec), InvalidSpec);

    spec = SyntheticSpec{};
    spec.background_level = 300.0;
    CHECK_THROWS_AS(generate_synthetic(spec), InvalidSpec);

    spec = SyntheticSpec{};
    spec.shading.min_factor = 0.0;
    CHECK_THROWS_AS(generate_synthetic(spec), InvalidSpec);
    spec.shading.min_factor = 1.2;
    CHECK_THROWS_AS(generate_synthetic(spec), InvalidSpec);

    spec = SyntheticSpec{};
    spec.shading.kind = ShadingKind::corner_shadow;
    spec.shading.radius_fraction = 0.0;
    CHECK_THROWS_AS(generate_synthetic(spec), InvalidSpec);

    spec = SyntheticSpec{};
    spec.glyph_boxes.push_back(GlyphBox{1, 10, 5, 5, 40.0}); // touches the margin
    CHECK_THROWS_AS(generate_synthetic(spec), InvalidSpec);

    spec = SyntheticSpec{};
    spec.glyph_boxes.push_back(GlyphBox{10, 10, 5, 5, 400.0}); // level out of range
    CHECK_THROWS_AS(generate_synthetic(spec), InvalidSpec);
}

TEST_CASE("the default corpus is twenty mixed 512x384 pages") {
    const std::vector<SyntheticSpec> corpus = default_corpus();
    REQUIRE(corpus.size() == 20);
    int ramps = 0, corners = 0, spines = 0;
    for (const SyntheticSpec& s : corpus) {
        CHECK(s.width == 512);
        CHECK(s.height == 384);
        CHECK(s.background_level == 255.0);
        switch (s.shading.kind) {
        case ShadingKind::linear_ramp: ++ramps; break;
        case ShadingKind::corner_shadow: ++corners; break;
        case ShadingKind::spine_gradient: ++spines; break;
        }
        // Every page must actually generate.
        CHECK_NOTHROW(generate_synthetic(s));
    }
    CHECK(ramps >= 4);
    CHECK(corners >= 4);
    CHECK(spines >= 4);
    // Ids are unique.
    std::vector<std::string> ids;
    for (const SyntheticSpec& s : corpus)
        ids.push_back(s.id);
    std::sort(ids.begin(), ids.end());
    CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
}
