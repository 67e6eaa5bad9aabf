#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "waterfill/diffusion.hpp"
#include "waterfill/errors.hpp"

#include "naive_reference.hpp"

using namespace waterfill;

namespace {

ScalarField random_field(std::mt19937_64& rng, int width, int height, double lo = 0.0,
                         double hi = 255.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarField f(width, height);
    for (double& v : f.values())
        v = dist(rng);
    return f;
}

// Integer-valued field whose surface stays inside [128, 256) for the whole
// run, so adding 50 never leaves the binade and stays exact in doubles.
ScalarField random_shift_field(std::mt19937_64& rng, int width, int height) {
    std::uniform_int_distribution<int> dist(128, 205);
    ScalarField f(width, height);
    for (double& v : f.values())
        v = static_cast<double>(dist(rng));
    return f;
}

bool border_dry(const ScalarField& w) {
    for (int x = 0; x < w.width(); ++x)
        if (w.at(x, 0) != 0.0 || w.at(x, w.height() - 1) != 0.0)
            return false;
    for (int y = 0; y < w.height(); ++y)
        if (w.at(0, y) != 0.0 || w.at(w.width() - 1, y) != 0.0)
            return false;
    return true;
}

bool all_nonneg(const ScalarField& w) {
    for (double v : w.values())
        if (!(v >= 0.0))
            return false;
    return true;
}

bool bitwise_equal(const ScalarField& a, const ScalarField& b) {
    if (!a.same_size(b))
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.values()[i] != b.values()[i])
            return false;
    return true;
}

} // namespace

TEST_CASE("diffusion rate validation") {
    CHECK(validate_eta(0.25) == 0.25);
    CHECK(validate_eta(0.1) == 0.1);
    CHECK_THROWS_AS(validate_eta(0.3), UnstableRate);
    CHECK_THROWS_AS(validate_eta(0.0), UnstableRate);
    CHECK_THROWS_AS(validate_eta(-0.1), UnstableRate);
    CHECK_THROWS_AS(validate_eta(std::nan("")), UnstableRate);

    // The refusal has to tell the user what the legal range is.
    try {
        validate_eta(0.3);
        FAIL("0.3 must be rejected");
    } catch (const UnstableRate& e) {
        CHECK(std::string(e.what()).find("(0, 0.25]") != std::string::npos);
    }
}

TEST_CASE("parameter struct validation") {
    CHECK_NOTHROW(DiffusionParams(0.2, 0.01, 100));
    CHECK_THROWS_AS(DiffusionParams(0.3, 0.01, 100), UnstableRate);
    CHECK_THROWS_AS(DiffusionParams(0.2, 0.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(DiffusionParams(0.2, -1.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(DiffusionParams(0.2, 0.01, 0), std::invalid_argument);
    CHECK_THROWS_AS(DiffusionParams(0.2, 0.01, 100, -5.0), std::invalid_argument);

    DiffusionParams tampered;
    tampered.eta = 0.4;
    CHECK_THROWS_AS(validate_params(tampered), UnstableRate);
}

TEST_CASE("peak altitude scans every pixel") {
    ScalarField flat(4, 4, 100.0);
    CHECK(peak_altitude(flat) == 100.0);

    ScalarField spiky(3, 3, 0.0);
    spiky.at(2, 1) = 255.0;
    CHECK(peak_altitude(spiky) == 255.0);

    std::mt19937_64 rng(7);
    ScalarField f = random_field(rng, 32, 32);
    double best = f.at(0, 0);
    for (double v : f.values())
        best = v > best ? v : best;
    CHECK(peak_altitude(f) == best);
}

TEST_CASE("center pit fills to the rim in one step") {
    // 3x3 terrain, rim at 100, center dipped to 96. The only interior pixel
    // sees a Laplacian of 4*(100-96)=16; at eta=0.25 the update is exactly 4.
    ScalarField h(3, 3, 100.0);
    h.at(1, 1) = 96.0;
    DiffusionParams params;

    SUBCASE("incremental") {
        WaterState s{h, ScalarField(3, 3, 0.0), 0};
        WaterState next = incremental_step(s, params);
        CHECK(next.w.at(1, 1) == 4.0);
        CHECK(next.h.at(1, 1) + next.w.at(1, 1) == 100.0);
        CHECK(next.t == 1);
        CHECK(border_dry(next.w));
    }

    SUBCASE("flood and effuse") {
        // At t=0 the pour term alone is (100-96)*e^0 = 4; every neighbor
        // stands higher so all effusion terms clip to zero.
        WaterState s{h, ScalarField(3, 3, 0.0), 0};
        WaterState next = flood_effuse_step(s, peak_altitude(h), params);
        CHECK(next.w.at(1, 1) == 4.0);
        CHECK(next.h.at(1, 1) + next.w.at(1, 1) == 100.0);
        CHECK(border_dry(next.w));
    }

    SUBCASE("incremental run converges in two iterations") {
        auto [g, report] = run_to_convergence(h, Method::incremental, params);
        CHECK(report.converged);
        CHECK(report.iterations == 2);
        CHECK(report.max_update == 0.0);
        CHECK(g.at(1, 1) == 100.0);
        CHECK(g.at(0, 0) == 100.0);
    }
}

TEST_CASE("constant terrain is a fixed point") {
    ScalarField h(8, 6, 42.0);
    DiffusionParams params;
    for (Method m : {Method::incremental, Method::flood_effuse}) {
        auto [g, report] = run_to_convergence(h, m, params);
        CHECK(report.converged);
        CHECK(report.iterations == 1);
        CHECK(report.max_update == 0.0);
        CHECK(bitwise_equal(g, h));
    }
}

TEST_CASE("effusion drains a puddle with no terrain support") {
    // Flat 5x5 terrain at 128 except one border pixel at 128.5, which pins
    // the peak at the puddle's own surface height so the pour term is zero.
    // A 0.5-deep puddle at the center then loses 4 * 0.25 * 0.5 in one step:
    // gone entirely. All values are dyadic, so the arithmetic is exact.
    ScalarField h(5, 5, 128.0);
    h.at(0, 0) = 128.5;
    ScalarField w(5, 5, 0.0);
    w.at(2, 2) = 0.5;
    DiffusionParams params;

    WaterState next = flood_effuse_step({h, w, 0}, peak_altitude(h), params);
    CHECK(next.w.at(2, 2) == 0.0);
    // Neighbors of the puddle sit at G=128 with the puddle 0.5 above them;
    // effusion only moves water out of higher cells, so they gain nothing
    // from it, but the pour term lifts them by (128.5 - 128)*e^0 = 0.5.
    CHECK(next.w.at(1, 2) == 0.5);
    CHECK(next.w.at(2, 1) == 0.5);
}

TEST_CASE("combined flood update clamps at dry") {
    // Water sitting above the terrain peak: pour term negative, effusion
    // negative, and the sum dips below zero, so the clamp must catch it.
    ScalarField h(5, 5, 100.0);
    ScalarField w(5, 5, 0.0);
    w.at(2, 2) = 1.0;
    DiffusionParams params;
    // flood = (100-101)*1 = -1, esum = 4*(-1) = -4, nw = 1 - 1 - 1 = -1 -> 0.
    WaterState next = flood_effuse_step({h, w, 0}, peak_altitude(h), params);
    CHECK(next.w.at(2, 2) == 0.0);
    CHECK(all_nonneg(next.w));
}

TEST_CASE("incremental update clamps at dry") {
    ScalarField h(3, 3, 100.0);
    h.at(1, 1) = 104.0; // center above its neighbors: raw update negative
    DiffusionParams params;
    WaterState next = incremental_step({h, ScalarField(3, 3, 0.0), 0}, params);
    CHECK(next.w.at(1, 1) == 0.0);
    CHECK(all_nonneg(next.w));
}

TEST_CASE("invariants hold after every iteration on random terrain") {
    std::mt19937_64 rng(2024);
    DiffusionParams params;
    for (int trial = 0; trial < 20; ++trial) {
        const ScalarField h = random_field(rng, 16, 16);
        for (Method m : {Method::incremental, Method::flood_effuse}) {
            const double peak = peak_altitude(h);
            WaterState s{h, ScalarField(16, 16, 0.0), 0};
            for (int i = 0; i < 60; ++i) {
                s = (m == Method::incremental) ? incremental_step(s, params)
                                               : flood_effuse_step(s, peak, params);
                REQUIRE(all_nonneg(s.w));
                REQUIRE(border_dry(s.w));
                for (double v : s.w.values())
                    REQUIRE(std::isfinite(v));
            }
        }
    }
}

TEST_CASE("optimized stepper matches the naive reference bit for bit") {
    // Non-square grids so a transposed index would show up immediately.
    std::mt19937_64 rng(99);
    DiffusionParams params;
    for (int trial = 0; trial < 10; ++trial) {
        const ScalarField h = random_field(rng, 12, 9);

        WaterState inc{h, ScalarField(12, 9, 0.0), 0};
        for (int i = 0; i < 40; ++i)
            inc = incremental_step(inc, params);
        const ScalarField naive_inc = naive::run_incremental(h, ScalarField(12, 9, 0.0), 0.25, 40);
        REQUIRE(bitwise_equal(inc.w, naive_inc));

        const double peak = peak_altitude(h);
        WaterState fld{h, ScalarField(12, 9, 0.0), 0};
        for (int i = 0; i < 40; ++i)
            fld = flood_effuse_step(fld, peak, params);
        const ScalarField naive_fld = naive::run_flood_effuse(h, ScalarField(12, 9, 0.0), 0.25, 40);
        REQUIRE(bitwise_equal(fld.w, naive_fld));
    }
}

TEST_CASE("raising the terrain by a constant shifts the surface exactly") {
    std::mt19937_64 rng(4242);
    DiffusionParams params;
    for (int trial = 0; trial < 5; ++trial) {
        const ScalarField h = random_shift_field(rng, 10, 10);
        ScalarField h_up = h;
        for (double& v : h_up.values())
            v += 50.0;

        for (Method m : {Method::incremental, Method::flood_effuse}) {
            const double peak = peak_altitude(h);
            const double peak_up = peak_altitude(h_up);
            WaterState a{h, ScalarField(10, 10, 0.0), 0};
            WaterState b{h_up, ScalarField(10, 10, 0.0), 0};
            for (int i = 0; i < 50; ++i) {
                a = (m == Method::incremental) ? incremental_step(a, params)
                                               : flood_effuse_step(a, peak, params);
                b = (m == Method::incremental) ? incremental_step(b, params)
                                               : flood_effuse_step(b, peak_up, params);
                REQUIRE(bitwise_equal(a.w, b.w));
            }
            for (int y = 0; y < 10; ++y)
                for (int x = 0; x < 10; ++x)
                    REQUIRE(h_up.at(x, y) + b.w.at(x, y) == (h.at(x, y) + a.w.at(x, y)) + 50.0);
        }
    }
}

TEST_CASE("divergence guard throws instead of running away") {
    ScalarField h(8, 8, 200.0);
    DiffusionParams params(0.25, 0.01, 100, 150.0);
    CHECK_THROWS_AS(incremental_step({h, ScalarField(8, 8, 0.0), 0}, params), Diverged);
    CHECK_THROWS_AS(run_to_convergence(h, Method::flood_effuse, params), Diverged);
}

TEST_CASE("initial water is sanitized before the first step") {
    ScalarField h(8, 8, 100.0);
    ScalarField w0(8, 8, 0.0);
    w0.at(2, 2) = -3.0; // must clamp to dry
    w0.at(0, 0) = 7.0;  // border must be drained
    DiffusionParams params;

    std::vector<std::pair<int, ScalarField>> snaps;
    SnapshotHook hook;
    hook.every = 1;
    hook.fn = [&snaps](int i, const ScalarField& g) { snaps.emplace_back(i, g); };

    auto [g, report] = run_to_convergence(h, Method::incremental, params, &w0, &hook);
    REQUIRE(!snaps.empty());
    CHECK(snaps.front().first == 0);
    CHECK(snaps.front().second.at(2, 2) == 100.0); // negative water removed
    CHECK(snaps.front().second.at(0, 0) == 100.0); // border water removed
    CHECK(report.converged);
    CHECK(bitwise_equal(snaps.back().second, g));
}

TEST_CASE("snapshot cadence and final surface") {
    ScalarField h(3, 3, 100.0);
    h.at(1, 1) = 96.0;
    DiffusionParams params;
    std::vector<int> seen;
    SnapshotHook hook;
    hook.every = 1;
    hook.fn = [&seen](int i, const ScalarField&) { seen.push_back(i); };
    auto [g, report] = run_to_convergence(h, Method::incremental, params, nullptr, &hook);
    CHECK(seen == std::vector<int>{0, 1, 2});
    CHECK(report.iterations == 2);
}

TEST_CASE("terrain and water plane validation") {
    DiffusionParams params;
    CHECK_THROWS_AS(run_to_convergence(ScalarField(2, 2, 0.0), Method::incremental, params),
                    std::invalid_argument);

    ScalarField h(8, 8, 100.0);
    ScalarField wrong_size(5, 5, 0.0);
    CHECK_THROWS_AS(run_to_convergence(h, Method::incremental, params, &wrong_size),
                    DimensionMismatch);

    ScalarField bad(8, 8, 0.0);
    bad.at(3, 3) = std::nan("");
    CHECK_THROWS_AS(run_to_convergence(bad, Method::incremental, params), std::invalid_argument);

    CHECK_THROWS_AS(ScalarField(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(ScalarField(4, -1), std::invalid_argument);
}

TEST_CASE("interior basin keeps its water under flood and effuse") {
    // A 9x9 bowl: rim 200, a 3x3 interior basin at 150 that nowhere touches
    // the border. Flooding fills it; effusion cannot drain it because every
    // escape route runs uphill. The converged surface over the basin should
    // sit at the basin rim, not at the basin floor.
    ScalarField h(9, 9, 200.0);
    for (int y = 3; y <= 5; ++y)
        for (int x = 3; x <= 5; ++x)
            h.at(x, y) = 150.0;
    DiffusionParams params(0.25, 0.001, 2000);
    auto [g, report] = run_to_convergence(h, Method::flood_effuse, params);
    CHECK(report.converged);
    CHECK(g.at(4, 4) > 199.0);
}

TEST_CASE("boundary-touching basin drains under flood and effuse") {
    // Same bowl, but the depression now runs out through the border: a full
    // dark column. Water poured into it escapes through the edge, so the
    // converged surface inside the channel returns to the terrain itself.
    ScalarField h(9, 9, 200.0);
    for (int y = 0; y < 9; ++y)
        h.at(4, y) = 150.0;
    DiffusionParams params(0.25, 0.001, 2000);
    auto [g, report] = run_to_convergence(h, Method::flood_effuse, params);
    CHECK(report.converged);
    CHECK(g.at(4, 4) < 151.0);
}
