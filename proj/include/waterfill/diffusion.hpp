#pragma once

#include <functional>
#include <utility>

#include "waterfill/scalar_field.hpp"

namespace waterfill {

// Background estimation by water simulation. The inverted luminance plane
// is treated as terrain: dark content forms pits, shading forms basins that
// reach the image border. Water w(x) >= 0 accumulates on the terrain
// h(x); the derived surface G = h + w is the background estimate. Two
// update schemes are provided:
//
//   incremental   adds water where the surface is locally concave
//                 (a Jacobi step on the 4-neighbor Laplacian of G),
//                 filling interior pits such as text strokes;
//
//   flood_effuse  pours water everywhere in proportion to the gap below
//                 the global peak, with an exponentially decaying pour
//                 rate, while letting water escape downhill; basins
//                 connected to the border drain, interior ones stay full.
//
// Both schemes enforce w >= 0 everywhere and w = 0 on the one-pixel
// border ring after every update, and both read exclusively from the
// previous iteration (double buffered), so results are independent of
// pixel visiting order.

enum class Method {
    incremental,
    flood_effuse,
};

/// Validates the diffusion rate. The 4-neighbor explicit scheme is stable
/// only for rates in (0, 0.25]; anything else throws UnstableRate.
double validate_eta(double eta);

struct DiffusionParams {
    double eta = 0.25;             // diffusion rate, (0, 0.25]
    double delta = 0.01;           // convergence threshold on max |G(t) - G(t-1)|
    int max_iters = 3000;          // iteration cap
    double divergence_limit = 1e6; // |G| guard; exceeding it throws Diverged

    DiffusionParams() = default;
    DiffusionParams(double eta, double delta, int max_iters, double divergence_limit = 1e6);

    static DiffusionParams incremental_defaults() { return DiffusionParams(0.25, 0.01, 3000); }
    static DiffusionParams flood_defaults() { return DiffusionParams(0.25, 0.01, 1000); }
};

/// Throws UnstableRate / std::invalid_argument if any member is unusable.
void validate_params(const DiffusionParams& params);

/// One water simulation state: immutable terrain, current water, and the
/// iteration counter t (counts completed steps; the flood pour rate decays
/// as exp(-t), so the first step pours at full strength).
struct WaterState {
    ScalarField h;
    ScalarField w;
    int t = 0;
};

struct ConvergenceReport {
    bool converged = false;
    int iterations = 0;
    double max_update = 0.0; // largest per-pixel |G change| at the final step
};

/// Observer invoked with the current surface G every `every` completed
/// iterations (and once with the initial surface at iteration 0).
struct SnapshotHook {
    int every = 0;
    std::function<void(int iteration, const ScalarField& g)> fn;
};

/// Highest terrain altitude; the flood level the pour term aims for.
double peak_altitude(const ScalarField& h);

/// One incremental-filling step. Reads only state.t's fields, returns the
/// t+1 state. Throws Diverged if |G| leaves [-limit, limit].
WaterState incremental_step(const WaterState& state, const DiffusionParams& params);

/// One flood-and-effuse step against the given peak altitude.
WaterState flood_effuse_step(const WaterState& state, double h_peak, const DiffusionParams& params);

/// Iterates the chosen stepper from w = w_init (zero if null; negative
/// entries and the border ring are clamped) until the largest per-pixel
/// change of G drops below params.delta or max_iters is reached. Returns
/// the final surface G = h + w and a convergence report.
std::pair<ScalarField, ConvergenceReport> run_to_convergence(
    const ScalarField& h,
    Method method,
    const DiffusionParams& params,
    const ScalarField* w_init = nullptr,
    const SnapshotHook* hook = nullptr);

} // namespace waterfill
