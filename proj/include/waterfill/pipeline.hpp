#pragma once

#include <cstdint>

#include "waterfill/diffusion.hpp"
#include "waterfill/image.hpp"
#include "waterfill/resample.hpp"
#include "waterfill/scalar_field.hpp"

namespace waterfill {

enum class CorrectionMethod {
    combined,         // coarse flood-effuse sketch, then full-res incremental refinement
    incremental_only, // single full-resolution incremental run
    flood_only,       // single full-resolution flood-effuse run
};

struct PipelineConfig {
    SamplingRate ks{5};         // coarse grid rate for the combined method
    double brightness = 0.85;   // output luminance scale, [0, 1]
    double g_floor = 1.0;       // divisor floor guarding flat-black estimates
    CorrectionMethod method = CorrectionMethod::combined;
    DiffusionParams coarse_params = DiffusionParams::flood_defaults();
    DiffusionParams fine_params = DiffusionParams::incremental_defaults();
};

/// Stage accounting for one correction run. Single-method runs occupy the
/// fine_* slots (they are the full-resolution stage) and leave coarse_* at
/// zero iterations / converged.
struct RunMetrics {
    int coarse_iterations = 0;
    int fine_iterations = 0;
    std::int64_t coarse_ms = 0;
    std::int64_t fine_ms = 0;
    std::int64_t total_ms = 0;
    bool coarse_converged = true;
    bool fine_converged = true;
};

struct CorrectionResult {
    RgbImage corrected;
    ScalarField background; // final surface G at full resolution
    RunMetrics metrics;
};

/// Reflectance recovery: out = clamp(brightness * 255 * y / max(g, g_floor), 0, 255).
/// Returns a real-valued plane; quantization happens at RGB reassembly.
ScalarField lambertian_correct(const ScalarField& y, const ScalarField& g,
                               double brightness, double g_floor = 1.0);

/// Full correction: luma extraction, background estimation per the chosen
/// method, Lambertian division, chroma-preserving reassembly. The optional
/// hook observes the full-resolution stage's surface G.
CorrectionResult correct_document(const RgbImage& image, const PipelineConfig& config,
                                  const SnapshotHook* hook = nullptr);

/// Background surface only (no division, no reassembly).
ScalarField estimate_background(const RgbImage& image, const PipelineConfig& config);

} // namespace waterfill
