#include "waterfill/pipeline.hpp"

#include <chrono>
#include <stdexcept>
#include <string>
#include <utility>

#include "waterfill/errors.hpp"

namespace waterfill {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

void validate_config(const PipelineConfig& config) {
    if (!(config.brightness >= 0.0 && config.brightness <= 1.0))
        throw std::invalid_argument("brightness must lie in [0, 1]");
    if (!(config.g_floor > 0.0))
        throw std::invalid_argument("divisor floor must be positive");
    validate_params(config.coarse_params);
    validate_params(config.fine_params);
}

struct BackgroundEstimate {
    ScalarField g;
    RunMetrics metrics;
};

// Runs one stage and rebrands any divergence with the stage name so a
// failing batch log says which half of the pipeline gave up.
std::pair<ScalarField, ConvergenceReport> run_stage(
    const char* stage, const ScalarField& h, Method method, const DiffusionParams& params,
    const ScalarField* w_init, const SnapshotHook* hook) {
    try {
        return run_to_convergence(h, method, params, w_init, hook);
    } catch (const Diverged& e) {
        throw Diverged(std::string(stage) + " stage diverged: " + e.what());
    }
}

BackgroundEstimate estimate_impl(const ScalarField& luma, const PipelineConfig& config,
                                 const SnapshotHook* hook) {
    BackgroundEstimate est;
    switch (config.method) {
    case CorrectionMethod::combined: {
        // Rough sketch: shrink, let the flood drain the border-connected
        // shading basins, then blow the coarse surface back up.
        ScalarField coarse_h = downsample(luma, config.ks);
        const auto t_coarse = Clock::now();
        auto [g_bar, coarse_rep] =
            run_stage("coarse", coarse_h, Method::flood_effuse, config.coarse_params, nullptr, nullptr);
        est.metrics.coarse_ms = ms_since(t_coarse);
        est.metrics.coarse_iterations = coarse_rep.iterations;
        est.metrics.coarse_converged = coarse_rep.converged;

        ScalarField g0 = upscale_bicubic(g_bar, luma.width(), luma.height());

        // Refinement keeps the full-resolution terrain and starts from the
        // water implied by the sketch; interpolation undershoot simply
        // clamps to dry.
        ScalarField w0(luma.width(), luma.height(), 0.0);
        {
            const double* gp = g0.values().data();
            const double* yp = luma.values().data();
            double* wp = w0.values().data();
            for (std::size_t i = 0; i < w0.size(); ++i) {
                const double diff = gp[i] - yp[i];
                wp[i] = diff > 0.0 ? diff : 0.0;
            }
        }
        const auto t_fine = Clock::now();
        auto [g_fin, fine_rep] =
            run_stage("fine", luma, Method::incremental, config.fine_params, &w0, hook);
        est.metrics.fine_ms = ms_since(t_fine);
        est.metrics.fine_iterations = fine_rep.iterations;
        est.metrics.fine_converged = fine_rep.converged;
        est.g = std::move(g_fin);
        break;
    }
    case CorrectionMethod::incremental_only: {
        const auto t_fine = Clock::now();
        auto [g_fin, rep] =
            run_stage("fine", luma, Method::incremental, config.fine_params, nullptr, hook);
        est.metrics.fine_ms = ms_since(t_fine);
        est.metrics.fine_iterations = rep.iterations;
        est.metrics.fine_converged = rep.converged;
        est.g = std::move(g_fin);
        break;
    }
    case CorrectionMethod::flood_only: {
        const auto t_fine = Clock::now();
        auto [g_fin, rep] =
            run_stage("fine", luma, Method::flood_effuse, config.coarse_params, nullptr, hook);
        est.metrics.fine_ms = ms_since(t_fine);
        est.metrics.fine_iterations = rep.iterations;
        est.metrics.fine_converged = rep.converged;
        est.g = std::move(g_fin);
        break;
    }
    }
    return est;
}

} // namespace

ScalarField lambertian_correct(const ScalarField& y, const ScalarField& g,
                               double brightness, double g_floor) {
    if (!y.same_size(g))
        throw DimensionMismatch("luma and background planes differ in size");
    if (!(brightness >= 0.0 && brightness <= 1.0))
        throw std::invalid_argument("brightness must lie in [0, 1]");
    if (!(g_floor > 0.0))
        throw std::invalid_argument("divisor floor must be positive");
    ScalarField out(y.width(), y.height(), 0.0);
    const double* yp = y.values().data();
    const double* gp = g.values().data();
    double* op = out.values().data();
    const double scale = brightness * 255.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double divisor = gp[i] > g_floor ? gp[i] : g_floor;
        double v = scale * yp[i] / divisor;
        if (v < 0.0) v = 0.0;
        if (v > 255.0) v = 255.0;
        op[i] = v;
    }
    return out;
}

CorrectionResult correct_document(const RgbImage& image, const PipelineConfig& config,
                                  const SnapshotHook* hook) {
    validate_config(config);
    const auto t_total = Clock::now();
    YCbCrImage ycc = rgb_to_ycbcr(image);
    BackgroundEstimate est = estimate_impl(ycc.y, config, hook);
    ScalarField y_corr = lambertian_correct(ycc.y, est.g, config.brightness, config.g_floor);
    CorrectionResult result;
    result.corrected = ycbcr_to_rgb(YCbCrImage{std::move(y_corr), std::move(ycc.cb), std::move(ycc.cr)});
    result.background = std::move(est.g);
    result.metrics = est.metrics;
    result.metrics.total_ms = ms_since(t_total);
    return result;
}

ScalarField estimate_background(const RgbImage& image, const PipelineConfig& config) {
    validate_config(config);
    YCbCrImage ycc = rgb_to_ycbcr(image);
    return estimate_impl(ycc.y, config, nullptr).g;
}

} // namespace waterfill
