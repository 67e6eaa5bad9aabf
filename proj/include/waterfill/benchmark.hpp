#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "waterfill/pipeline.hpp"
#include "waterfill/synthetic.hpp"

namespace waterfill {

struct BenchmarkRow {
    std::string spec_id;
    double psnr_in_db = 0.0;
    double psnr_out_db = 0.0;
    int coarse_iters = 0;
    int fine_iters = 0;
    std::int64_t elapsed_ms = 0;
    bool ok = false;
    std::string error; // populated when ok is false
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows; // one per spec, in spec order
    double mean_psnr_in_db = 0.0;
    double mean_psnr_out_db = 0.0;
    double mean_elapsed_ms = 0.0;
};

/// Ground truth rescaled the way the corrected output reproduces it:
/// brightness * 255 / background_level per channel (plain brightness
/// scaling when the page background is 255). Keeps PSNR blind to the
/// fixed output brightness.
RgbImage scale_ground_truth(const RgbImage& gt, double brightness, double background_level);

/// Renders each spec, corrects the distorted copy, and scores input and
/// output against the rescaled ground truth. Rows may run on `jobs`
/// worker threads (row order stays spec order); keep jobs at 1 when the
/// timings matter.
BenchmarkReport run_benchmark(const std::vector<SyntheticSpec>& specs,
                              const PipelineConfig& config, int jobs = 1);

/// One JSON object per row, in row order.
void write_report_jsonl(const BenchmarkReport& report, const std::filesystem::path& path);

/// CSV with header spec_id,psnr_in_db,psnr_out_db,coarse_iters,fine_iters,elapsed_ms.
void write_report_csv(const BenchmarkReport& report, const std::filesystem::path& path);

} // namespace waterfill
