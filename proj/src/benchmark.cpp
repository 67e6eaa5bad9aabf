#include "waterfill/benchmark.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "waterfill/errors.hpp"
#include "waterfill/metrics.hpp"

namespace waterfill {

RgbImage scale_ground_truth(const RgbImage& gt, double brightness, double background_level) {
    if (!(background_level > 0.0))
        throw std::invalid_argument("background level must be positive");
    const double k = brightness * 255.0 / background_level;
    RgbImage out(gt.width(), gt.height());
    const std::uint8_t* src = gt.bytes().data();
    std::uint8_t* dst = out.bytes().data();
    for (std::size_t i = 0; i < gt.bytes().size(); ++i) {
        double v = std::floor(k * static_cast<double>(src[i]) + 0.5);
        if (v < 0.0) v = 0.0;
        if (v > 255.0) v = 255.0;
        dst[i] = static_cast<std::uint8_t>(v);
    }
    return out;
}

namespace {

BenchmarkRow run_one(const SyntheticSpec& spec, const PipelineConfig& config) {
    BenchmarkRow row;
    row.spec_id = spec.id;
    try {
        const SyntheticPair pair = generate_synthetic(spec);
        const RgbImage reference =
            scale_ground_truth(pair.ground_truth, config.brightness, spec.background_level);
        const CorrectionResult result = correct_document(pair.distorted, config);
        row.psnr_in_db = psnr(pair.distorted, reference).psnr_db;
        row.psnr_out_db = psnr(result.corrected, reference).psnr_db;
        row.coarse_iters = result.metrics.coarse_iterations;
        row.fine_iters = result.metrics.fine_iterations;
        row.elapsed_ms = result.metrics.total_ms;
        row.ok = true;
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    return row;
}

} // namespace

BenchmarkReport run_benchmark(const std::vector<SyntheticSpec>& specs,
                              const PipelineConfig& config, int jobs) {
    if (jobs < 1)
        jobs = 1;
    BenchmarkReport report;
    report.rows.resize(specs.size());

    if (jobs == 1 || specs.size() <= 1) {
        for (std::size_t i = 0; i < specs.size(); ++i)
            report.rows[i] = run_one(specs[i], config);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= specs.size())
                    return;
                report.rows[i] = run_one(specs[i], config);
            }
        };
        std::vector<std::thread> pool;
        const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(jobs), specs.size());
        pool.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            pool.emplace_back(worker);
        for (std::thread& t : pool)
            t.join();
    }

    std::size_t ok = 0;
    for (const BenchmarkRow& row : report.rows) {
        if (!row.ok)
            continue;
        ++ok;
        report.mean_psnr_in_db += row.psnr_in_db;
        report.mean_psnr_out_db += row.psnr_out_db;
        report.mean_elapsed_ms += static_cast<double>(row.elapsed_ms);
    }
    if (ok > 0) {
        report.mean_psnr_in_db /= static_cast<double>(ok);
        report.mean_psnr_out_db /= static_cast<double>(ok);
        report.mean_elapsed_ms /= static_cast<double>(ok);
    }
    return report;
}

void write_report_jsonl(const BenchmarkReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    // Identical images give +infinity dB; JSON has no literal for that, so
    // such entries carry the string "inf" instead of a number.
    auto db = [](double v) {
        return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("inf");
    };
    for (const BenchmarkRow& row : report.rows) {
        nlohmann::json j{
            {"spec_id", row.spec_id},
            {"psnr_in_db", db(row.psnr_in_db)},
            {"psnr_out_db", db(row.psnr_out_db)},
            {"coarse_iters", row.coarse_iters},
            {"fine_iters", row.fine_iters},
            {"elapsed_ms", row.elapsed_ms},
            {"ok", row.ok},
        };
        if (!row.ok)
            j["error"] = row.error;
        out << j.dump() << '\n';
    }
    if (!out)
        throw IoError("failed while writing " + path.string());
}

void write_report_csv(const BenchmarkReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << "spec_id,psnr_in_db,psnr_out_db,coarse_iters,fine_iters,elapsed_ms\n";
    out.precision(6);
    out << std::fixed;
    for (const BenchmarkRow& row : report.rows) {
        out << row.spec_id << ',' << row.psnr_in_db << ',' << row.psnr_out_db << ','
            << row.coarse_iters << ',' << row.fine_iters << ',' << row.elapsed_ms << '\n';
    }
    if (!out)
        throw IoError("failed while writing " + path.string());
}

} // namespace waterfill
