#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "waterfill/benchmark.hpp"
#include "waterfill/errors.hpp"
#include "waterfill/image_io.hpp"
#include "waterfill/metrics.hpp"
#include "waterfill/pipeline.hpp"
#include "waterfill/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes: 0 ok, 2 bad arguments, 3 image/file trouble, 4 divergence,
// 5 benchmark row failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitImage = 3;
constexpr int kExitDiverged = 4;
constexpr int kExitBenchRow = 5;

struct CommonOptions {
    int ks = 5;
    double eta = 0.25;
    double delta = 0.01;
    double brightness = 0.85;
    int coarse_iters = 1000;
    int fine_iters = 3000;
    double divergence_limit = 1e6;
    std::string method = "combined";
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--ks", opt.ks, "coarse sampling rate (combined method)")
        ->capture_default_str();
    cmd->add_option("--eta", opt.eta, "diffusion rate, stable in (0, 0.25]")
        ->capture_default_str();
    cmd->add_option("--delta", opt.delta, "convergence threshold on the surface update")
        ->capture_default_str();
    cmd->add_option("--brightness", opt.brightness, "output brightness scale in [0, 1]")
        ->capture_default_str();
    cmd->add_option("--max-iters-coarse", opt.coarse_iters, "iteration cap for the coarse stage")
        ->capture_default_str();
    cmd->add_option("--max-iters-fine", opt.fine_iters, "iteration cap for the fine stage")
        ->capture_default_str();
    cmd->add_option("--method", opt.method, "combined | incremental | flood")
        ->check(CLI::IsMember({"combined", "incremental", "flood"}))
        ->capture_default_str();
    cmd->add_option("--divergence-limit", opt.divergence_limit,
                    "abort when the surface magnitude crosses this guard")
        ->capture_default_str();
}

// Flag validation happens here, before any file is touched.
waterfill::PipelineConfig make_config(const CommonOptions& opt) {
    using namespace waterfill;
    PipelineConfig cfg;
    cfg.ks = SamplingRate(opt.ks);
    cfg.brightness = opt.brightness;
    if (!(cfg.brightness >= 0.0 && cfg.brightness <= 1.0))
        throw std::invalid_argument("brightness must lie in [0, 1]");
    cfg.coarse_params = DiffusionParams(opt.eta, opt.delta, opt.coarse_iters, opt.divergence_limit);
    cfg.fine_params = DiffusionParams(opt.eta, opt.delta, opt.fine_iters, opt.divergence_limit);
    if (opt.method == "combined")
        cfg.method = CorrectionMethod::combined;
    else if (opt.method == "incremental")
        cfg.method = CorrectionMethod::incremental_only;
    else
        cfg.method = CorrectionMethod::flood_only;
    return cfg;
}

json metrics_to_json(const std::string& input, const std::string& output,
                     const waterfill::RunMetrics& m) {
    return json{
        {"input", input},
        {"output", output},
        {"coarse_iterations", m.coarse_iterations},
        {"fine_iterations", m.fine_iterations},
        {"elapsed_ms", {{"coarse", m.coarse_ms}, {"fine", m.fine_ms}, {"total", m.total_ms}}},
        {"converged", {{"coarse", m.coarse_converged}, {"fine", m.fine_converged}}},
    };
}

int classify(const std::exception& e) {
    if (dynamic_cast<const waterfill::Diverged*>(&e)) return kExitDiverged;
    if (dynamic_cast<const waterfill::FileNotFound*>(&e) ||
        dynamic_cast<const waterfill::UnsupportedFormat*>(&e) ||
        dynamic_cast<const waterfill::ImageTooSmall*>(&e) ||
        dynamic_cast<const waterfill::IoError*>(&e) ||
        dynamic_cast<const waterfill::DimensionMismatch*>(&e))
        return kExitImage;
    return kExitUsage; // UnstableRate, RateTooLarge, InvalidSpec, bad values
}

// ---------------------------------------------------------------- correct

struct CorrectArgs {
    std::vector<std::string> inputs;
    std::string output;
    std::string output_dir;
    std::string dump_background;
    std::string json_path;
    int snapshot_every = 0;
    int jobs = 0;
    CommonOptions common;
};

fs::path derive_output(const fs::path& input, const fs::path& dir) {
    fs::path name = input.stem();
    name += "_corrected.png";
    return dir / name;
}

int run_correct(const CorrectArgs& args) {
    using namespace waterfill;
    const PipelineConfig cfg = make_config(args.common);
    const bool batch = args.inputs.size() > 1;
    if (batch && !args.output.empty()) {
        std::cerr << "error: -o/--output applies to a single input; use --output-dir for batches\n";
        return kExitUsage;
    }
    if (batch && (!args.dump_background.empty() || args.snapshot_every > 0)) {
        std::cerr << "error: --dump-background and --snapshot-every need a single input\n";
        return kExitUsage;
    }
    if (args.snapshot_every < 0) {
        std::cerr << "error: --snapshot-every must be positive\n";
        return kExitUsage;
    }

    struct Item {
        fs::path input;
        fs::path output;
        RunMetrics metrics;
        int status = kExitOk;
        std::string error;
    };
    std::vector<Item> items;
    for (const std::string& in : args.inputs) {
        Item item;
        item.input = in;
        if (!args.output.empty())
            item.output = args.output;
        else
            item.output = derive_output(in, args.output_dir.empty() ? fs::path(".")
                                                                    : fs::path(args.output_dir));
        items.push_back(std::move(item));
    }
    if (!args.output_dir.empty())
        fs::create_directories(args.output_dir);

    std::mutex log_mutex;
    std::atomic<std::size_t> cursor{0};
    auto process = [&](Item& item, std::size_t index) {
        try {
            const RgbImage input = load_image(item.input);
            SnapshotHook hook;
            const SnapshotHook* hook_ptr = nullptr;
            if (args.snapshot_every > 0) {
                fs::path stem = item.output;
                stem.replace_extension();
                hook.every = args.snapshot_every;
                hook.fn = [&stem](int iteration, const ScalarField& g) {
                    std::ostringstream name;
                    name << stem.string() << "_g_t" << iteration << ".png";
                    save_grayscale(g, name.str());
                };
                hook_ptr = &hook;
            }
            CorrectionResult result = correct_document(input, cfg, hook_ptr);
            save_image(result.corrected, item.output);
            if (!args.dump_background.empty())
                save_grayscale(result.background, args.dump_background);
            item.metrics = result.metrics;
            std::lock_guard<std::mutex> lock(log_mutex);
            std::cerr << "[" << (index + 1) << "/" << items.size() << "] " << item.input.string()
                      << " -> " << item.output.string() << "  coarse=" << item.metrics.coarse_iterations
                      << "it fine=" << item.metrics.fine_iterations << "it "
                      << item.metrics.total_ms << "ms\n";
        } catch (const std::exception& e) {
            item.status = classify(e);
            item.error = e.what();
            std::lock_guard<std::mutex> lock(log_mutex);
            std::cerr << "[" << (index + 1) << "/" << items.size() << "] " << item.input.string()
                      << " FAILED: " << e.what() << "\n";
        }
    };

    int jobs = args.jobs;
    if (jobs <= 0)
        jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1)
        jobs = 1;
    if (jobs == 1 || items.size() == 1) {
        for (std::size_t i = 0; i < items.size(); ++i)
            process(items[i], i);
    } else {
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= items.size())
                    return;
                process(items[i], i);
            }
        };
        std::vector<std::thread> pool;
        const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(jobs), items.size());
        for (std::size_t i = 0; i < count; ++i)
            pool.emplace_back(worker);
        for (std::thread& t : pool)
            t.join();
    }

    if (!args.json_path.empty()) {
        std::ofstream out(args.json_path);
        if (!out) {
            std::cerr << "error: cannot write " << args.json_path << "\n";
            return kExitImage;
        }
        if (items.size() == 1) {
            out << metrics_to_json(items[0].input.string(), items[0].output.string(),
                                   items[0].metrics).dump(2)
                << "\n";
        } else {
            for (const Item& item : items)
                out << metrics_to_json(item.input.string(), item.output.string(), item.metrics).dump()
                    << "\n";
        }
    }

    for (const Item& item : items)
        if (item.status != kExitOk)
            return item.status;
    return kExitOk;
}

// ------------------------------------------------------------- background

int run_background(const std::string& input, const std::string& output, const CommonOptions& common) {
    using namespace waterfill;
    const PipelineConfig cfg = make_config(common);
    const RgbImage image = load_image(input);
    const ScalarField g = estimate_background(image, cfg);
    save_grayscale(g, output);
    return kExitOk;
}

// ------------------------------------------------------------------- psnr

int run_psnr(const std::string& a_path, const std::string& b_path) {
    using namespace waterfill;
    const RgbImage a = load_image(a_path);
    const RgbImage b = load_image(b_path);
    const PsnrResult r = psnr(a, b);
    if (std::isinf(r.psnr_db)) {
        std::cout << "inf\n";
    } else {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f\n", r.psnr_db);
        std::cout << buf;
    }
    return kExitOk;
}

// ------------------------------------------------------------------ bench

waterfill::SyntheticSpec spec_from_json(const json& j) {
    using namespace waterfill;
    SyntheticSpec spec;
    spec.id = j.value("id", spec.id);
    spec.width = j.value("width", spec.width);
    spec.height = j.value("height", spec.height);
    spec.background_level = j.value("background_level", spec.background_level);
    spec.seed = j.value("seed", spec.seed);
    if (j.contains("shading")) {
        const json& s = j.at("shading");
        const std::string kind = s.value("kind", "linear_ramp");
        if (kind == "linear_ramp")
            spec.shading.kind = ShadingKind::linear_ramp;
        else if (kind == "corner_shadow")
            spec.shading.kind = ShadingKind::corner_shadow;
        else if (kind == "spine_gradient")
            spec.shading.kind = ShadingKind::spine_gradient;
        else
            throw InvalidSpec("unknown shading kind: " + kind);
        spec.shading.min_factor = s.value("min_factor", spec.shading.min_factor);
        spec.shading.radius_fraction = s.value("radius_fraction", spec.shading.radius_fraction);
        const std::string dir = s.value("direction", "left_to_right");
        if (dir == "left_to_right") spec.shading.direction = RampDirection::left_to_right;
        else if (dir == "right_to_left") spec.shading.direction = RampDirection::right_to_left;
        else if (dir == "top_to_bottom") spec.shading.direction = RampDirection::top_to_bottom;
        else if (dir == "bottom_to_top") spec.shading.direction = RampDirection::bottom_to_top;
        else throw InvalidSpec("unknown ramp direction: " + dir);
        const std::string corner = s.value("corner", "top_left");
        if (corner == "top_left") spec.shading.corner = Corner::top_left;
        else if (corner == "top_right") spec.shading.corner = Corner::top_right;
        else if (corner == "bottom_left") spec.shading.corner = Corner::bottom_left;
        else if (corner == "bottom_right") spec.shading.corner = Corner::bottom_right;
        else throw InvalidSpec("unknown corner: " + corner);
        const std::string axis = s.value("axis", "vertical");
        if (axis == "vertical") spec.shading.axis = Axis::vertical;
        else if (axis == "horizontal") spec.shading.axis = Axis::horizontal;
        else throw InvalidSpec("unknown axis: " + axis);
    }
    if (j.contains("glyph_boxes")) {
        for (const json& b : j.at("glyph_boxes")) {
            GlyphBox box;
            box.x = b.at("x").get<int>();
            box.y = b.at("y").get<int>();
            box.width = b.at("width").get<int>();
            box.height = b.at("height").get<int>();
            box.level = b.value("level", box.level);
            spec.glyph_boxes.push_back(box);
        }
    }
    return spec;
}

struct BenchArgs {
    std::string specs_path;
    bool use_default_corpus = false;
    std::string csv_path = "bench.csv";
    std::string jsonl_path = "bench.jsonl";
    std::string ks_sweep;
    int jobs = 1;
    CommonOptions common;
};

int run_bench(const BenchArgs& args) {
    using namespace waterfill;
    PipelineConfig cfg = make_config(args.common);

    std::vector<SyntheticSpec> specs;
    if (args.use_default_corpus) {
        specs = default_corpus();
    } else if (!args.specs_path.empty()) {
        std::ifstream in(args.specs_path);
        if (!in) {
            std::cerr << "error: cannot read " << args.specs_path << "\n";
            return kExitImage;
        }
        json doc = json::parse(in);
        if (!doc.is_array()) {
            std::cerr << "error: spec file must hold a JSON array\n";
            return kExitUsage;
        }
        for (const json& j : doc)
            specs.push_back(spec_from_json(j));
    }
    if (specs.empty()) {
        std::cerr << "error: no specs to run (pass a spec file or --default-corpus)\n";
        return kExitUsage;
    }

    std::vector<int> ks_values;
    if (!args.ks_sweep.empty()) {
        std::stringstream ss(args.ks_sweep);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty())
                ks_values.push_back(std::stoi(tok));
        if (ks_values.empty()) {
            std::cerr << "error: --ks-sweep lists no rates\n";
            return kExitUsage;
        }
    }

    bool any_failed = false;
    if (ks_values.empty()) {
        const BenchmarkReport report = run_benchmark(specs, cfg, args.jobs);
        write_report_jsonl(report, args.jsonl_path);
        write_report_csv(report, args.csv_path);
        for (const BenchmarkRow& row : report.rows) {
            if (!row.ok) {
                any_failed = true;
                std::cerr << "row " << row.spec_id << " failed: " << row.error << "\n";
            }
        }
        std::printf("%zu rows  mean input %.2f dB  mean output %.2f dB  mean %.0f ms\n",
                    report.rows.size(), report.mean_psnr_in_db, report.mean_psnr_out_db,
                    report.mean_elapsed_ms);
    } else {
        // Sweep mode: per-row lines go to the JSONL file, the CSV holds one
        // aggregate row per rate.
        std::ofstream jsonl(args.jsonl_path);
        std::ofstream csv(args.csv_path);
        if (!jsonl || !csv) {
            std::cerr << "error: cannot write report files\n";
            return kExitImage;
        }
        csv << "spec_id,psnr_in_db,psnr_out_db,coarse_iters,fine_iters,elapsed_ms\n";
        csv << std::fixed;
        csv.precision(6);
        for (int ks : ks_values) {
            PipelineConfig swept = cfg;
            swept.ks = SamplingRate(ks);
            const BenchmarkReport report = run_benchmark(specs, swept, args.jobs);
            double coarse_mean = 0.0, fine_mean = 0.0;
            std::size_t ok_rows = 0;
            for (const BenchmarkRow& row : report.rows) {
                if (!row.ok) {
                    any_failed = true;
                    std::cerr << "row " << row.spec_id << " (ks=" << ks << ") failed: "
                              << row.error << "\n";
                    continue;
                }
                ++ok_rows;
                coarse_mean += row.coarse_iters;
                fine_mean += row.fine_iters;
                json j{{"spec_id", row.spec_id}, {"ks", ks},
                       {"psnr_in_db", row.psnr_in_db}, {"psnr_out_db", row.psnr_out_db},
                       {"coarse_iters", row.coarse_iters}, {"fine_iters", row.fine_iters},
                       {"elapsed_ms", row.elapsed_ms}, {"ok", row.ok}};
                jsonl << j.dump() << "\n";
            }
            if (ok_rows > 0) {
                coarse_mean /= static_cast<double>(ok_rows);
                fine_mean /= static_cast<double>(ok_rows);
            }
            csv << "ks=" << ks << ',' << report.mean_psnr_in_db << ',' << report.mean_psnr_out_db
                << ',' << static_cast<int>(coarse_mean + 0.5) << ','
                << static_cast<int>(fine_mean + 0.5) << ',' << report.mean_elapsed_ms << "\n";
            std::printf("ks=%-3d mean input %.2f dB  mean output %.2f dB  mean %.0f ms\n", ks,
                        report.mean_psnr_in_db, report.mean_psnr_out_db, report.mean_elapsed_ms);
        }
    }
    return any_failed ? kExitBenchRow : kExitOk;
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
    std::string spec_path;
    std::string gt_path;
    std::string distorted_path;
    int width = 512;
    int height = 384;
    double background = 255.0;
    double min_factor = 0.5;
    double radius_fraction = 0.6;
    std::string shading = "linear_ramp";
    std::string direction = "left_to_right";
    std::string corner = "top_left";
    std::string axis = "vertical";
    std::uint64_t seed = 1;
    std::string id = "synthetic";
};

int run_synth(const SynthArgs& args) {
    using namespace waterfill;
    SyntheticSpec spec;
    if (!args.spec_path.empty()) {
        std::ifstream in(args.spec_path);
        if (!in) {
            std::cerr << "error: cannot read " << args.spec_path << "\n";
            return kExitImage;
        }
        spec = spec_from_json(json::parse(in));
    } else {
        json j{
            {"id", args.id},
            {"width", args.width},
            {"height", args.height},
            {"background_level", args.background},
            {"seed", args.seed},
            {"shading",
             {{"kind", args.shading}, {"min_factor", args.min_factor},
              {"direction", args.direction}, {"corner", args.corner},
              {"radius_fraction", args.radius_fraction}, {"axis", args.axis}}},
        };
        spec = spec_from_json(j);
    }
    const SyntheticPair pair = generate_synthetic(spec);
    save_image(pair.ground_truth, args.gt_path);
    save_image(pair.distorted, args.distorted_path);
    std::cerr << "wrote " << args.gt_path << " and " << args.distorted_path << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Document illumination correction by water-filling background estimation"};
    app.require_subcommand(1);

    CorrectArgs correct_args;
    CLI::App* correct = app.add_subcommand("correct", "correct one or more document photos");
    correct->add_option("inputs", correct_args.inputs, "input images (PNG or JPEG)")->required();
    correct->add_option("-o,--output", correct_args.output, "output path (single input)");
    correct->add_option("--output-dir", correct_args.output_dir,
                        "directory for derived output names");
    correct->add_option("--dump-background", correct_args.dump_background,
                        "write the estimated background as a grayscale PNG");
    correct->add_option("--json", correct_args.json_path, "write run metrics as JSON");
    correct->add_option("--snapshot-every", correct_args.snapshot_every,
                        "dump the surface G every N fine iterations");
    correct->add_option("--jobs", correct_args.jobs,
                        "worker threads for batches (default: logical cores)");
    add_common_flags(correct, correct_args.common);

    std::string bg_input, bg_output;
    CommonOptions bg_common;
    CLI::App* background = app.add_subcommand("background", "estimate the shading surface only");
    background->add_option("input", bg_input, "input image")->required();
    background->add_option("-o,--output", bg_output, "grayscale PNG for the surface")->required();
    add_common_flags(background, bg_common);

    std::string psnr_a, psnr_b;
    CLI::App* psnr_cmd = app.add_subcommand("psnr", "peak signal-to-noise ratio of two images");
    psnr_cmd->add_option("image_a", psnr_a)->required();
    psnr_cmd->add_option("image_b", psnr_b)->required();

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "score the corrector on synthetic documents");
    bench->add_option("specs", bench_args.specs_path, "JSON array of synthetic specs");
    bench->add_flag("--default-corpus", bench_args.use_default_corpus,
                    "use the built-in 20-page corpus");
    bench->add_option("--csv", bench_args.csv_path, "CSV report path")->capture_default_str();
    bench->add_option("--jsonl", bench_args.jsonl_path, "JSONL report path")->capture_default_str();
    bench->add_option("--ks-sweep", bench_args.ks_sweep,
                      "comma-separated rates; aggregates one CSV row per rate");
    bench->add_option("--jobs", bench_args.jobs, "worker threads (keep 1 when timing)")
        ->capture_default_str();
    add_common_flags(bench, bench_args.common);

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "render a synthetic ground-truth/distorted pair");
    synth->add_option("--spec", synth_args.spec_path, "JSON spec file (overrides flags)");
    synth->add_option("--gt", synth_args.gt_path, "ground-truth PNG path")->required();
    synth->add_option("--distorted", synth_args.distorted_path, "distorted PNG path")->required();
    synth->add_option("--width", synth_args.width)->capture_default_str();
    synth->add_option("--height", synth_args.height)->capture_default_str();
    synth->add_option("--background", synth_args.background)->capture_default_str();
    synth->add_option("--min-factor", synth_args.min_factor)->capture_default_str();
    synth->add_option("--radius-fraction", synth_args.radius_fraction)->capture_default_str();
    synth->add_option("--shading", synth_args.shading, "linear_ramp | corner_shadow | spine_gradient")
        ->check(CLI::IsMember({"linear_ramp", "corner_shadow", "spine_gradient"}))
        ->capture_default_str();
    synth->add_option("--direction", synth_args.direction,
                      "left_to_right | right_to_left | top_to_bottom | bottom_to_top")
        ->capture_default_str();
    synth->add_option("--corner", synth_args.corner,
                      "top_left | top_right | bottom_left | bottom_right")
        ->capture_default_str();
    synth->add_option("--axis", synth_args.axis, "vertical | horizontal")->capture_default_str();
    synth->add_option("--seed", synth_args.seed)->capture_default_str();
    synth->add_option("--id", synth_args.id)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (correct->parsed())
            return run_correct(correct_args);
        if (background->parsed())
            return run_background(bg_input, bg_output, bg_common);
        if (psnr_cmd->parsed())
            return run_psnr(psnr_a, psnr_b);
        if (bench->parsed())
            return run_bench(bench_args);
        if (synth->parsed())
            return run_synth(synth_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify(e);
    }
    return kExitUsage;
}
