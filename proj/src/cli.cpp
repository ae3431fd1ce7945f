#include "jdd/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "jdd/cfa.hpp"
#include "jdd/dataset.hpp"
#include "jdd/image_io.hpp"
#include "jdd/metrics.hpp"
#include "jdd/report.hpp"
#include "jdd/training.hpp"

namespace jdd::cli {
namespace fs = std::filesystem;

namespace {

std::vector<fs::path> list_images(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ValidationError("not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && io::is_image_file(e.path())) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<metrics::NamedImage> read_dir(const fs::path& dir) {
    std::vector<metrics::NamedImage> out;
    for (const auto& p : list_images(dir)) out.push_back({p.filename().string(), io::read_rgb(p)});
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    io::write_file_atomic(path, text);
}

struct PrepareArgs {
    std::string src, out, pattern = "quad";
    int patch = 128;
    std::optional<double> sigma;
    double split = 0.0;
};

struct MosaicArgs {
    std::string pattern = "quad", in, out;
    double sigma = 0.0;
};

struct TrainArgs {
    std::string config, out, resume;
    std::optional<int64_t> max_steps;
};

struct EvalArgs {
    std::string pred, ref, checkpoint, manifest, out, charts, dataset = "eval";
    std::optional<double> sigma;
    bool quantize = false;
    int tile = 0, overlap = 16;
};

struct InferArgs {
    std::string checkpoint, out = "out";
    std::vector<std::string> inputs;
    int tile = 0, overlap = 16;
};

struct AblateArgs {
    std::string config, out;
    std::vector<int64_t> densities{1, 2, 3};
};

struct ReportArgs {
    std::string in, charts;
    int width = 640, height = 400;
};

int do_prepare(const PrepareArgs& a, std::uint64_t seed, std::ostream& out) {
    data::ExtractOptions opts;
    opts.patch_size = a.patch;
    opts.pattern = cfa::CfaPattern::parse(a.pattern);
    opts.seed = seed;
    opts.sigma = a.sigma;
    const auto manifest = data::extract_patches(a.src, opts);
    data::materialize(manifest, a.out);
    out << "wrote " << manifest.records.size() << " patches to " << a.out << "\n";
    if (a.split > 0.0) {
        const auto [train, val] = data::split(manifest, a.split, seed);
        data::write_manifest(fs::path(a.out) / "train.jsonl", train);
        data::write_manifest(fs::path(a.out) / "val.jsonl", val);
        out << "split: " << train.records.size() << " train / " << val.records.size() << " val patches\n";
    }
    return 0;
}

int do_mosaic(const MosaicArgs& a, std::uint64_t seed, std::ostream& out) {
    const auto pattern = cfa::CfaPattern::parse(a.pattern);
    const auto image = io::read_rgb(a.in);
    const auto m = cfa::add_noise(cfa::mosaic(image, pattern), {a.sigma, seed});
    io::write_mosaic(a.out, m);
    out << "wrote " << a.out << " (" << pattern.name() << ", sigma " << a.sigma << ")\n";
    return 0;
}

int do_train(const TrainArgs& a, std::optional<std::uint64_t> seed, std::ostream& out) {
    auto config = train::load_run_config(a.config);
    if (seed) config.train.seed = *seed;
    if (!a.out.empty()) config.out_dir = a.out;
    if (!a.resume.empty()) config.resume = a.resume;
    const auto result = train::train(config, a.max_steps);
    if (!result.reports.empty()) {
        out << "last step: " << nlohmann::json(result.reports.back()).dump() << "\n";
    }
    out << "checkpoint: " << result.checkpoint.string() << "\n";
    return 0;
}

int do_eval(const EvalArgs& a, std::ostream& out) {
    std::vector<metrics::NamedImage> preds;
    std::vector<metrics::NamedImage> refs;
    double sigma = a.sigma.value_or(0.0);
    if (!a.checkpoint.empty() || !a.manifest.empty()) {
        if (a.checkpoint.empty() || a.manifest.empty()) {
            throw ValidationError("--checkpoint and --manifest must be given together");
        }
        const fs::path manifest_path(a.manifest);
        const auto manifest = data::read_manifest(manifest_path);
        auto model = train::load_for_inference(a.checkpoint);
        const int tile = a.tile > 0 ? a.tile : model.patch_size;
        bool uniform = true;
        for (const auto& r : manifest.records) uniform = uniform && r.sigma == manifest.records.front().sigma;
        if (!a.sigma) sigma = (uniform && !manifest.records.empty()) ? manifest.records.front().sigma : -1.0;
        for (const auto& s : data::load_samples(manifest, manifest_path.parent_path())) {
            if (!model.pattern.empty() && s.mosaic.pattern.name() != model.pattern) {
                throw ValidationError("manifest pattern does not match the checkpoint's");
            }
            const std::string name = fs::path(s.record.clean_path).filename().string();
            preds.push_back({name, train::reconstruct(model.generator, s.mosaic, tile, a.overlap)});
            refs.push_back({name, s.clean});
        }
    } else {
        if (a.pred.empty() || a.ref.empty()) {
            throw ValidationError("give either --pred and --ref or --checkpoint and --manifest");
        }
        preds = read_dir(a.pred);
        refs = read_dir(a.ref);
    }
    metrics::EvalOptions opts;
    opts.quantize_8bit = a.quantize;
    const auto report = metrics::evaluate_dataset(preds, refs, opts);
    for (const auto& w : report.warnings) out << "warning: " << w << "\n";

    std::ostringstream jsonl;
    metrics::write_report_jsonl(jsonl, report, a.dataset, sigma);
    if (!a.out.empty()) write_text(a.out, jsonl.str());
    std::istringstream in(jsonl.str());
    const auto table = report::read_report(in);
    out << report::format_report(table);
    if (!a.charts.empty()) report::write_charts(table, a.charts);
    return 0;
}

int do_infer(const InferArgs& a, std::ostream& out) {
    std::vector<fs::path> inputs(a.inputs.begin(), a.inputs.end());
    const auto written = train::infer(a.checkpoint, inputs, a.out, {a.tile, a.overlap});
    for (const auto& p : written) out << p.string() << "\n";
    return 0;
}

int do_ablate(const AblateArgs& a, std::optional<std::uint64_t> seed, std::ostream& out) {
    auto config = train::load_run_config(a.config);
    if (seed) config.train.seed = *seed;
    const fs::path train_path(config.train_manifest);
    const auto train_samples = data::load_samples(data::read_manifest(train_path), train_path.parent_path());
    std::vector<data::Sample> val_samples;
    if (!config.val_manifest.empty()) {
        const fs::path val_path(config.val_manifest);
        val_samples = data::load_samples(data::read_manifest(val_path), val_path.parent_path());
    }
    const auto cells = train::ablation_matrix(train_samples, val_samples, config.network, config.train, a.densities);
    const auto table = train::format_ablation_table(cells);
    out << table;
    if (!a.out.empty()) write_text(a.out, table);
    return 0;
}

int do_report(const ReportArgs& a, std::ostream& out) {
    const auto table = report::read_report(fs::path(a.in));
    out << report::format_report(table);
    if (!a.charts.empty()) {
        for (const auto& p : report::write_charts(table, a.charts, {a.width, a.height})) out << p.string() << "\n";
    }
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Joint demosaicking and denoising for Bayer and Quad Bayer sensors", "jdd"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    const auto add_seed = [&seed](CLI::App* sub) {
        return sub->add_option("--seed", seed, "Seed for every random draw (default 0)");
    };

    PrepareArgs prep;
    auto* prepare = app.add_subcommand("prepare", "Extract, degrade and store training patches");
    prepare->add_option("--src", prep.src, "Directory of clean source images")->required()->check(CLI::ExistingDirectory);
    prepare->add_option("--out", prep.out, "Output dataset directory")->required();
    prepare->add_option("--pattern", prep.pattern, "CFA pattern: bayer or quad")->capture_default_str();
    prepare->add_option("--patch", prep.patch, "Patch size in pixels")->capture_default_str();
    prepare->add_option("--sigma", prep.sigma, "Fixed noise sigma (8-bit scale); default draws U[0,25] per patch");
    prepare->add_option("--split", prep.split, "Train fraction for a by-source train/val split (0 = none)")
        ->capture_default_str();
    add_seed(prepare);

    MosaicArgs mos;
    auto* mosaic = app.add_subcommand("mosaic", "Sample an RGB image through a CFA and add noise");
    mosaic->add_option("--pattern", mos.pattern, "CFA pattern: bayer or quad")->capture_default_str();
    mosaic->add_option("--sigma", mos.sigma, "Noise sigma (8-bit scale)")->capture_default_str();
    mosaic->add_option("input", mos.in, "Input PNG")->required()->check(CLI::ExistingFile);
    mosaic->add_option("output", mos.out, "Output mosaic PNG (a .cfa sidecar is written next to it)")->required();
    add_seed(mosaic);

    TrainArgs tr;
    auto* trainc = app.add_subcommand("train", "Train the network from a run config");
    trainc->add_option("--config", tr.config, "run.json")->required()->check(CLI::ExistingFile);
    trainc->add_option("--out", tr.out, "Override the output directory");
    trainc->add_option("--resume", tr.resume, "Checkpoint to resume from")->check(CLI::ExistingFile);
    trainc->add_option("--max-steps", tr.max_steps, "Stop at this global step");
    auto* train_seed = add_seed(trainc);
    train_seed->description("Override train.seed from the config");

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Score reconstructions against references");
    eval->add_option("--pred", ev.pred, "Directory of reconstructed images")->check(CLI::ExistingDirectory);
    eval->add_option("--ref", ev.ref, "Directory of reference images")->check(CLI::ExistingDirectory);
    eval->add_option("--checkpoint", ev.checkpoint, "Reconstruct a manifest with this checkpoint")
        ->check(CLI::ExistingFile);
    eval->add_option("--manifest", ev.manifest, "Manifest to reconstruct and score")->check(CLI::ExistingFile);
    eval->add_option("--out", ev.out, "Write the JSON-lines report here");
    eval->add_option("--charts", ev.charts, "Write bar charts into this directory");
    eval->add_option("--dataset", ev.dataset, "Dataset name recorded in the report")->capture_default_str();
    eval->add_option("--sigma", ev.sigma, "Noise level recorded in the report");
    eval->add_flag("--quantize-8bit", ev.quantize, "Round both images to 8 bits before scoring");
    eval->add_option("--tile", ev.tile, "Tile size for reconstruction (0 = training patch size)");
    eval->add_option("--overlap", ev.overlap, "Tile overlap in pixels")->capture_default_str();
    add_seed(eval);

    InferArgs inf;
    auto* infer = app.add_subcommand("infer", "Reconstruct mosaics with a trained checkpoint");
    infer->add_option("--checkpoint", inf.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
    infer->add_option("--out", inf.out, "Output directory")->capture_default_str();
    infer->add_option("--tile", inf.tile, "Tile size (0 = training patch size)");
    infer->add_option("--overlap", inf.overlap, "Tile overlap in pixels")->capture_default_str();
    infer->add_option("inputs", inf.inputs, "Mosaic PNGs")->required()->check(CLI::ExistingFile);
    add_seed(infer);

    AblateArgs ab;
    auto* ablate = app.add_subcommand("ablate", "Run the variant x group-density ablation matrix");
    ablate->add_option("--config", ab.config, "run.json")->required()->check(CLI::ExistingFile);
    ablate->add_option("--densities", ab.densities, "Group densities")->delimiter(',')->capture_default_str();
    ablate->add_option("--out", ab.out, "Write the table here");
    auto* ablate_seed = add_seed(ablate);
    ablate_seed->description("Override train.seed from the config");

    ReportArgs rep;
    auto* reportc = app.add_subcommand("report", "Tabulate and chart an evaluation report");
    reportc->add_option("input", rep.in, "metrics.jsonl")->required()->check(CLI::ExistingFile);
    reportc->add_option("--charts", rep.charts, "Write bar charts into this directory");
    reportc->add_option("--width", rep.width, "Chart width in pixels")->capture_default_str();
    reportc->add_option("--height", rep.height, "Chart height in pixels")->capture_default_str();
    add_seed(reportc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return 1;
    }

    const auto explicit_seed = [&](CLI::App* sub) -> std::optional<std::uint64_t> {
        if (sub->count("--seed") > 0) return seed;
        return std::nullopt;
    };
    try {
        torch::manual_seed(seed);
        if (prepare->parsed()) return do_prepare(prep, seed, out);
        if (mosaic->parsed()) return do_mosaic(mos, seed, out);
        if (trainc->parsed()) return do_train(tr, explicit_seed(trainc), out);
        if (eval->parsed()) return do_eval(ev, out);
        if (infer->parsed()) return do_infer(inf, out);
        if (ablate->parsed()) return do_ablate(ab, explicit_seed(ablate), out);
        if (reportc->parsed()) return do_report(rep, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace jdd::cli
