#include "jdd/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <opencv2/imgcodecs.hpp>

#include "jdd/image_io.hpp"

namespace jdd::data {
namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t record_seed(std::uint64_t global_seed, std::int64_t index) {
    // splitmix64 of (seed, index)
    std::uint64_t z = global_seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

DatasetManifest extract_patches(const fs::path& image_dir, const ExtractOptions& opts) {
    if (!fs::is_directory(image_dir)) throw ValidationError("not a directory: " + image_dir.string());
    if (opts.patch_size <= 0 || opts.patch_size % opts.pattern.period() != 0) {
        throw ValidationError("patch size " + std::to_string(opts.patch_size) + " is not a multiple of the " +
                              opts.pattern.name() + " tile size");
    }
    if (opts.sigma && *opts.sigma < 0.0) throw ValidationError("sigma must be non-negative");

    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(image_dir)) {
        if (entry.is_regular_file() && io::is_image_file(entry.path())) {
            files.push_back(fs::relative(entry.path(), image_dir));
        }
    }
    std::sort(files.begin(), files.end());

    DatasetManifest manifest;
    manifest.global_seed = opts.seed;
    manifest.pattern = opts.pattern.name();
    manifest.patch_size = opts.patch_size;
    manifest.source_dir = image_dir.string();

    const int p = opts.patch_size;
    for (const auto& rel : files) {
        // Header-only reads are not exposed by imgcodecs; decode to get the size.
        const cv::Mat img = cv::imread((image_dir / rel).string(), cv::IMREAD_UNCHANGED);
        if (img.empty() || img.rows < p || img.cols < p) {
            ++manifest.skipped_images;
            continue;
        }
        for (int y = 0; y + p <= img.rows; y += p) {
            for (int x = 0; x + p <= img.cols; x += p) {
                PatchRecord r;
                r.id = static_cast<std::int64_t>(manifest.records.size());
                r.source = rel.generic_string();
                r.offset_y = y;
                r.offset_x = x;
                r.patch_size = p;
                r.pattern = manifest.pattern;
                r.seed = record_seed(opts.seed, r.id);
                if (opts.sigma) {
                    r.sigma = *opts.sigma;
                } else {
                    std::mt19937_64 rng(r.seed);
                    r.sigma = std::uniform_real_distribution<double>(0.0, kTrainSigmaMax)(rng);
                }
                char name[32];
                std::snprintf(name, sizeof name, "%08lld.png", static_cast<long long>(r.id));
                r.clean_path = std::string("clean/") + name;
                r.mosaic_path = std::string("mosaic/") + name;
                manifest.records.push_back(std::move(r));
            }
        }
    }
    if (manifest.skipped_images > 0) {
        std::cerr << "warning: skipped " << manifest.skipped_images << " unreadable or undersized image(s)\n";
    }
    return manifest;
}

cfa::MosaicImage degrade_patch(const PatchRecord& record, const RgbImage& clean_patch) {
    const auto pattern = cfa::CfaPattern::parse(record.pattern);
    return cfa::add_noise(cfa::mosaic(clean_patch, pattern), {record.sigma, record.seed});
}

void materialize(const DatasetManifest& manifest, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const fs::path src(manifest.source_dir);
    std::string cached_source;
    RgbImage source;
    for (const auto& r : manifest.records) {
        try {
            if (r.source != cached_source) {
                source = io::read_rgb(src / r.source);
                cached_source = r.source;
            }
            const RgbImage clean = crop(source, r.offset_y, r.offset_x, r.patch_size, r.patch_size);
            io::write_rgb(out_dir / r.clean_path, clean, 16);
            io::write_mosaic(out_dir / r.mosaic_path, degrade_patch(r, clean));
        } catch (const std::exception& e) {
            throw IoError("record " + std::to_string(r.id) + " (" + r.source + "): " + e.what());
        }
    }
    write_manifest(out_dir / "manifest.jsonl", manifest);
}

std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest, double train_fraction,
                                                  std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ValidationError("split fractions must be in (0,1) and sum to 1");
    }
    std::set<std::string> unique;
    for (const auto& r : manifest.records) unique.insert(r.source);
    std::vector<std::string> sources(unique.begin(), unique.end());
    std::mt19937_64 rng(seed);
    std::shuffle(sources.begin(), sources.end(), rng);

    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(sources.size())));
    if (n_train == 0 || n_train >= sources.size()) {
        throw ValidationError("split would leave an empty partition (" + std::to_string(sources.size()) +
                              " source images)");
    }
    const std::set<std::string> train_sources(sources.begin(), sources.begin() + static_cast<std::ptrdiff_t>(n_train));

    DatasetManifest train = manifest;
    DatasetManifest val = manifest;
    train.records.clear();
    val.records.clear();
    train.split = "train";
    val.split = "val";
    for (const auto& r : manifest.records) {
        (train_sources.contains(r.source) ? train : val).records.push_back(r);
    }
    return {train, val};
}

void write_manifest(std::ostream& out, const DatasetManifest& m) {
    json header = {{"kind", "manifest"},      {"global_seed", m.global_seed}, {"pattern", m.pattern},
                   {"split", m.split},        {"patch_size", m.patch_size},   {"source_dir", m.source_dir},
                   {"skipped_images", m.skipped_images}, {"count", m.records.size()}};
    out << header.dump() << '\n';
    for (const auto& r : m.records) {
        json rec = {{"kind", "patch"},   {"id", r.id},         {"source", r.source},
                    {"y", r.offset_y},   {"x", r.offset_x},    {"size", r.patch_size},
                    {"pattern", r.pattern}, {"sigma", r.sigma}, {"seed", r.seed},
                    {"clean", r.clean_path}, {"mosaic", r.mosaic_path}};
        out << rec.dump() << '\n';
    }
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest) {
    std::ostringstream ss;
    write_manifest(ss, manifest);
    io::write_file_atomic(path, ss.str());
}

DatasetManifest read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read manifest " + path.string());
    DatasetManifest m;
    std::string line;
    bool have_header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            const std::string kind = j.at("kind");
            if (kind == "manifest") {
                m.global_seed = j.at("global_seed");
                m.pattern = j.at("pattern");
                m.split = j.at("split");
                m.patch_size = j.at("patch_size");
                m.source_dir = j.at("source_dir");
                m.skipped_images = j.value("skipped_images", std::int64_t{0});
                have_header = true;
            } else if (kind == "patch") {
                PatchRecord r;
                r.id = j.at("id");
                r.source = j.at("source");
                r.offset_y = j.at("y");
                r.offset_x = j.at("x");
                r.patch_size = j.at("size");
                r.pattern = j.at("pattern");
                r.sigma = j.at("sigma");
                r.seed = j.at("seed");
                r.clean_path = j.at("clean");
                r.mosaic_path = j.at("mosaic");
                m.records.push_back(std::move(r));
            } else {
                throw ValidationError("unknown record kind '" + kind + "'");
            }
        } catch (const json::exception& e) {
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!have_header) throw ValidationError("manifest " + path.string() + " has no header record");
    return m;
}

std::vector<Sample> load_samples(const DatasetManifest& manifest, const fs::path& manifest_dir) {
    std::vector<Sample> out;
    out.reserve(manifest.records.size());
    for (const auto& r : manifest.records) {
        const auto pattern = cfa::CfaPattern::parse(r.pattern);
        Sample s{r, io::read_mosaic(manifest_dir / r.mosaic_path, &pattern), io::read_rgb(manifest_dir / r.clean_path)};
        if (!(s.mosaic.pattern == pattern)) {
            throw ValidationError("record " + std::to_string(r.id) + ": mosaic pattern disagrees with manifest");
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace jdd::data
