#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jdd/cfa.hpp"
#include "jdd/image.hpp"

namespace jdd::data {

/// Maximum noise level drawn for training patches (8-bit scale).
inline constexpr double kTrainSigmaMax = 25.0;

struct PatchRecord {
    std::int64_t id = 0;
    std::string source;  ///< path relative to the source directory
    int offset_y = 0;
    int offset_x = 0;
    int patch_size = 128;
    std::string pattern = "quad";
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string clean_path;   ///< relative to the manifest directory
    std::string mosaic_path;  ///< relative to the manifest directory
};

struct DatasetManifest {
    std::vector<PatchRecord> records;
    std::uint64_t global_seed = 0;
    std::string pattern = "quad";
    std::string split = "all";
    int patch_size = 128;
    std::string source_dir;
    std::int64_t skipped_images = 0;
};

struct ExtractOptions {
    int patch_size = 128;
    cfa::CfaPattern pattern = cfa::CfaPattern::quad_bayer();
    std::uint64_t seed = 0;
    /// Fixed noise level for every record; unset draws U[0, 25] per record.
    std::optional<double> sigma;
};

/// Tiles every readable image under `image_dir` (recursively, sorted by
/// relative path) into non-overlapping patches; partial borders are dropped.
/// Unreadable or undersized images are counted in `skipped_images`.
DatasetManifest extract_patches(const std::filesystem::path& image_dir, const ExtractOptions& opts);

/// Per-record seed derived from the global seed and record index.
std::uint64_t record_seed(std::uint64_t global_seed, std::int64_t index);

/// mosaic(clean) followed by add_noise with the record's sigma and seed.
cfa::MosaicImage degrade_patch(const PatchRecord& record, const RgbImage& clean_patch);

/// Crops, degrades and writes the clean/mosaic files of every record under
/// `out_dir`, then writes `out_dir/manifest.jsonl`. IO failures name the record.
void materialize(const DatasetManifest& manifest, const std::filesystem::path& out_dir);

/// Deterministic split by source image; `train_fraction` in (0,1).
std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest, double train_fraction,
                                                  std::uint64_t seed);

void write_manifest(std::ostream& out, const DatasetManifest& manifest);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// A degraded/clean pair held in memory.
struct Sample {
    PatchRecord record;
    cfa::MosaicImage mosaic;
    RgbImage clean;
};

/// Loads every record's files; paths are resolved against `manifest_dir`.
std::vector<Sample> load_samples(const DatasetManifest& manifest, const std::filesystem::path& manifest_dir);

}  // namespace jdd::data
