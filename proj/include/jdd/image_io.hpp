#pragma once

#include <filesystem>

#include "jdd/cfa.hpp"
#include "jdd/image.hpp"

namespace jdd::io {

/// Reads an 8- or 16-bit PNG (gray, RGB or RGBA) into [0,1] RGB.
RgbImage read_rgb(const std::filesystem::path& path);

/// Writes RGB as PNG with the given bit depth (8 or 16); values are clipped
/// to [0,1] and rounded.
void write_rgb(const std::filesystem::path& path, const RgbImage& image, int bit_depth = 16);

/// Sidecar file naming the pattern of a stored mosaic: "<path>.cfa".
std::filesystem::path sidecar_path(const std::filesystem::path& mosaic_path);

/// Mosaic as single-channel 16-bit PNG plus its pattern sidecar.
void write_mosaic(const std::filesystem::path& path, const cfa::MosaicImage& mosaic);

/// Reads a mosaic written by write_mosaic. If the sidecar is missing,
/// `fallback` is used when given, otherwise an IoError is raised.
cfa::MosaicImage read_mosaic(const std::filesystem::path& path,
                             const cfa::CfaPattern* fallback = nullptr);

/// Writes `bytes` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

bool is_image_file(const std::filesystem::path& path);

}  // namespace jdd::io
