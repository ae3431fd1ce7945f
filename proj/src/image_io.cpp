#include "jdd/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace jdd::io {
namespace fs = std::filesystem;

namespace {

double max_value(int depth) {
    switch (depth) {
        case CV_8U: return 255.0;
        case CV_16U: return 65535.0;
        default: throw IoError("unsupported PNG sample depth");
    }
}

}  // namespace

RgbImage read_rgb(const fs::path& path) {
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (m.empty()) throw IoError("cannot read image " + path.string());
    const double scale = 1.0 / max_value(m.depth());
    cv::Mat rgb;
    switch (m.channels()) {
        case 1: cv::cvtColor(m, rgb, cv::COLOR_GRAY2RGB); break;
        case 3: cv::cvtColor(m, rgb, cv::COLOR_BGR2RGB); break;
        case 4: cv::cvtColor(m, rgb, cv::COLOR_BGRA2RGB); break;
        default: throw IoError("unsupported channel count in " + path.string());
    }
    cv::Mat f;
    rgb.convertTo(f, CV_64FC3, scale);
    RgbImage out(f.rows, f.cols);
    for (int y = 0; y < f.rows; ++y) {
        const double* row = f.ptr<double>(y);
        std::copy(row, row + static_cast<std::size_t>(f.cols) * 3, &out.data[static_cast<std::size_t>(y) * f.cols * 3]);
    }
    return out;
}

void write_rgb(const fs::path& path, const RgbImage& image, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) throw ValidationError("bit depth must be 8 or 16");
    const double maxv = bit_depth == 8 ? 255.0 : 65535.0;
    cv::Mat rgb(image.height, image.width, bit_depth == 8 ? CV_8UC3 : CV_16UC3);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                const double v = std::round(std::clamp(image.at(y, x, c), 0.0, 1.0) * maxv);
                if (bit_depth == 8) {
                    rgb.at<cv::Vec3b>(y, x)[2 - c] = static_cast<std::uint8_t>(v);
                } else {
                    rgb.at<cv::Vec3w>(y, x)[2 - c] = static_cast<std::uint16_t>(v);
                }
            }
        }
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    if (!cv::imwrite(path.string(), rgb)) throw IoError("cannot write image " + path.string());
}

fs::path sidecar_path(const fs::path& mosaic_path) {
    fs::path p = mosaic_path;
    p += ".cfa";
    return p;
}

void write_mosaic(const fs::path& path, const cfa::MosaicImage& mosaic) {
    const Plane& p = mosaic.plane;
    cv::Mat m(p.height, p.width, CV_16UC1);
    for (int y = 0; y < p.height; ++y) {
        for (int x = 0; x < p.width; ++x) {
            m.at<std::uint16_t>(y, x) =
                static_cast<std::uint16_t>(std::round(std::clamp(p.at(y, x), 0.0, 1.0) * 65535.0));
        }
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    if (!cv::imwrite(path.string(), m)) throw IoError("cannot write mosaic " + path.string());
    write_file_atomic(sidecar_path(path), mosaic.pattern.name() + "\n");
}

cfa::MosaicImage read_mosaic(const fs::path& path, const cfa::CfaPattern* fallback) {
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (m.empty()) throw IoError("cannot read mosaic " + path.string());
    if (m.channels() != 1) throw IoError("mosaic " + path.string() + " is not single-channel");

    cfa::CfaPattern pattern = fallback ? *fallback : cfa::CfaPattern::bayer();
    std::ifstream side(sidecar_path(path));
    if (side) {
        std::string name;
        side >> name;
        pattern = cfa::CfaPattern::parse(name);
    } else if (!fallback) {
        throw IoError("missing pattern sidecar " + sidecar_path(path).string());
    }

    const double scale = 1.0 / max_value(m.depth());
    cfa::MosaicImage out{Plane(m.rows, m.cols), pattern};
    for (int y = 0; y < m.rows; ++y) {
        for (int x = 0; x < m.cols; ++x) {
            out.plane.at(y, x) = m.depth() == CV_8U ? m.at<std::uint8_t>(y, x) * scale
                                                    : m.at<std::uint16_t>(y, x) * scale;
        }
    }
    cfa::require_tile_multiple(pattern, out.plane.height, out.plane.width);
    return out;
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

bool is_image_file(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" || ext == ".tif" || ext == ".tiff";
}

}  // namespace jdd::io
