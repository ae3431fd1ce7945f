#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace jdd {

/// Raised for contract violations on inputs (bad sizes, out-of-range values,
/// malformed configs). The CLI maps it to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a file cannot be read or written. The CLI maps it to exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// H x W x 3 image with interleaved channels, values nominally in [0,1].
struct RgbImage {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    RgbImage() = default;
    RgbImage(int h, int w, double fill = 0.0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, fill) {
        if (h <= 0 || w <= 0) {
            throw ValidationError("image dimensions must be positive, got " +
                                  std::to_string(h) + "x" + std::to_string(w));
        }
    }

    double& at(int y, int x, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    double at(int y, int x, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }

    std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
    bool same_shape(const RgbImage& other) const {
        return height == other.height && width == other.width;
    }
};

/// Single-channel H x W grid.
struct Plane {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Plane() = default;
    Plane(int h, int w, double fill = 0.0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {
        if (h <= 0 || w <= 0) {
            throw ValidationError("plane dimensions must be positive, got " +
                                  std::to_string(h) + "x" + std::to_string(w));
        }
    }

    double& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

inline void require_same_shape(const RgbImage& a, const RgbImage& b, const char* what) {
    if (!a.same_shape(b)) {
        throw ValidationError(std::string(what) + ": dimension mismatch " +
                              std::to_string(a.height) + "x" + std::to_string(a.width) + " vs " +
                              std::to_string(b.height) + "x" + std::to_string(b.width));
    }
}

/// Copies a rectangular window out of an image.
RgbImage crop(const RgbImage& image, int y0, int x0, int h, int w);

/// Mirrors an image left-right.
RgbImage flip_horizontal(const RgbImage& image);

}  // namespace jdd
