#pragma once

#include "jdd/cfa.hpp"

namespace jdd::baseline {

/// Smooths each sample with a Gaussian-weighted average of same-colour
/// neighbours inside a (2*radius+1)^2 window.
cfa::MosaicImage denoise_same_colour(const cfa::MosaicImage& mosaic, double sigma_px = 1.0,
                                     int radius = 2);

/// Normalized-convolution bilinear demosaic: missing channels are filled with
/// a tent-weighted average of the nearest samples of that colour. Works for
/// any pattern whose same-colour sites lie within 2 pixels of every site.
RgbImage demosaic_bilinear(const cfa::MosaicImage& mosaic);

/// demosaic_bilinear(denoise_same_colour(mosaic)).
RgbImage denoise_then_demosaic(const cfa::MosaicImage& mosaic);

}  // namespace jdd::baseline
