#pragma once

#include <filesystem>

#include "focalspec/image.hpp"

namespace focalspec::io {

enum class BitDepth { eight = 8, sixteen = 16 };

// Grayscale PNG/PGM: stored integer levels map linearly onto [0, 1].
// Colour PNGs are converted to grayscale on load.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img,
               BitDepth depth = BitDepth::sixteen);

Image read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Image& img,
               BitDepth depth = BitDepth::sixteen);

// Lossless float64 dump: uint32 height, uint32 width, then row-major
// doubles, all little-endian. Pixels are stored verbatim (any role).
Image read_f64(const std::filesystem::path& path, ImageRole role = ImageRole::residual);
void write_f64(const std::filesystem::path& path, const Image& img);

/// Picks the codec from the extension (.png, .pgm, .f64).
/// Images read through PNG/PGM carry role intensity.
Image read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Image& img);

}  // namespace focalspec::io
