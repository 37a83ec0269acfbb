#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace panodolly {

struct Rgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
};

/// Row-major 8-bit RGB raster.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::size_t offset(int x, int y) const { return (static_cast<std::size_t>(y) * width + x) * 3; }
    const std::uint8_t* at(int x, int y) const { return pixels.data() + offset(x, y); }
    std::uint8_t* at(int x, int y) { return pixels.data() + offset(x, y); }
};

/// Equirectangular panorama: column u wraps around the seam, row v clamps at
/// the poles. Immutable once loaded.
struct PanoramaImage : RgbImage {
    using RgbImage::RgbImage;
};

struct RenderedImage : RgbImage {
    using RgbImage::RgbImage;
};

/// Loads a PNG or JPEG file. Prints a warning to stderr when width != 2 height.
/// Throws IoError for unreadable paths and DecodeError for undecodable files.
PanoramaImage load_panorama(const std::filesystem::path& path);

/// Bilinear lookup with pixel-center addressing: texel i covers
/// [i / W, (i + 1) / W), so u = (i + 0.5) / W hits texel i exactly.
Rgb sample_bilinear(const PanoramaImage& img, double u, double v);

/// Always encodes PNG, whatever the extension. Throws IoError.
void write_image(const RgbImage& img, const std::filesystem::path& path);

std::uint8_t to_byte(double channel);

}  // namespace panodolly
