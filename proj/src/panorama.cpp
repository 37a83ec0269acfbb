#include "panodolly/panorama.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "panodolly/error.hpp"

namespace panodolly {

PanoramaImage load_panorama(const std::filesystem::path& path)
{
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw Error(ErrorCode::IoError, "cannot read panorama: " + path.string());
    }
    cv::Mat bgr;
    try {
        bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    } catch (const cv::Exception& e) {
        throw Error(ErrorCode::DecodeError, "cannot decode " + path.string() + ": " + e.what());
    }
    if (bgr.empty()) {
        throw Error(ErrorCode::DecodeError, "cannot decode " + path.string());
    }
    if (bgr.cols != 2 * bgr.rows) {
        std::cerr << "warning: " << path.string() << " is " << bgr.cols << "x" << bgr.rows
                  << ", expected a 2:1 equirectangular image\n";
    }

    PanoramaImage img(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            std::uint8_t* px = img.at(x, y);
            px[0] = row[x][2];
            px[1] = row[x][1];
            px[2] = row[x][0];
        }
    }
    return img;
}

Rgb sample_bilinear(const PanoramaImage& img, double u, double v)
{
    const double fx = u * img.width - 0.5;
    const double fy = v * img.height - 0.5;
    const double x_floor = std::floor(fx);
    const double y_floor = std::floor(fy);
    const double wx = fx - x_floor;
    const double wy = fy - y_floor;

    auto wrap = [w = img.width](long long x) { return static_cast<int>(((x % w) + w) % w); };
    auto clamp_row = [h = img.height](long long y) { return static_cast<int>(std::clamp<long long>(y, 0, h - 1)); };

    const auto xi = static_cast<long long>(x_floor);
    const auto yi = static_cast<long long>(y_floor);
    const int x0 = wrap(xi);
    const int x1 = wrap(xi + 1);
    const int y0 = clamp_row(yi);
    const int y1 = clamp_row(yi + 1);

    const std::uint8_t* p00 = img.at(x0, y0);
    const std::uint8_t* p10 = img.at(x1, y0);
    const std::uint8_t* p01 = img.at(x0, y1);
    const std::uint8_t* p11 = img.at(x1, y1);

    double out[3];
    for (int c = 0; c < 3; ++c) {
        const double top = p00[c] + wx * (p10[c] - p00[c]);
        const double bottom = p01[c] + wx * (p11[c] - p01[c]);
        out[c] = (top + wy * (bottom - top)) / 255.0;
    }
    return {out[0], out[1], out[2]};
}

std::uint8_t to_byte(double channel)
{
    return static_cast<std::uint8_t>(std::lround(std::clamp(channel, 0.0, 1.0) * 255.0));
}

void write_image(const RgbImage& img, const std::filesystem::path& path)
{
    cv::Mat bgr(img.height, img.width, CV_8UC3);
    for (int y = 0; y < img.height; ++y) {
        auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width; ++x) {
            const std::uint8_t* px = img.at(x, y);
            row[x] = cv::Vec3b(px[2], px[1], px[0]);
        }
    }
    std::vector<std::uint8_t> encoded;
    if (!cv::imencode(".png", bgr, encoded)) {
        throw Error(ErrorCode::IoError, "PNG encoding failed for " + path.string());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(encoded.data()), static_cast<std::streamsize>(encoded.size()));
    if (!out) {
        throw Error(ErrorCode::IoError, "write failed: " + path.string());
    }
}

}  // namespace panodolly
