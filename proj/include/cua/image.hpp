#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace cua::img {

/// 8-bit image, 1 channel (gray) or 3 channels (RGB). Binary PGM (P5) and
/// PPM (P6) are the interchange formats; frames arrive as such sequences.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;  // row-major, interleaved

  std::uint8_t& at(int x, int y, int c = 0) {
    return pixels[std::size_t(y) * width * channels + std::size_t(x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels[std::size_t(y) * width * channels + std::size_t(x) * channels + c];
  }
};

Image make_image(int width, int height, int channels, std::uint8_t fill);

Image load_image(const std::filesystem::path& path);
void save_image(const Image& image, const std::filesystem::path& path);

/// Rec.601 luma in [0,1].
double luminance(const Image& image, int x, int y);

/// Exact box-filter downsample of the luminance plane to width*height
/// doubles in [0,1].
std::vector<double> downsample_luma(const Image& image, int width, int height);

/// Mean absolute luminance difference over a common downsampled grid;
/// 0 for identical images, 1 for black vs white.
double mean_abs_diff(const Image& a, const Image& b, int width, int height);

void draw_disc(Image& image, int cx, int cy, int radius,
               std::uint8_t r, std::uint8_t g, std::uint8_t b);

Image to_rgb(const Image& image);

/// Nearest-neighbor crop magnification around (cx, cy), clamped to bounds.
Image magnify_crop(const Image& image, int cx, int cy, int side, int factor);

/// Stack b below a on a shared-width canvas (black padding).
Image stack_vertical(const Image& a, const Image& b);

}  // namespace cua::img
