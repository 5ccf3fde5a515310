#include "cua/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cua/util.hpp"

namespace cua::img {

Image make_image(int width, int height, int channels, std::uint8_t fill) {
  Image im;
  im.width = width;
  im.height = height;
  im.channels = channels;
  im.pixels.assign(std::size_t(width) * height * channels, fill);
  return im;
}

namespace {

int read_pnm_int(std::istream& in) {
  int c = in.get();
  while (c == '#' || std::isspace(c)) {
    if (c == '#') {
      while (c != '\n' && c != EOF) c = in.get();
    }
    c = in.get();
  }
  int value = 0;
  bool any = false;
  while (c >= '0' && c <= '9') {
    value = value * 10 + (c - '0');
    any = true;
    c = in.get();
  }
  if (!any) throw CuaError(Err::io_error, "malformed PNM header");
  return value;
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CuaError(Err::io_error, "cannot open image: " + path.string());
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
    throw CuaError(Err::io_error, "unsupported image format: " + path.string());
  Image im;
  im.channels = magic[1] == '5' ? 1 : 3;
  im.width = read_pnm_int(in);
  im.height = read_pnm_int(in);
  int maxval = read_pnm_int(in);
  if (maxval != 255)
    throw CuaError(Err::io_error, "unsupported PNM depth: " + path.string());
  if (im.width <= 0 || im.height <= 0)
    throw CuaError(Err::io_error, "bad image dimensions: " + path.string());
  im.pixels.resize(std::size_t(im.width) * im.height * im.channels);
  in.read(reinterpret_cast<char*>(im.pixels.data()),
          std::streamsize(im.pixels.size()));
  if (std::size_t(in.gcount()) != im.pixels.size())
    throw CuaError(Err::io_error, "truncated image: " + path.string());
  return im;
}

void save_image(const Image& image, const std::filesystem::path& path) {
  std::ostringstream out;
  out << (image.channels == 1 ? "P5" : "P6") << "\n"
      << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            std::streamsize(image.pixels.size()));
  atomic_write(path, out.str());
}

double luminance(const Image& image, int x, int y) {
  if (image.channels == 1) return image.at(x, y) / 255.0;
  return (0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) +
          0.114 * image.at(x, y, 2)) /
         255.0;
}

std::vector<double> downsample_luma(const Image& image, int width, int height) {
  // Area-exact box integration: each target cell averages the source pixels
  // it overlaps, weighted by overlap fraction.
  std::vector<double> out(std::size_t(width) * height, 0.0);
  double sx = double(image.width) / width;
  double sy = double(image.height) / height;
  for (int ty = 0; ty < height; ++ty) {
    double y0 = ty * sy, y1 = (ty + 1) * sy;
    for (int tx = 0; tx < width; ++tx) {
      double x0 = tx * sx, x1 = (tx + 1) * sx;
      double sum = 0.0, area = 0.0;
      for (int y = int(y0); y < int(std::ceil(y1)); ++y) {
        double wy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
        if (wy <= 0) continue;
        for (int x = int(x0); x < int(std::ceil(x1)); ++x) {
          double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
          if (wx <= 0) continue;
          sum += luminance(image, std::min(x, image.width - 1),
                           std::min(y, image.height - 1)) *
                 wx * wy;
          area += wx * wy;
        }
      }
      out[std::size_t(ty) * width + tx] = area > 0 ? sum / area : 0.0;
    }
  }
  return out;
}

double mean_abs_diff(const Image& a, const Image& b, int width, int height) {
  auto da = downsample_luma(a, width, height);
  auto db = downsample_luma(b, width, height);
  double total = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) total += std::abs(da[i] - db[i]);
  return total / double(da.size());
}

void draw_disc(Image& image, int cx, int cy, int radius,
               std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  for (int y = std::max(0, cy - radius); y <= std::min(image.height - 1, cy + radius); ++y) {
    for (int x = std::max(0, cx - radius); x <= std::min(image.width - 1, cx + radius); ++x) {
      int dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy > radius * radius) continue;
      if (image.channels == 1) {
        image.at(x, y) = r;
      } else {
        image.at(x, y, 0) = r;
        image.at(x, y, 1) = g;
        image.at(x, y, 2) = b;
      }
    }
  }
}

Image to_rgb(const Image& image) {
  if (image.channels == 3) return image;
  Image out = make_image(image.width, image.height, 3, 0);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x)
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = image.at(x, y);
  return out;
}

Image magnify_crop(const Image& image, int cx, int cy, int side, int factor) {
  side = std::min(side, std::min(image.width, image.height));
  int half = side / 2;
  int x0 = std::clamp(cx - half, 0, image.width - side);
  int y0 = std::clamp(cy - half, 0, image.height - side);
  Image out = make_image(side * factor, side * factor, image.channels, 0);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      int sx = x0 + x / factor;
      int sy = y0 + y / factor;
      for (int c = 0; c < image.channels; ++c)
        out.at(x, y, c) = image.at(sx, sy, c);
    }
  }
  return out;
}

Image stack_vertical(const Image& a, const Image& b) {
  int channels = std::max(a.channels, b.channels);
  Image ca = channels == 3 ? to_rgb(a) : a;
  Image cb = channels == 3 ? to_rgb(b) : b;
  int width = std::max(ca.width, cb.width);
  Image out = make_image(width, ca.height + cb.height, channels, 0);
  auto blit = [&](const Image& src, int oy) {
    int ox = (width - src.width) / 2;
    for (int y = 0; y < src.height; ++y)
      for (int x = 0; x < src.width; ++x)
        for (int c = 0; c < channels; ++c)
          out.at(ox + x, oy + y, c) = src.at(x, y, c);
  };
  blit(ca, 0);
  blit(cb, ca.height);
  return out;
}

}  // namespace cua::img
