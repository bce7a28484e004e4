#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scengraph/geometry.hpp"

namespace scengraph::screen {

// Row-major 8-bit grayscale image.
struct ScreenRaster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  ScreenRaster() = default;
  ScreenRaster(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  void set(int x, int y, std::uint8_t v) {
    pixels[static_cast<std::size_t>(y) * width + x] = v;
  }
  bool valid() const {
    return width >= 1 && height >= 1 &&
           pixels.size() == static_cast<std::size_t>(width) * height;
  }

  void fill_rect(const Rect& r, std::uint8_t v);
  // Draws a border of the given thickness just inside r.
  void draw_border(const Rect& r, int thickness, std::uint8_t v);

  bool operator==(const ScreenRaster&) const = default;
};

// Plain (ASCII, P2) portable graymap I/O.
ScreenRaster read_pgm(const std::string& path);
void write_pgm(const ScreenRaster& raster, const std::string& path);
std::string to_pgm_string(const ScreenRaster& raster);
ScreenRaster from_pgm_string(const std::string& content,
                             const std::string& origin = "<string>");

// One sidecar text fragment: string plus its pixel box.
struct TextSpan {
  std::string text;
  Rect box;

  bool operator==(const TextSpan&) const = default;
};

// Line-oriented text layer: `"<string>" x0 y0 x1 y1` per line, UTF-8.
std::vector<TextSpan> read_text_layer(const std::string& path);
void write_text_layer(const std::vector<TextSpan>& spans,
                      const std::string& path);
std::string to_text_layer_string(const std::vector<TextSpan>& spans);
std::vector<TextSpan> from_text_layer_string(const std::string& content,
                                             const std::string& origin =
                                                 "<string>");

}  // namespace scengraph::screen
