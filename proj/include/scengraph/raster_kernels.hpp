#pragma once

#include <cstdint>
#include <vector>

#include "scengraph/raster.hpp"

namespace scengraph::screen {

// Per-pixel gradient magnitudes; same dimensions as the source raster.
struct GradientMap {
  int width = 0;
  int height = 0;
  std::vector<int> mag;

  int at(int x, int y) const {
    return mag[static_cast<std::size_t>(y) * width + x];
  }
};

// Binary mask with the raster's dimensions; nonzero means set.
struct BinaryMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryMap() = default;
  BinaryMap(int w, int h)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * width + x];
  }
  void set(int x, int y, std::uint8_t v = 1) {
    bits[static_cast<std::size_t>(y) * width + x] = v;
  }

  bool operator==(const BinaryMap&) const = default;
};

// The per-pixel kernels have a serial reference implementation and an
// OpenMP variant. The serial forms are the testing oracle: the parallel
// forms must produce bit-identical output.
namespace serial {

GradientMap sobel_magnitude(const ScreenRaster& raster);
BinaryMap dilate3x3(const BinaryMap& src);
BinaryMap erode3x3(const BinaryMap& src);

}  // namespace serial

namespace parallel {

GradientMap sobel_magnitude(const ScreenRaster& raster);
BinaryMap dilate3x3(const BinaryMap& src);
BinaryMap erode3x3(const BinaryMap& src);

}  // namespace parallel

// Dispatching entry points used by the analysis pipeline: parallel when
// compiled with OpenMP, serial otherwise.
GradientMap sobel_magnitude(const ScreenRaster& raster);
BinaryMap dilate3x3(const BinaryMap& src);
BinaryMap erode3x3(const BinaryMap& src);

// Morphological closing: dilation then erosion, one pass, 3x3 kernel.
BinaryMap close3x3(const BinaryMap& src);

// Double-threshold hysteresis over a gradient map: pixels >= high seed
// a flood that keeps connected pixels >= low (8-connectivity). The
// flood fill is inherently serial and shared by both kernel variants.
BinaryMap hysteresis(const GradientMap& grad, int low, int high);

}  // namespace scengraph::screen
