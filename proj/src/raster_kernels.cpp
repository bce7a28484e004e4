#include "scengraph/raster_kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

namespace scengraph::screen {

namespace {

// Clamped sample so border pixels replicate their nearest neighbor.
inline int sample(const ScreenRaster& r, int x, int y) {
  if (x < 0) x = 0;
  if (x >= r.width) x = r.width - 1;
  if (y < 0) y = 0;
  if (y >= r.height) y = r.height - 1;
  return r.at(x, y);
}

inline int sobel_at(const ScreenRaster& r, int x, int y) {
  int p00 = sample(r, x - 1, y - 1), p10 = sample(r, x, y - 1),
      p20 = sample(r, x + 1, y - 1);
  int p01 = sample(r, x - 1, y), p21 = sample(r, x + 1, y);
  int p02 = sample(r, x - 1, y + 1), p12 = sample(r, x, y + 1),
      p22 = sample(r, x + 1, y + 1);
  int gx = (p20 + 2 * p21 + p22) - (p00 + 2 * p01 + p02);
  int gy = (p02 + 2 * p12 + p22) - (p00 + 2 * p10 + p20);
  return std::abs(gx) + std::abs(gy);
}

inline std::uint8_t dilate_at(const BinaryMap& src, int x, int y) {
  for (int dy = -1; dy <= 1; ++dy) {
    int yy = y + dy;
    if (yy < 0 || yy >= src.height) continue;
    for (int dx = -1; dx <= 1; ++dx) {
      int xx = x + dx;
      if (xx < 0 || xx >= src.width) continue;
      if (src.at(xx, yy)) return 1;
    }
  }
  return 0;
}

inline std::uint8_t erode_at(const BinaryMap& src, int x, int y) {
  // Pixels outside the map count as unset, so erosion shrinks at the rim.
  for (int dy = -1; dy <= 1; ++dy) {
    int yy = y + dy;
    for (int dx = -1; dx <= 1; ++dx) {
      int xx = x + dx;
      if (xx < 0 || xx >= src.width || yy < 0 || yy >= src.height) return 0;
      if (!src.at(xx, yy)) return 0;
    }
  }
  return 1;
}

}  // namespace

namespace serial {

GradientMap sobel_magnitude(const ScreenRaster& raster) {
  GradientMap g{raster.width, raster.height,
                std::vector<int>(raster.pixels.size(), 0)};
  for (int y = 0; y < raster.height; ++y) {
    for (int x = 0; x < raster.width; ++x) {
      g.mag[static_cast<std::size_t>(y) * raster.width + x] =
          sobel_at(raster, x, y);
    }
  }
  return g;
}

BinaryMap dilate3x3(const BinaryMap& src) {
  BinaryMap out(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      out.set(x, y, dilate_at(src, x, y));
    }
  }
  return out;
}

BinaryMap erode3x3(const BinaryMap& src) {
  BinaryMap out(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      out.set(x, y, erode_at(src, x, y));
    }
  }
  return out;
}

}  // namespace serial

namespace parallel {

GradientMap sobel_magnitude(const ScreenRaster& raster) {
  GradientMap g{raster.width, raster.height,
                std::vector<int>(raster.pixels.size(), 0)};
#pragma omp parallel for schedule(static)
  for (int y = 0; y < raster.height; ++y) {
    for (int x = 0; x < raster.width; ++x) {
      g.mag[static_cast<std::size_t>(y) * raster.width + x] =
          sobel_at(raster, x, y);
    }
  }
  return g;
}

BinaryMap dilate3x3(const BinaryMap& src) {
  BinaryMap out(src.width, src.height);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      out.set(x, y, dilate_at(src, x, y));
    }
  }
  return out;
}

BinaryMap erode3x3(const BinaryMap& src) {
  BinaryMap out(src.width, src.height);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      out.set(x, y, erode_at(src, x, y));
    }
  }
  return out;
}

}  // namespace parallel

GradientMap sobel_magnitude(const ScreenRaster& raster) {
#ifdef _OPENMP
  return parallel::sobel_magnitude(raster);
#else
  return serial::sobel_magnitude(raster);
#endif
}

BinaryMap dilate3x3(const BinaryMap& src) {
#ifdef _OPENMP
  return parallel::dilate3x3(src);
#else
  return serial::dilate3x3(src);
#endif
}

BinaryMap erode3x3(const BinaryMap& src) {
#ifdef _OPENMP
  return parallel::erode3x3(src);
#else
  return serial::erode3x3(src);
#endif
}

BinaryMap close3x3(const BinaryMap& src) { return erode3x3(dilate3x3(src)); }

BinaryMap hysteresis(const GradientMap& grad, int low, int high) {
  BinaryMap out(grad.width, grad.height);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < grad.height; ++y) {
    for (int x = 0; x < grad.width; ++x) {
      if (grad.at(x, y) < high || out.at(x, y)) continue;
      out.set(x, y);
      stack.emplace_back(x, y);
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            int nx = cx + dx;
            int ny = cy + dy;
            if (nx < 0 || nx >= grad.width || ny < 0 || ny >= grad.height) {
              continue;
            }
            if (out.at(nx, ny) || grad.at(nx, ny) < low) continue;
            out.set(nx, ny);
            stack.emplace_back(nx, ny);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace scengraph::screen
