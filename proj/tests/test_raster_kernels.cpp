#include "scengraph/raster_kernels.hpp"

#include <random>

#include "doctest.h"

using namespace scengraph::screen;

namespace {

ScreenRaster random_raster(int w, int h, std::uint64_t seed) {
  ScreenRaster r(w, h);
  std::mt19937_64 rng(seed);
  for (auto& p : r.pixels) p = static_cast<std::uint8_t>(rng() % 256);
  return r;
}

BinaryMap random_binary(int w, int h, std::uint64_t seed) {
  BinaryMap b(w, h);
  std::mt19937_64 rng(seed);
  for (auto& bit : b.bits) bit = (rng() % 3) == 0;
  return b;
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  std::mt19937_64 dims(99);
  for (int round = 0; round < 12; ++round) {
    int w = 1 + static_cast<int>(dims() % 97);
    int h = 1 + static_cast<int>(dims() % 61);
    auto raster = random_raster(w, h, 1000 + round);
    auto binary = random_binary(w, h, 2000 + round);

    CHECK(serial::sobel_magnitude(raster).mag ==
          parallel::sobel_magnitude(raster).mag);
    CHECK(serial::dilate3x3(binary) == parallel::dilate3x3(binary));
    CHECK(serial::erode3x3(binary) == parallel::erode3x3(binary));
  }
}

TEST_CASE("sobel magnitude is zero on uniform rasters") {
  ScreenRaster r(40, 30, 128);
  auto g = serial::sobel_magnitude(r);
  for (int v : g.mag) CHECK(v == 0);
}

TEST_CASE("dilation grows and erosion shrinks") {
  BinaryMap b(9, 9);
  b.set(4, 4);
  auto d = dilate3x3(b);
  int set_count = 0;
  for (auto bit : d.bits) set_count += bit;
  CHECK(set_count == 9);  // the full 3x3 neighborhood

  auto e = erode3x3(d);
  // Erosion of the 3x3 block leaves exactly the center.
  int remaining = 0;
  for (auto bit : e.bits) remaining += bit;
  CHECK(remaining == 1);
  CHECK(e.at(4, 4) == 1);
}

TEST_CASE("closing seals single-pixel gaps") {
  BinaryMap b(12, 5);
  for (int x = 1; x < 11; ++x) {
    if (x != 5) b.set(x, 2);
  }
  auto closed = close3x3(b);
  CHECK(closed.at(5, 2) == 1);
}

TEST_CASE("hysteresis keeps weak pixels only when connected to strong") {
  GradientMap g{7, 1, {0, 50, 120, 50, 0, 50, 0}};
  auto out = hysteresis(g, 40, 100);
  CHECK(out.at(0, 0) == 0);
  CHECK(out.at(1, 0) == 1);  // weak, adjacent to strong
  CHECK(out.at(2, 0) == 1);  // strong
  CHECK(out.at(3, 0) == 1);  // weak, adjacent to strong
  CHECK(out.at(4, 0) == 0);
  CHECK(out.at(5, 0) == 0);  // weak, isolated from any strong pixel
  CHECK(out.at(6, 0) == 0);
}
