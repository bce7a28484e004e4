// Compares the serial reference kernels against the OpenMP variants on
// synthetic rasters and reports throughput for each.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>

#include "scengraph/raster_kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

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
  for (auto& bit : b.bits) bit = (rng() % 4) == 0;
  return b;
}

template <typename F>
double time_ms(F&& fn, int reps) {
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-18s serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  int w = 1080;
  int h = 1920;
  int reps = 20;
  if (argc > 2) {
    w = std::stoi(argv[1]);
    h = std::stoi(argv[2]);
  }
  if (argc > 3) reps = std::stoi(argv[3]);

#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both columns run the serial path\n");
#endif
  std::printf("raster %dx%d, %d reps per kernel\n\n", w, h, reps);

  ScreenRaster raster = random_raster(w, h, 42);
  BinaryMap binary = random_binary(w, h, 43);

  report("sobel_magnitude",
         time_ms([&] { serial::sobel_magnitude(raster); }, reps),
         time_ms([&] { parallel::sobel_magnitude(raster); }, reps));
  report("dilate3x3", time_ms([&] { serial::dilate3x3(binary); }, reps),
         time_ms([&] { parallel::dilate3x3(binary); }, reps));
  report("erode3x3", time_ms([&] { serial::erode3x3(binary); }, reps),
         time_ms([&] { parallel::erode3x3(binary); }, reps));

  // Sanity: the variants must agree bit for bit.
  bool ok = serial::sobel_magnitude(raster).mag ==
                parallel::sobel_magnitude(raster).mag &&
            serial::dilate3x3(binary) == parallel::dilate3x3(binary) &&
            serial::erode3x3(binary) == parallel::erode3x3(binary);
  std::printf("\nvariants agree: %s\n", ok ? "yes" : "NO");
  return ok ? 0 : 1;
}
