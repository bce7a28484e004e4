#pragma once

#include <algorithm>
#include <cstdint>

namespace scengraph {

// Axis-aligned pixel rectangle, inclusive-exclusive: [x0,x1) x [y0,y1).
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  long long area() const {
    return static_cast<long long>(width()) * height();
  }
  bool valid() const { return x0 < x1 && y0 < y1; }

  bool contains(int x, int y) const {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }

  bool within(int w, int h) const {
    return x0 >= 0 && y0 >= 0 && x1 <= w && y1 <= h && valid();
  }

  Rect intersect(const Rect& o) const {
    Rect r{std::max(x0, o.x0), std::max(y0, o.y0), std::min(x1, o.x1),
           std::min(y1, o.y1)};
    if (!r.valid()) return Rect{};
    return r;
  }

  long long overlap_area(const Rect& o) const {
    return intersect(o).valid() ? intersect(o).area() : 0;
  }

  Rect grown(int m) const { return Rect{x0 - m, y0 - m, x1 + m, y1 + m}; }

  bool operator==(const Rect& o) const = default;
};

}  // namespace scengraph
