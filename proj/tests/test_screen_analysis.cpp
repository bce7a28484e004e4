#include "scengraph/screen_analysis.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "scengraph/errors.hpp"

using namespace scengraph;
using namespace scengraph::screen;

namespace {

// Test-side drawing: the expected geometry is exactly where these draw.
void draw_outlined(ScreenRaster& r, const Rect& box, std::uint8_t fill,
                   std::uint8_t border, int thickness = 2) {
  r.fill_rect(box, fill);
  r.draw_border(box, thickness, border);
}

ScreenRaster blank(int w, int h) { return ScreenRaster(w, h, 230); }

bool within_one(const Rect& a, const Rect& b) {
  return std::abs(a.x0 - b.x0) <= 1 && std::abs(a.y0 - b.y0) <= 1 &&
         std::abs(a.x1 - b.x1) <= 1 && std::abs(a.y1 - b.y1) <= 1;
}

}  // namespace

TEST_CASE("detect_edges on uniform raster is all zero") {
  auto edges = detect_edges(blank(40, 30));
  for (auto b : edges.bits) CHECK(b == 0);
}

TEST_CASE("detect_edges marks a drawn rectangle ring within one pixel") {
  auto r = blank(60, 40);
  Rect box{10, 8, 30, 18};  // 20x10
  r.draw_border(box, 1, 40);
  auto edges = detect_edges(r);

  auto on_ring = [&](int x, int y) {
    bool in_outer = x >= box.x0 && x < box.x1 && y >= box.y0 && y < box.y1;
    bool in_inner =
        x >= box.x0 + 1 && x < box.x1 - 1 && y >= box.y0 + 1 && y < box.y1 - 1;
    return in_outer && !in_inner;
  };
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      bool near_ring = false;
      for (int dy = -1; dy <= 1 && !near_ring; ++dy) {
        for (int dx = -1; dx <= 1 && !near_ring; ++dx) {
          if (on_ring(x + dx, y + dy)) near_ring = true;
        }
      }
      if (edges.at(x, y)) {
        CHECK(near_ring);  // every edge pixel hugs the drawn ring
      }
      if (on_ring(x, y)) {
        CHECK(edges.at(x, y));  // every ring pixel is detected
      }
    }
  }
}

TEST_CASE("detect_edges shows two rings for nested rectangles") {
  auto r = blank(80, 60);
  r.draw_border(Rect{10, 10, 70, 50}, 1, 40);
  r.draw_border(Rect{25, 22, 55, 38}, 1, 40);
  auto edges = detect_edges(r);
  bool outer_hit = edges.at(10, 30) || edges.at(9, 30);
  bool inner_hit = edges.at(25, 30) || edges.at(24, 30);
  bool gap_clear = !edges.at(18, 30);
  CHECK(outer_hit);
  CHECK(inner_hit);
  CHECK(gap_clear);
}

TEST_CASE("extract_widgets on uniform raster is empty") {
  CHECK(extract_widgets(blank(50, 50)).empty());
}

TEST_CASE("extract_widgets recovers drawn boxes and filters specks") {
  auto r = blank(120, 200);
  Rect b1{10, 10, 60, 26};    // outlined
  Rect b2{10, 60, 110, 76};   // outlined, wide
  Rect b3{20, 120, 52, 136};  // borderless fill block
  draw_outlined(r, b1, 160, 40);
  draw_outlined(r, b2, 250, 40);
  r.fill_rect(b3, 200);
  // A 2x2 speck that the area floor must eliminate.
  r.fill_rect(Rect{100, 180, 102, 182}, 40);

  auto boxes = extract_widgets(r);
  REQUIRE(boxes.size() == 3);
  CHECK(boxes[0].bbox == b1);
  CHECK(boxes[1].bbox == b2);
  CHECK(boxes[2].bbox == b3);
  CHECK(boxes[0].border == BorderStyle::kOutline);
  CHECK(boxes[1].border == BorderStyle::kOutline);
  CHECK(boxes[2].border == BorderStyle::kNone);
  for (const auto& b : boxes) {
    CHECK(b.source == BoxSource::kDetected);
    CHECK(b.widget_type == WidgetType::kUnknown);
    CHECK_FALSE(b.text.has_value());
  }
}

TEST_CASE("extract_widgets detects solid blocks with solid border style") {
  auto r = blank(100, 100);
  Rect icon{20, 20, 38, 38};
  r.fill_rect(icon, 80);
  auto boxes = extract_widgets(r);
  REQUIRE(boxes.size() == 1);
  CHECK(within_one(boxes[0].bbox, icon));
  CHECK(boxes[0].border == BorderStyle::kSolid);
}

TEST_CASE("classify_widget rule cascade") {
  PipelineConfig config;
  int W = 360;
  int H = 640;

  auto box_with = [](Rect r, BorderStyle s) {
    WidgetBox b;
    b.bbox = r;
    b.border = s;
    return b;
  };
  auto span_inside = [](const Rect& r) {
    return TextSpan{"label", Rect{r.x0 + 4, r.y0 + 4, r.x0 + 10, r.y0 + 8}};
  };

  // Borderless text box -> TextView.
  {
    auto b = box_with(Rect{10, 10, 90, 30}, BorderStyle::kNone);
    std::vector<TextSpan> layer{span_inside(b.bbox)};
    CHECK(classify_widget(b, layer, W, H, config) == WidgetType::kTextView);
  }
  // Bordered wide box with placeholder text -> TextField.
  {
    auto b = box_with(Rect{10, 10, 150, 40}, BorderStyle::kOutline);
    std::vector<TextSpan> layer{TextSpan{"Email", Rect{14, 14, 40, 24}}};
    CHECK(classify_widget(b, layer, W, H, config) == WidgetType::kTextField);
  }
  // Bordered box, aspect 2.5, labeled -> Button.
  {
    auto b = box_with(Rect{10, 10, 60, 30}, BorderStyle::kOutline);
    std::vector<TextSpan> layer{span_inside(b.bbox)};
    CHECK(classify_widget(b, layer, W, H, config) == WidgetType::kButton);
  }
  // Small squares: outline -> Checkbox, solid -> Icon (even when labeled).
  {
    auto cb = box_with(Rect{10, 10, 26, 26}, BorderStyle::kOutline);
    CHECK(classify_widget(cb, {}, W, H, config) == WidgetType::kCheckbox);
    auto ic = box_with(Rect{10, 10, 28, 28}, BorderStyle::kSolid);
    std::vector<TextSpan> layer{span_inside(ic.bbox)};
    CHECK(classify_widget(ic, layer, W, H, config) == WidgetType::kIcon);
  }
  // No text, not small, visible content -> ImageView.
  {
    auto b = box_with(Rect{10, 10, 120, 90}, BorderStyle::kOutline);
    CHECK(classify_widget(b, {}, W, H, config) == WidgetType::kImageView);
  }
  // No cues at all -> Unknown.
  {
    auto b = box_with(Rect{10, 10, 120, 90}, BorderStyle::kNone);
    CHECK(classify_widget(b, {}, W, H, config) == WidgetType::kUnknown);
  }
}

TEST_CASE("attach_text containment, standalone, and majority overlap") {
  std::vector<WidgetBox> boxes(2);
  boxes[0].bbox = Rect{10, 10, 60, 30};
  boxes[1].bbox = Rect{70, 10, 120, 30};

  std::vector<TextSpan> layer{
      TextSpan{"inside", Rect{20, 15, 40, 25}},
      TextSpan{"No Account yet? Create one", Rect{10, 50, 120, 60}},
      // Straddle across the gap: 8 of 20 columns over box 1, 2 over box 0.
      TextSpan{"straddle", Rect{58, 12, 78, 22}},
  };
  auto standalone = attach_text(boxes, layer);
  REQUIRE(standalone.size() == 1);
  CHECK(standalone[0].text == "No Account yet? Create one");
  CHECK(boxes[0].text == "inside");
  CHECK(boxes[1].text == "straddle");
}

TEST_CASE("attach_text overlap tie goes to the smaller box") {
  std::vector<WidgetBox> boxes(2);
  boxes[0].bbox = Rect{0, 0, 100, 40};
  boxes[1].bbox = Rect{10, 5, 60, 35};  // nested, smaller
  std::vector<TextSpan> layer{TextSpan{"t", Rect{20, 10, 40, 20}}};
  attach_text(boxes, layer);
  CHECK_FALSE(boxes[0].text.has_value());
  CHECK(boxes[1].text == "t");
}

TEST_CASE("characterize_layout bands and cells") {
  PipelineConfig config;
  int W = 200;
  int H = 100;

  auto make = [](int x0, int y0) {
    WidgetBox b;
    b.bbox = Rect{x0, y0, x0 + 20, y0 + 10};
    return b;
  };

  SUBCASE("single widget") {
    std::vector<WidgetBox> boxes{make(10, 10)};
    auto tree = characterize_layout(boxes, W, H, config);
    REQUIRE(tree.rows.size() == 1);
    REQUIRE(tree.rows[0].cells.size() == 1);
    CHECK(tree.leaf_count() == 1);
  }

  SUBCASE("y0 delta under the threshold shares a band") {
    // 0.05 x height = 5 < 10 = threshold.
    std::vector<WidgetBox> boxes{make(10, 20), make(100, 25)};
    auto tree = characterize_layout(boxes, W, H, config);
    CHECK(tree.rows.size() == 1);
    CHECK(tree.rows[0].cells.size() == 2);
  }

  SUBCASE("2x2 grid with 0.3-dimension spacing") {
    std::vector<WidgetBox> boxes{make(10, 10), make(70, 10), make(10, 40),
                                 make(70, 40)};
    auto tree = characterize_layout(boxes, W, H, config);
    REQUIRE(tree.rows.size() == 2);
    CHECK(tree.rows[0].cells.size() == 2);
    CHECK(tree.rows[1].cells.size() == 2);
    CHECK(tree.leaf_count() == 4);
  }
}

TEST_CASE("layout properties: permutation invariance and monotonicity") {
  std::mt19937 rng(11);
  int W = 360;
  int H = 640;
  for (int round = 0; round < 50; ++round) {
    std::vector<WidgetBox> boxes;
    std::set<std::pair<int, int>> used;
    int n = 2 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      int x0 = static_cast<int>(rng() % 300);
      int y0 = static_cast<int>(rng() % 600);
      if (!used.insert({y0, x0}).second) continue;
      WidgetBox b;
      b.bbox = Rect{x0, y0, x0 + 20, y0 + 12};
      boxes.push_back(b);
    }

    PipelineConfig config;
    auto tree = characterize_layout(boxes, W, H, config);

    std::vector<int> seen(boxes.size(), 0);
    for (const auto& row : tree.rows) {
      for (const auto& cell : row.cells) {
        for (auto idx : cell.widgets) seen[idx]++;
      }
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));

    for (std::size_t i = 1; i < tree.rows.size(); ++i) {
      CHECK(tree.rows[i].y0 > tree.rows[i - 1].y0);
    }

    auto shuffled = boxes;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto tree2 = characterize_layout(shuffled, W, H, config);
    CHECK(tree.to_text(boxes) == tree2.to_text(shuffled));

    PipelineConfig wider = config;
    wider.merge_threshold = 0.25;
    auto tree3 = characterize_layout(boxes, W, H, wider);
    CHECK(tree3.rows.size() <= tree.rows.size());
  }
}

TEST_CASE("analyze_screen composes the stages") {
  auto r = blank(200, 120);
  Rect field{20, 20, 140, 44};
  draw_outlined(r, field, 250, 40);
  std::vector<TextSpan> layer{TextSpan{"Email", Rect{30, 28, 60, 38}},
                              TextSpan{"floating", Rect{20, 90, 80, 100}}};
  auto s = analyze_screen(r, layer);
  REQUIRE(s.widgets.size() == 1);
  CHECK(s.widgets[0].widget_type == WidgetType::kTextField);
  CHECK(s.widgets[0].text == "Email");
  REQUIRE(s.standalone_texts.size() == 1);
  CHECK(s.standalone_texts[0].text == "floating");
  CHECK(s.layout.leaf_count() == 1);
}
