#include "scengraph/screen_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "scengraph/errors.hpp"

namespace scengraph::screen {

std::string to_string(WidgetType t) {
  switch (t) {
    case WidgetType::kButton: return "Button";
    case WidgetType::kTextField: return "TextField";
    case WidgetType::kTextView: return "TextView";
    case WidgetType::kImageView: return "ImageView";
    case WidgetType::kCheckbox: return "Checkbox";
    case WidgetType::kIcon: return "Icon";
    case WidgetType::kUnknown: return "Unknown";
  }
  return "Unknown";
}

std::optional<WidgetType> widget_type_from_string(const std::string& s) {
  if (s == "Button") return WidgetType::kButton;
  if (s == "TextField") return WidgetType::kTextField;
  if (s == "TextView") return WidgetType::kTextView;
  if (s == "ImageView") return WidgetType::kImageView;
  if (s == "Checkbox") return WidgetType::kCheckbox;
  if (s == "Icon") return WidgetType::kIcon;
  if (s == "Unknown") return WidgetType::kUnknown;
  return std::nullopt;
}

BinaryMap detect_edges(const ScreenRaster& raster,
                       const PipelineConfig& config) {
  if (!raster.valid()) throw Error("invalid raster");
  GradientMap grad = sobel_magnitude(raster);
  return hysteresis(grad, config.edge_low, config.edge_high);
}

namespace {

double region_mean(const ScreenRaster& raster, const Rect& r) {
  long long sum = 0;
  long long n = 0;
  for (int y = std::max(0, r.y0); y < std::min(raster.height, r.y1); ++y) {
    for (int x = std::max(0, r.x0); x < std::min(raster.width, r.x1); ++x) {
      sum += raster.at(x, y);
      ++n;
    }
  }
  return n ? static_cast<double>(sum) / n : 0.0;
}

double perimeter_mean(const ScreenRaster& raster, const Rect& r) {
  long long sum = 0;
  long long n = 0;
  auto add = [&](int x, int y) {
    if (x < 0 || x >= raster.width || y < 0 || y >= raster.height) return;
    sum += raster.at(x, y);
    ++n;
  };
  for (int x = r.x0; x < r.x1; ++x) {
    add(x, r.y0);
    add(x, r.y1 - 1);
  }
  for (int y = r.y0 + 1; y < r.y1 - 1; ++y) {
    add(r.x0, y);
    add(r.x1 - 1, y);
  }
  return n ? static_cast<double>(sum) / n : 0.0;
}

BorderStyle border_style_of(const ScreenRaster& raster, const Rect& box) {
  double ring = perimeter_mean(raster, box);
  Rect inner = Rect{box.x0 + 3, box.y0 + 3, box.x1 - 3, box.y1 - 3};
  if (!inner.valid()) {
    inner = Rect{box.x0 + 1, box.y0 + 1, box.x1 - 1, box.y1 - 1};
  }
  if (!inner.valid()) inner = box;
  double interior = region_mean(raster, inner);
  if (ring <= draw::kRingDarkMax) {
    return (interior - ring >= draw::kOutlineContrastMin) ? BorderStyle::kOutline
                                                          : BorderStyle::kSolid;
  }
  return BorderStyle::kNone;
}

}  // namespace

std::vector<WidgetBox> extract_widgets(const ScreenRaster& raster,
                                       const PipelineConfig& config) {
  BinaryMap closed = close3x3(detect_edges(raster, config));

  // Connected components over the closed edge map, 8-connectivity.
  std::vector<int> label(closed.bits.size(), -1);
  std::vector<Rect> boxes;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < closed.height; ++y) {
    for (int x = 0; x < closed.width; ++x) {
      std::size_t idx = static_cast<std::size_t>(y) * closed.width + x;
      if (!closed.bits[idx] || label[idx] >= 0) continue;
      int comp = static_cast<int>(boxes.size());
      Rect box{x, y, x + 1, y + 1};
      label[idx] = comp;
      stack.emplace_back(x, y);
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        box.x0 = std::min(box.x0, cx);
        box.y0 = std::min(box.y0, cy);
        box.x1 = std::max(box.x1, cx + 1);
        box.y1 = std::max(box.y1, cy + 1);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            int nx = cx + dx;
            int ny = cy + dy;
            if (nx < 0 || nx >= closed.width || ny < 0 || ny >= closed.height) {
              continue;
            }
            std::size_t nidx =
                static_cast<std::size_t>(ny) * closed.width + nx;
            if (!closed.bits[nidx] || label[nidx] >= 0) continue;
            label[nidx] = comp;
            stack.emplace_back(nx, ny);
          }
        }
      }
      boxes.push_back(box);
    }
  }

  std::vector<WidgetBox> out;
  for (const auto& ring : boxes) {
    // The gradient ring extends edge_margin past the drawn shape on
    // every side; shrink back to the drawn geometry.
    Rect b = ring.grown(-config.edge_margin);
    b.x0 = std::max(b.x0, 0);
    b.y0 = std::max(b.y0, 0);
    b.x1 = std::min(b.x1, raster.width);
    b.y1 = std::min(b.y1, raster.height);
    if (!b.valid() || b.area() < config.min_widget_area) continue;
    WidgetBox w;
    w.bbox = b;
    w.source = BoxSource::kDetected;
    w.border = border_style_of(raster, b);
    out.push_back(w);
  }
  std::sort(out.begin(), out.end(), [](const WidgetBox& a, const WidgetBox& b) {
    return std::tie(a.bbox.y0, a.bbox.x0) < std::tie(b.bbox.y0, b.bbox.x0);
  });
  return out;
}

WidgetType classify_widget(const WidgetBox& box,
                           const std::vector<TextSpan>& text_layer,
                           int screen_width, int screen_height,
                           const PipelineConfig& config) {
  bool has_text = false;
  for (const auto& span : text_layer) {
    long long overlap = box.bbox.overlap_area(span.box);
    if (span.box.area() > 0 &&
        static_cast<double>(overlap) / span.box.area() >
            config.attach_overlap) {
      has_text = true;
      break;
    }
  }
  double aspect = box.bbox.height() > 0
                      ? static_cast<double>(box.bbox.width()) /
                            box.bbox.height()
                      : 0.0;
  double small_side =
      config.small_square_frac * std::min(screen_width, screen_height);
  bool small_square =
      std::max(box.bbox.width(), box.bbox.height()) <= small_side;

  if (has_text && box.border == BorderStyle::kOutline && aspect > 3.0) {
    return WidgetType::kTextField;
  }
  if (has_text && box.border == BorderStyle::kOutline) {
    return WidgetType::kButton;
  }
  if (has_text && box.border == BorderStyle::kNone) {
    return WidgetType::kTextView;
  }
  if (small_square && box.border != BorderStyle::kNone) {
    return box.border == BorderStyle::kOutline ? WidgetType::kCheckbox
                                               : WidgetType::kIcon;
  }
  if (box.border != BorderStyle::kNone) {
    return WidgetType::kImageView;
  }
  return WidgetType::kUnknown;
}

std::vector<TextSpan> attach_text(std::vector<WidgetBox>& boxes,
                                  const std::vector<TextSpan>& text_layer,
                                  const PipelineConfig& config) {
  std::vector<TextSpan> standalone;
  for (const auto& span : text_layer) {
    if (span.box.area() <= 0) {
      standalone.push_back(span);
      continue;
    }
    std::size_t best = boxes.size();
    double best_frac = config.attach_overlap;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      double frac = static_cast<double>(boxes[i].bbox.overlap_area(span.box)) /
                    span.box.area();
      bool better = frac > best_frac;
      // Tie: prefer the smaller (more specific) box.
      if (frac == best_frac && best < boxes.size() &&
          boxes[i].bbox.area() < boxes[best].bbox.area()) {
        better = true;
      }
      if (better) {
        best = i;
        best_frac = frac;
      }
    }
    if (best == boxes.size()) {
      standalone.push_back(span);
    } else if (!boxes[best].text) {
      boxes[best].text = span.text;
    } else {
      // A box keeps its first span; later overlapping spans remain
      // observable as standalone text.
      standalone.push_back(span);
    }
  }
  return standalone;
}

namespace {

// Single-linkage clustering over sorted coordinate values: a new band
// starts where the gap between consecutive values reaches the threshold.
std::vector<std::vector<std::size_t>> cluster_1d(
    const std::vector<std::pair<int, std::size_t>>& sorted_vals,
    double threshold) {
  std::vector<std::vector<std::size_t>> bands;
  for (std::size_t i = 0; i < sorted_vals.size(); ++i) {
    if (i == 0 ||
        sorted_vals[i].first - sorted_vals[i - 1].first >= threshold) {
      bands.emplace_back();
    }
    bands.back().push_back(sorted_vals[i].second);
  }
  return bands;
}

}  // namespace

LayoutTree characterize_layout(const std::vector<WidgetBox>& boxes,
                               int screen_width, int screen_height,
                               const PipelineConfig& config) {
  LayoutTree tree;
  tree.width = screen_width;
  tree.height = screen_height;

  std::vector<std::pair<int, std::size_t>> ys;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    ys.emplace_back(boxes[i].bbox.y0, i);
  }
  std::sort(ys.begin(), ys.end());

  double y_thresh = config.merge_threshold * screen_height;
  for (auto& band : cluster_1d(ys, y_thresh)) {
    LayoutRow row;
    row.y0 = boxes[band.front()].bbox.y0;
    std::vector<std::pair<int, std::size_t>> xs;
    for (auto idx : band) xs.emplace_back(boxes[idx].bbox.x0, idx);
    std::sort(xs.begin(), xs.end());
    double x_thresh = config.merge_threshold * screen_width;
    for (auto& col : cluster_1d(xs, x_thresh)) {
      LayoutCell cell;
      cell.x0 = boxes[col.front()].bbox.x0;
      std::sort(col.begin(), col.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(boxes[a].bbox.y0, boxes[a].bbox.x0, a) <
               std::tie(boxes[b].bbox.y0, boxes[b].bbox.x0, b);
      });
      cell.widgets = std::move(col);
      row.cells.push_back(std::move(cell));
    }
    tree.rows.push_back(std::move(row));
  }
  return tree;
}

GuiStructure analyze_screen(const ScreenRaster& raster,
                            const std::vector<TextSpan>& text_layer,
                            const PipelineConfig& config) {
  GuiStructure s;
  s.width = raster.width;
  s.height = raster.height;
  s.widgets = extract_widgets(raster, config);
  for (auto& w : s.widgets) {
    w.widget_type =
        classify_widget(w, text_layer, raster.width, raster.height, config);
  }
  s.standalone_texts = attach_text(s.widgets, text_layer, config);
  s.layout = characterize_layout(s.widgets, raster.width, raster.height,
                                 config);
  return s;
}

std::size_t LayoutTree::leaf_count() const {
  std::size_t n = 0;
  for (const auto& row : rows) {
    for (const auto& cell : row.cells) n += cell.widgets.size();
  }
  return n;
}

std::string LayoutTree::to_text(const std::vector<WidgetBox>& boxes) const {
  std::ostringstream out;
  out << "screen " << width << "x" << height << "\n";
  for (const auto& row : rows) {
    out << "  row y0=" << row.y0 << "\n";
    for (const auto& cell : row.cells) {
      out << "    col x0=" << cell.x0 << "\n";
      for (auto idx : cell.widgets) {
        const auto& w = boxes[idx];
        out << "      " << to_string(w.widget_type) << " [" << w.bbox.x0 << ","
            << w.bbox.y0 << "," << w.bbox.x1 << "," << w.bbox.y1 << "]";
        if (w.text) out << " \"" << *w.text << "\"";
        out << "\n";
      }
    }
  }
  return out.str();
}

}  // namespace scengraph::screen
