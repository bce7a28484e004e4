#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scengraph/config.hpp"
#include "scengraph/geometry.hpp"
#include "scengraph/raster.hpp"
#include "scengraph/raster_kernels.hpp"

namespace scengraph::screen {

enum class WidgetType {
  kButton,
  kTextField,
  kTextView,
  kImageView,
  kCheckbox,
  kIcon,
  kUnknown,
};

std::string to_string(WidgetType t);
std::optional<WidgetType> widget_type_from_string(const std::string& s);

enum class BorderStyle { kNone, kOutline, kSolid };

enum class BoxSource { kDetected, kDeclared };

// One on-screen widget: geometry plus appearance attributes filled in
// by extraction and classification.
struct WidgetBox {
  Rect bbox;
  WidgetType widget_type = WidgetType::kUnknown;
  std::optional<std::string> text;
  BoxSource source = BoxSource::kDetected;
  BorderStyle border = BorderStyle::kNone;
};

// Nested row/column layout over widget indices.
struct LayoutCell {
  int x0 = 0;
  std::vector<std::size_t> widgets;  // indices into the analyzed box list
};

struct LayoutRow {
  int y0 = 0;
  std::vector<LayoutCell> cells;
};

struct LayoutTree {
  int width = 0;
  int height = 0;
  std::vector<LayoutRow> rows;

  std::size_t leaf_count() const;
  std::string to_text(const std::vector<WidgetBox>& boxes) const;
};

// Sobel gradient magnitude with double-threshold hysteresis.
BinaryMap detect_edges(const ScreenRaster& raster,
                       const PipelineConfig& config = {});

// Edge detection, morphological closing, connected components; returns
// one box per surviving contour, appearance attributes set, types and
// text unset, sorted by (y0, x0).
std::vector<WidgetBox> extract_widgets(const ScreenRaster& raster,
                                       const PipelineConfig& config = {});

// Deterministic heuristic cascade over text overlap, aspect ratio and
// border style. `screen` gives the dimensions for the small-square rule.
WidgetType classify_widget(const WidgetBox& box,
                           const std::vector<TextSpan>& text_layer,
                           int screen_width, int screen_height,
                           const PipelineConfig& config = {});

// Attaches each span to the box with maximal overlap fraction above the
// configured floor (ties to the smaller box); returns the spans that
// attached nowhere.
std::vector<TextSpan> attach_text(std::vector<WidgetBox>& boxes,
                                  const std::vector<TextSpan>& text_layer,
                                  const PipelineConfig& config = {});

// Rows from y0 clustering, then columns from x0 clustering, both with
// single-linkage at merge_threshold x dimension.
LayoutTree characterize_layout(const std::vector<WidgetBox>& boxes,
                               int screen_width, int screen_height,
                               const PipelineConfig& config = {});

// Fully analyzed screen: typed, text-attached widgets sorted by
// (y0, x0), the spans that attached nowhere, and the layout tree.
struct GuiStructure {
  int width = 0;
  int height = 0;
  std::vector<WidgetBox> widgets;
  std::vector<TextSpan> standalone_texts;
  LayoutTree layout;

  bool empty() const { return widgets.empty(); }
};

// Composes extract_widgets, classify_widget, attach_text and
// characterize_layout over one raster + text layer.
GuiStructure analyze_screen(const ScreenRaster& raster,
                            const std::vector<TextSpan>& text_layer,
                            const PipelineConfig& config = {});

// Drawing constants shared with the simulator's renderer. The widget
// drawing rules and the classifier thresholds are co-designed so that
// type recovery on rendered screens is exact; docs/formats.md carries
// the pairing table.
namespace draw {
constexpr std::uint8_t kBackground = 230;
constexpr std::uint8_t kBorder = 40;
constexpr std::uint8_t kButtonFill = 160;
constexpr std::uint8_t kTextFieldFill = 250;
constexpr std::uint8_t kTextViewFill = 200;
constexpr std::uint8_t kImageViewFill = 120;
constexpr std::uint8_t kCheckboxFill = 250;
constexpr std::uint8_t kIconFill = 80;
constexpr int kBorderThickness = 2;

// Detection side of the pairing: ring darker than this is a drawn
// border or solid block; interior contrast splits outline from solid.
constexpr int kRingDarkMax = 120;
constexpr int kOutlineContrastMin = 60;
}  // namespace draw

}  // namespace scengraph::screen
