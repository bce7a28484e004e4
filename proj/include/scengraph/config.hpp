#pragma once

#include <cstdint>

namespace scengraph {

// Shared pipeline constants. The defaults are the documented contract;
// the CLI exposes the tunable ones as flags.
struct PipelineConfig {
  // Coreference and query matching threshold (shared by text_analysis
  // and ekg).
  double theta = 0.8;

  // Layout row/column merge threshold as a fraction of the screen
  // dimension, clustering on top-left corners.
  double merge_threshold = 0.1;

  // Connected components whose bounding box area falls below this many
  // square pixels are discarded as subtle elements.
  int min_widget_area = 16;

  // Double-threshold hysteresis bounds on the Sobel gradient magnitude.
  int edge_low = 40;
  int edge_high = 100;

  // Detected contour rings extend one pixel beyond the drawn shape on
  // every side; extraction shrinks boxes back by this margin.
  int edge_margin = 1;

  // Side length bound for the small-square classifier rule, as a
  // fraction of min(screen width, screen height).
  double small_square_frac = 0.05;

  // Minimum overlap fraction for attaching a text fragment to a widget.
  double attach_overlap = 0.5;

  // Hard cap on events per sub-scenario during exploration.
  int step_cap = 200;
};

}  // namespace scengraph
