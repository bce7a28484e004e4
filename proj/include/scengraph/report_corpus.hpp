#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scengraph/raster.hpp"

namespace scengraph::corpus {

// Device/OS strings carried through from the bundle; informational only.
struct EnvInfo {
  std::map<std::string, std::string> values;

  bool operator==(const EnvInfo&) const = default;
};

// Raster plus sidecar text layer for one step.
struct ScreenBundle {
  screen::ScreenRaster raster;
  std::vector<screen::TextSpan> text_layer;

  bool operator==(const ScreenBundle&) const = default;
};

// One reproduction step: a sentence and, usually, a screenshot bundle.
// Steps that arrived without a screenshot keep screen empty and are
// flagged by validate_report, never dropped.
struct ReportStep {
  int index = 0;  // 1-based, strictly increasing, no gaps
  std::string text;
  std::optional<ScreenBundle> screen;

  bool operator==(const ReportStep&) const = default;
};

struct TestReport {
  std::string report_id;
  std::string app_id;
  std::string scenario_id;
  std::vector<ReportStep> steps;
  EnvInfo env;

  bool operator==(const TestReport&) const = default;
};

enum class WarningKind { kScreenAbsent, kTextBoxOutOfBounds };

struct Warning {
  WarningKind kind;
  int step_index = 0;
  std::string message;
};

// Reads every report bundle under `path` (one subdirectory per report,
// each with a `report.manifest`), sorted by (scenario_id, report_id).
// Malformed bundles raise CorpusFormatError / ReportShapeError.
std::vector<TestReport> load_corpus(const std::string& path);

// Loads a single bundle directory.
TestReport load_report(const std::string& bundle_dir);

// Writes `report` as a bundle directory under `path` (directory named
// after report_id). load_corpus(save_corpus(x)) == x.
void save_corpus(const std::vector<TestReport>& reports,
                 const std::string& path);
void save_report(const TestReport& report, const std::string& bundle_dir);

// Enumerates absent screenshots and out-of-bounds text boxes.
std::vector<Warning> validate_report(const TestReport& report);

}  // namespace scengraph::corpus
