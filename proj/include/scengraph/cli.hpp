#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scengraph/config.hpp"

namespace scengraph::cli {

// Exit-code contract, documented for CI use.
constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitRunAborted = 3;

struct RunConfig {
  std::string corpus;             // report bundle directory
  std::vector<std::string> apps;  // app model files
  std::string scenario;
  std::string graph;              // graph export file
  std::string seeds;              // seed table file
  std::string golden_dir;         // golden ScenOp root (per-app subdirs)
  std::string out;                // output directory (SCENGRAPH_OUT fallback)
  std::string data_dir = "data";  // lexicon/stopwords/operations/...
  double theta = 0.8;
  double merge_threshold = 0.1;
  int step_cap = 200;
  std::uint64_t baseline_seed = 1;
  int baseline_budget = 0;  // 0 disables the baseline comparison
  int jobs = 1;
  bool invalid_inputs = false;
  // fixgen inputs
  std::string report_scripts;
  std::string apps_dir;

  PipelineConfig pipeline() const;
  // Validates paths and threshold ranges; throws UsageError.
  void validate_common() const;
};

int cmd_build_kg(const RunConfig& config);
int cmd_run(const RunConfig& config);
int cmd_eval(const RunConfig& config);
int cmd_fixgen(const RunConfig& config);

}  // namespace scengraph::cli
