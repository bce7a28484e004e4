#pragma once

#include <map>
#include <string>
#include <vector>

#include "scengraph/app_sim.hpp"
#include "scengraph/report_corpus.hpp"

namespace scengraph::fixtures {

// Builds report bundles from checked-in report scripts (.rpt) plus app
// models: every referenced screen is rendered into the bundle. The
// output follows the corpus bundle layout exactly and is deterministic.
//
// Script format (docs/formats.md):
//   scenrpt 1
//   id: r01
//   app: app-a
//   scenario: Login
//   env: device=Pixel4
//   step: 1 | app-a.app:s_home | When the app launches, ...
//   step: 2 | - | ...                      (screenshot absent)
std::vector<corpus::TestReport> materialize_reports(
    const std::string& scripts_dir, const std::string& apps_dir);

// materialize_reports + save_corpus into out_dir.
void materialize_corpus(const std::string& scripts_dir,
                        const std::string& apps_dir,
                        const std::string& out_dir);

}  // namespace scengraph::fixtures
