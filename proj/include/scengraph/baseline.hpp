#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "scengraph/app_sim.hpp"

namespace scengraph::eval {

struct BaselineResult {
  std::vector<sim::LoggedEvent> events;  // across session restarts
  std::set<std::string> bugs_found;
  int sessions = 1;  // 1 + number of crash restarts
};

// Uniform random exploration with a fixed event budget: at each step one
// (visible widget, legal operation) pair is drawn with the seeded
// generator; input values come from the string pool. A crash records the
// bug and restarts the session. Deterministic given (seed, pool).
BaselineResult random_baseline(const sim::AppModel& app, int event_budget,
                               std::uint64_t seed,
                               const std::vector<std::string>& string_pool);

// One random string per line; checked in so invalid-input behavior is
// reproducible.
std::vector<std::string> load_string_pool(const std::string& path);

}  // namespace scengraph::eval
