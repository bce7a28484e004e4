#include "scengraph/baseline.hpp"

#include <fstream>
#include <random>

#include "scengraph/errors.hpp"

namespace scengraph::eval {

std::vector<std::string> load_string_pool(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open string pool " + path);
  std::vector<std::string> pool;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    pool.push_back(line);
  }
  if (pool.empty()) throw Error("string pool is empty: " + path);
  return pool;
}

BaselineResult random_baseline(const sim::AppModel& app, int event_budget,
                               std::uint64_t seed,
                               const std::vector<std::string>& string_pool) {
  if (event_budget < 1) throw Error("baseline budget must be at least 1");
  BaselineResult result;
  // mt19937_64 output is pinned by the standard; indexing with modulo
  // keeps draws identical across platforms.
  std::mt19937_64 rng(seed);
  auto draw = [&](std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
  };

  sim::Session session(app);
  int spent = 0;
  while (spent < event_budget) {
    const sim::Screen& screen = session.current_screen();
    // Enumerate every legal (widget, operation) pair on this screen.
    std::vector<std::pair<const sim::SimWidget*, std::string>> legal;
    for (const auto& w : screen.widgets) {
      for (const auto& [op, eff] : w.actions) legal.emplace_back(&w, op);
    }
    if (legal.empty()) break;  // nothing to do on this screen

    auto [widget, op] = legal[draw(legal.size())];
    std::string param;
    if (op == "input" || op == "slide") {
      param = string_pool[draw(string_pool.size())];
    }
    const auto& ev = session.execute_event(widget->widget_id, op, param);
    result.events.push_back(ev);
    ++spent;
    if (session.crashed()) {
      result.bugs_found.insert(*session.crashed());
      session = sim::Session(app);
      ++result.sessions;
    }
  }
  return result;
}

}  // namespace scengraph::eval
