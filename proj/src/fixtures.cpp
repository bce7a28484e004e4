#include "scengraph/fixtures.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scengraph/errors.hpp"

namespace fs = std::filesystem;

namespace scengraph::fixtures {

namespace {

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

corpus::TestReport parse_script(const std::string& path,
                                const std::string& apps_dir,
                                std::map<std::string, sim::AppModel>& cache) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open report script " + path);
  corpus::TestReport report;
  std::string line;
  int lineno = 0;
  bool magic = false;
  int next_index = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::string where = path + ":" + std::to_string(lineno);
    std::string t = strip(line);
    if (t.empty() || t.front() == '#') continue;
    if (!magic) {
      if (t != "scenrpt 1") throw Error(where + ": expected 'scenrpt 1'");
      magic = true;
      continue;
    }
    std::size_t colon = t.find(':');
    if (colon == std::string::npos) throw Error(where + ": expected key");
    std::string key = strip(t.substr(0, colon));
    std::string value = strip(t.substr(colon + 1));
    if (key == "id") {
      report.report_id = value;
    } else if (key == "app") {
      report.app_id = value;
    } else if (key == "scenario") {
      report.scenario_id = value;
    } else if (key == "env") {
      std::size_t eq = value.find('=');
      if (eq == std::string::npos) throw Error(where + ": env is key=value");
      report.env.values[strip(value.substr(0, eq))] =
          strip(value.substr(eq + 1));
    } else if (key == "step") {
      std::size_t bar1 = value.find('|');
      std::size_t bar2 =
          bar1 == std::string::npos ? std::string::npos
                                    : value.find('|', bar1 + 1);
      if (bar2 == std::string::npos) {
        throw Error(where + ": step needs index | screen | sentence");
      }
      corpus::ReportStep step;
      step.index = std::stoi(strip(value.substr(0, bar1)));
      if (step.index != next_index) {
        throw Error(where + ": step indices must be 1-based and dense");
      }
      ++next_index;
      std::string screen_ref = strip(value.substr(bar1 + 1, bar2 - bar1 - 1));
      step.text = strip(value.substr(bar2 + 1));
      if (step.text.empty()) throw Error(where + ": empty sentence");
      if (screen_ref != "-") {
        std::size_t sep = screen_ref.find(':');
        if (sep == std::string::npos) {
          throw Error(where + ": screen reference is <app-file>:<screen-id>");
        }
        std::string app_file = screen_ref.substr(0, sep);
        std::string screen_id = screen_ref.substr(sep + 1);
        auto it = cache.find(app_file);
        if (it == cache.end()) {
          it = cache
                   .emplace(app_file,
                            sim::load_app_model(
                                (fs::path(apps_dir) / app_file).string()))
                   .first;
        }
        const sim::Screen* screen = it->second.find_screen(screen_id);
        if (!screen) {
          throw Error(where + ": no screen '" + screen_id + "' in " +
                      app_file);
        }
        step.screen = sim::render(*screen);
      }
      report.steps.push_back(std::move(step));
    } else {
      throw Error(where + ": unknown key '" + key + "'");
    }
  }
  if (report.report_id.empty() || report.scenario_id.empty()) {
    throw Error(path + ": script needs id and scenario");
  }
  return report;
}

}  // namespace

std::vector<corpus::TestReport> materialize_reports(
    const std::string& scripts_dir, const std::string& apps_dir) {
  if (!fs::is_directory(scripts_dir)) {
    throw Error("report script directory not found: " + scripts_dir);
  }
  std::vector<fs::path> scripts;
  for (const auto& entry : fs::directory_iterator(scripts_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".rpt") {
      scripts.push_back(entry.path());
    }
  }
  std::sort(scripts.begin(), scripts.end());
  std::map<std::string, sim::AppModel> cache;
  std::vector<corpus::TestReport> reports;
  for (const auto& script : scripts) {
    reports.push_back(parse_script(script.string(), apps_dir, cache));
  }
  return reports;
}

void materialize_corpus(const std::string& scripts_dir,
                        const std::string& apps_dir,
                        const std::string& out_dir) {
  corpus::save_corpus(materialize_reports(scripts_dir, apps_dir), out_dir);
}

}  // namespace scengraph::fixtures
