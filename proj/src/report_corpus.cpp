#include "scengraph/report_corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scengraph/errors.hpp"

namespace fs = std::filesystem;

namespace scengraph::corpus {

namespace {

constexpr const char* kManifestName = "report.manifest";
constexpr const char* kMagic = "scenreport 1";

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct StepLine {
  int index;
  std::string raster_file;
  std::string layer_file;
  std::string sentence;
};

StepLine parse_step_line(const std::string& body, const std::string& where) {
  // <index> | <raster|-> | <layer|-> | <sentence>
  std::vector<std::string> parts;
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    std::size_t bar = body.find('|', pos);
    if (bar == std::string::npos) {
      throw CorpusFormatError(where + ": step line needs four fields");
    }
    parts.push_back(strip(body.substr(pos, bar - pos)));
    pos = bar + 1;
  }
  parts.push_back(strip(body.substr(pos)));
  StepLine out;
  try {
    out.index = std::stoi(parts[0]);
  } catch (const std::exception&) {
    throw CorpusFormatError(where + ": bad step index '" + parts[0] + "'");
  }
  out.raster_file = parts[1];
  out.layer_file = parts[2];
  out.sentence = parts[3];
  return out;
}

}  // namespace

TestReport load_report(const std::string& bundle_dir) {
  fs::path dir(bundle_dir);
  fs::path manifest = dir / kManifestName;
  if (!fs::exists(manifest)) {
    throw CorpusFormatError("missing manifest: " + manifest.string());
  }
  std::ifstream in(manifest);
  if (!in) throw CorpusFormatError("cannot open " + manifest.string());

  TestReport report;
  std::string line;
  int lineno = 0;
  bool magic_seen = false;
  int prev_index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string where = manifest.string() + ":" + std::to_string(lineno);
    std::string trimmed = strip(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (!magic_seen) {
      if (trimmed != kMagic) {
        throw CorpusFormatError(where + ": expected '" + kMagic + "' header");
      }
      magic_seen = true;
      continue;
    }
    std::size_t colon = trimmed.find(':');
    if (colon == std::string::npos) {
      throw CorpusFormatError(where + ": expected 'key: value'");
    }
    std::string key = strip(trimmed.substr(0, colon));
    std::string value = strip(trimmed.substr(colon + 1));
    if (key == "id") {
      report.report_id = value;
    } else if (key == "app") {
      report.app_id = value;
    } else if (key == "scenario") {
      report.scenario_id = value;
    } else if (key == "env") {
      std::size_t eq = value.find('=');
      if (eq == std::string::npos) {
        throw CorpusFormatError(where + ": env entries are key=value");
      }
      report.env.values[strip(value.substr(0, eq))] =
          strip(value.substr(eq + 1));
    } else if (key == "step") {
      StepLine sl = parse_step_line(value, where);
      if (sl.index != prev_index + 1) {
        throw ReportShapeError(where + ": step index " +
                               std::to_string(sl.index) + " after " +
                               std::to_string(prev_index) +
                               " (1-based, no gaps)");
      }
      prev_index = sl.index;
      if (sl.sentence.empty()) {
        throw ReportShapeError(where + ": empty step sentence");
      }
      ReportStep step;
      step.index = sl.index;
      step.text = sl.sentence;
      if (sl.raster_file != "-") {
        if (sl.layer_file == "-") {
          throw CorpusFormatError(where + ": raster without text layer");
        }
        ScreenBundle bundle;
        bundle.raster = screen::read_pgm((dir / sl.raster_file).string());
        bundle.text_layer =
            screen::read_text_layer((dir / sl.layer_file).string());
        step.screen = std::move(bundle);
      }
      report.steps.push_back(std::move(step));
    } else {
      throw CorpusFormatError(where + ": unknown key '" + key + "'");
    }
  }
  if (!magic_seen) {
    throw CorpusFormatError(manifest.string() + ": empty manifest");
  }
  if (report.report_id.empty()) {
    throw CorpusFormatError(manifest.string() + ": missing report id");
  }
  if (report.scenario_id.empty()) {
    throw ReportShapeError(manifest.string() + ": scenario id is empty");
  }
  return report;
}

std::vector<TestReport> load_corpus(const std::string& path) {
  if (!fs::exists(path) || !fs::is_directory(path)) {
    throw CorpusFormatError("corpus directory not readable: " + path);
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<TestReport> reports;
  for (const auto& d : dirs) {
    reports.push_back(load_report(d.string()));
  }
  std::sort(reports.begin(), reports.end(),
            [](const TestReport& a, const TestReport& b) {
              return std::tie(a.scenario_id, a.report_id) <
                     std::tie(b.scenario_id, b.report_id);
            });
  return reports;
}

void save_report(const TestReport& report, const std::string& bundle_dir) {
  fs::path dir(bundle_dir);
  fs::create_directories(dir);
  std::ostringstream manifest;
  manifest << kMagic << "\n";
  manifest << "id: " << report.report_id << "\n";
  manifest << "app: " << report.app_id << "\n";
  manifest << "scenario: " << report.scenario_id << "\n";
  for (const auto& [k, v] : report.env.values) {
    manifest << "env: " << k << "=" << v << "\n";
  }
  for (const auto& step : report.steps) {
    std::string raster_file = "-";
    std::string layer_file = "-";
    if (step.screen) {
      raster_file = "step" + std::to_string(step.index) + ".pgm";
      layer_file = "step" + std::to_string(step.index) + ".txt";
      screen::write_pgm(step.screen->raster, (dir / raster_file).string());
      screen::write_text_layer(step.screen->text_layer,
                               (dir / layer_file).string());
    }
    manifest << "step: " << step.index << " | " << raster_file << " | "
             << layer_file << " | " << step.text << "\n";
  }
  std::ofstream out(dir / kManifestName);
  if (!out) throw Error("cannot write manifest in " + bundle_dir);
  out << manifest.str();
}

void save_corpus(const std::vector<TestReport>& reports,
                 const std::string& path) {
  fs::create_directories(path);
  for (const auto& r : reports) {
    save_report(r, (fs::path(path) / r.report_id).string());
  }
}

std::vector<Warning> validate_report(const TestReport& report) {
  std::vector<Warning> warnings;
  for (const auto& step : report.steps) {
    if (!step.screen) {
      warnings.push_back(Warning{WarningKind::kScreenAbsent, step.index,
                                 "step " + std::to_string(step.index) +
                                     " has no screenshot"});
      continue;
    }
    const auto& bundle = *step.screen;
    for (const auto& span : bundle.text_layer) {
      if (!span.box.within(bundle.raster.width, bundle.raster.height)) {
        std::ostringstream msg;
        msg << "step " << step.index << " text box \"" << span.text << "\" ["
            << span.box.x0 << "," << span.box.y0 << "," << span.box.x1 << ","
            << span.box.y1 << "] exceeds raster " << bundle.raster.width << "x"
            << bundle.raster.height;
        warnings.push_back(
            Warning{WarningKind::kTextBoxOutOfBounds, step.index, msg.str()});
      }
    }
  }
  return warnings;
}

}  // namespace scengraph::corpus
