#include "scengraph/cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "scengraph/baseline.hpp"
#include "scengraph/ekg.hpp"
#include "scengraph/engine.hpp"
#include "scengraph/errors.hpp"
#include "scengraph/fixtures.hpp"
#include "scengraph/metrics.hpp"
#include "scengraph/report_corpus.hpp"

namespace fs = std::filesystem;

namespace scengraph::cli {

namespace {

std::string now_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::shared_ptr<const text::TextAnalyzer> load_analyzer(
    const RunConfig& config) {
  return std::make_shared<text::TextAnalyzer>(
      text::TextAnalyzer::load(config.data_dir));
}

std::string app_stem(const std::string& app_path) {
  return fs::path(app_path).stem().string();
}

}  // namespace

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig p;
  p.theta = theta;
  p.merge_threshold = merge_threshold;
  p.step_cap = step_cap;
  return p;
}

void RunConfig::validate_common() const {
  if (theta < 0.0 || theta > 1.0) {
    throw UsageError("--theta must lie in [0,1]");
  }
  if (merge_threshold < 0.0 || merge_threshold > 1.0) {
    throw UsageError("--merge-threshold must lie in [0,1]");
  }
  if (step_cap < 1) throw UsageError("--step-cap must be positive");
  if (out.empty()) {
    throw UsageError("no output directory: pass --out or set SCENGRAPH_OUT");
  }
  if (!fs::is_directory(data_dir)) {
    throw UsageError("data directory not found: " + data_dir);
  }
}

int cmd_build_kg(const RunConfig& config) {
  config.validate_common();
  auto analyzer = load_analyzer(config);
  auto nouns = ekg::WidgetNounTable::load(config.data_dir +
                                          "/widget_nouns.txt");

  std::vector<corpus::TestReport> reports;
  try {
    reports = corpus::load_corpus(config.corpus);
  } catch (const Error& e) {
    std::cerr << "corpus error: " << e.what() << "\n";
    return kExitInputError;
  }
  if (!config.scenario.empty()) {
    std::erase_if(reports, [&](const corpus::TestReport& r) {
      return r.scenario_id != config.scenario;
    });
  }

  ekg::EkgBuilder builder(analyzer, nouns, config.pipeline());
  ekg::Ekg graph = builder.construct_from_reports(reports);

  std::string scenario =
      graph.scenario_id().empty() ? "empty" : graph.scenario_id();
  write_file(fs::path(config.out) / ("ekg-" + scenario + ".txt"),
             graph.export_structured());
  write_file(fs::path(config.out) / ("ekg-" + scenario + ".dot"),
             graph.export_dot());

  // Construction log: ontology counts in the four-entity /
  // five-relationship layout plus per-step warnings.
  auto counts = graph.ontology_counts();
  std::ostringstream log;
  log << "# generated " << now_timestamp() << "\n";
  log << "scenario,entities,Content,Widget,Operation,Text,"
         "relationships,TXT-TXT,CNT-OPT,CNT-TXT,CNT-WID,CNT-CNT\n";
  log << scenario << ',' << counts["entities"] << ',' << counts["CNT"] << ','
      << counts["WID"] << ',' << counts["OPT"] << ',' << counts["TXT"] << ','
      << counts["relationships"] << ',' << counts["TXT-TXT"] << ','
      << counts["CNT-OPT"] << ',' << counts["CNT-TXT"] << ','
      << counts["CNT-WID"] << ',' << counts["CNT-CNT"] << "\n";
  for (const auto& w : builder.warnings()) {
    log << "warning," << w.report_id << ",step " << w.step_index << ","
        << w.message << "\n";
  }
  write_file(fs::path(config.out) / ("build-log-" + scenario + ".csv"),
             log.str());
  std::cout << log.str();
  return kExitOk;
}

namespace {

struct RunJob {
  std::string app_path;
  engine::ScenarioRunResult result;
  bool aborted = false;
  std::string error;
};

}  // namespace

int cmd_run(const RunConfig& config) {
  config.validate_common();
  if (config.apps.empty()) throw UsageError("--app is required");
  if (config.graph.empty()) throw UsageError("--graph is required");

  auto analyzer = load_analyzer(config);
  auto legality =
      ekg::OpLegality::load(config.data_dir + "/op_legality.txt");
  ekg::Ekg graph = ekg::Ekg::import_structured(read_file(config.graph),
                                               analyzer, config.pipeline());
  engine::SeedTable seeds;
  if (!config.seeds.empty()) seeds = engine::SeedTable::load(config.seeds);

  std::vector<RunJob> jobs(config.apps.size());
  for (std::size_t i = 0; i < config.apps.size(); ++i) {
    jobs[i].app_path = config.apps[i];
  }

  auto worker = [&](RunJob& job) {
    try {
      sim::AppModel app = sim::load_app_model(job.app_path);
      job.result = engine::run_scenario(app, graph, seeds, legality,
                                        config.pipeline(),
                                        config.invalid_inputs);
    } catch (const engine::RunAborted& e) {
      job.result = e.partial_result;
      job.aborted = true;
      job.error = e.what();
    }
  };

  if (config.jobs <= 1 || jobs.size() == 1) {
    for (auto& job : jobs) worker(job);
  } else {
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mu;
    for (int t = 0; t < config.jobs; ++t) {
      pool.emplace_back([&] {
        while (true) {
          std::size_t mine;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= jobs.size()) return;
            mine = next++;
          }
          worker(jobs[mine]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  bool any_aborted = false;
  std::string ts = now_timestamp();
  for (const auto& job : jobs) {
    std::string stem = app_stem(job.app_path);
    std::string scenario = job.result.scenario_id;
    write_file(fs::path(config.out) / ("run-" + stem + "-" + scenario +
                                       ".txt"),
               engine::run_result_to_string(job.result, ts));
    std::ostringstream events;
    for (const auto& run : job.result.runs) {
      for (const auto& ev : run.events) {
        events << sim::to_log_line(ev) << "\n";
      }
    }
    write_file(fs::path(config.out) / ("events-" + stem + "-" + scenario +
                                       ".log"),
               events.str());
    if (job.aborted) {
      any_aborted = true;
      std::cerr << "run aborted: " << job.error << "\n";
    } else {
      std::cout << stem << ": " << job.result.runs.size() << " runs, "
                << job.result.completed() << " completed\n";
    }
  }
  return any_aborted ? kExitRunAborted : kExitOk;
}

int cmd_eval(const RunConfig& config) {
  config.validate_common();
  if (config.apps.empty()) throw UsageError("--app is required");
  if (config.golden_dir.empty()) throw UsageError("--golden is required");

  eval::MetricReport report;
  for (const auto& app_path : config.apps) {
    std::string stem = app_stem(app_path);
    sim::AppModel app = sim::load_app_model(app_path);

    fs::path golden_sub = fs::path(config.golden_dir) / stem;
    if (!fs::is_directory(golden_sub)) {
      std::cerr << "missing goldens for " << stem << " under "
                << config.golden_dir << "\n";
      return kExitInputError;
    }
    std::vector<fs::path> golden_files;
    for (const auto& entry : fs::directory_iterator(golden_sub)) {
      if (entry.path().extension() == ".ops") {
        golden_files.push_back(entry.path());
      }
    }
    std::sort(golden_files.begin(), golden_files.end());
    if (golden_files.empty()) {
      std::cerr << "missing goldens for " << stem << "\n";
      return kExitInputError;
    }
    std::vector<eval::ScenOpSet> goldens;
    for (const auto& f : golden_files) {
      goldens.push_back(eval::load_scen_ops(f.string()));
    }

    fs::path run_file =
        fs::path(config.out) / ("run-" + stem + "-" + config.scenario +
                                ".txt");
    if (!fs::exists(run_file)) {
      std::cerr << "missing run output " << run_file << "\n";
      return kExitInputError;
    }
    auto result = engine::run_result_from_string(read_file(run_file),
                                                 run_file.string());
    report.apps.push_back(eval::evaluate_app(app.app_id, goldens, result));

    for (const auto& run : result.runs) {
      if (run.crash) report.engine_bugs.insert({app.app_id, *run.crash});
    }
    if (config.baseline_budget > 0) {
      auto pool =
          eval::load_string_pool(config.data_dir + "/string_pool.txt");
      auto base = eval::random_baseline(app, config.baseline_budget,
                                        config.baseline_seed, pool);
      for (const auto& bug : base.bugs_found) {
        report.baseline_bugs.insert({app.app_id, bug});
      }
    }
  }
  if (config.baseline_budget > 0) {
    report.bugs = eval::bug_diff(report.engine_bugs, report.baseline_bugs);
  }

  std::string ts = now_timestamp();
  write_file(fs::path(config.out) / "metrics.txt",
             eval::metric_report_to_string(report, ts));
  write_file(fs::path(config.out) / "metrics.csv",
             eval::metric_report_to_csv(report));
  std::cout << eval::metric_report_to_csv(report);
  return kExitOk;
}

int cmd_fixgen(const RunConfig& config) {
  if (config.report_scripts.empty() || config.apps_dir.empty()) {
    throw UsageError("fixgen needs --scripts and --apps-dir");
  }
  if (config.out.empty()) {
    throw UsageError("no output directory: pass --out or set SCENGRAPH_OUT");
  }
  fixtures::materialize_corpus(config.report_scripts, config.apps_dir,
                               config.out);
  std::cout << "corpus written to " << config.out << "\n";
  return kExitOk;
}

}  // namespace scengraph::cli
