#include "scengraph/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "scengraph/errors.hpp"

namespace scengraph::eval {

ScenOpSet load_scen_ops(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open golden file " + path);
  ScenOpSet set;
  std::string line;
  int lineno = 0;
  bool magic = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::string where = path + ":" + std::to_string(lineno);
    if (!magic) {
      if (line != "scenops 1") {
        throw Error(where + ": expected 'scenops 1' header");
      }
      magic = true;
      continue;
    }
    if (line.rfind("sub:", 0) == 0) {
      set.sub_scenario_id = line.substr(4);
      while (!set.sub_scenario_id.empty() &&
             set.sub_scenario_id.front() == ' ') {
        set.sub_scenario_id.erase(set.sub_scenario_id.begin());
      }
      continue;
    }
    if (line.rfind("op:", 0) != 0) {
      throw Error(where + ": expected 'op:' line");
    }
    std::istringstream body(line.substr(3));
    ScenOp op;
    body >> op.widget_id >> op.operation;
    std::string rest;
    std::getline(body, rest);
    std::size_t open = rest.find('"');
    std::size_t close = rest.rfind('"');
    if (open == std::string::npos || close <= open) {
      throw Error(where + ": parameter must be quoted");
    }
    op.parameter = rest.substr(open + 1, close - open - 1);
    set.ops.push_back(std::move(op));
  }
  if (set.sub_scenario_id.empty()) {
    throw Error(path + ": golden file missing 'sub:' id");
  }
  return set;
}

void save_scen_ops(const ScenOpSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write golden file " + path);
  out << "scenops 1\n";
  out << "sub: " << set.sub_scenario_id << "\n";
  for (const auto& op : set.ops) {
    out << "op: " << op.widget_id << ' ' << op.operation << " \""
        << op.parameter << "\"\n";
  }
}

std::size_t matched_prefix(const std::vector<ScenOp>& required,
                           const std::vector<ScenOp>& generated) {
  std::size_t n = 0;
  while (n < required.size() && n < generated.size() &&
         required[n] == generated[n]) {
    ++n;
  }
  return n;
}

double gen_rate(const std::vector<ScenOp>& required,
                const std::vector<ScenOp>& generated) {
  if (required.empty()) throw MetricInputError("required op set is empty");
  return 100.0 * static_cast<double>(matched_prefix(required, generated)) /
         static_cast<double>(required.size());
}

double scen_cov(const std::set<std::string>& all_subs,
                const std::set<std::string>& covered) {
  for (const auto& c : covered) {
    if (!all_subs.count(c)) {
      throw MetricInputError("covered sub-scenario '" + c +
                             "' is not in the full set");
    }
  }
  if (all_subs.empty()) throw MetricInputError("sub-scenario set is empty");
  return 100.0 * static_cast<double>(covered.size()) /
         static_cast<double>(all_subs.size());
}

BugDiff bug_diff(const std::set<BugKey>& engine_bugs,
                 const std::set<BugKey>& baseline_bugs_scoped) {
  BugDiff d;
  for (const auto& b : engine_bugs) {
    if (baseline_bugs_scoped.count(b)) {
      d.both.insert(b);
    } else {
      d.only_engine.insert(b);
    }
  }
  for (const auto& b : baseline_bugs_scoped) {
    if (!engine_bugs.count(b)) d.only_baseline.insert(b);
  }
  return d;
}

std::vector<ScenOp> to_scen_ops(const std::vector<sim::LoggedEvent>& events) {
  std::vector<ScenOp> ops;
  for (const auto& ev : events) {
    ops.push_back(ScenOp{ev.widget_id, ev.operation, ev.parameter});
  }
  return ops;
}

AppEvaluation evaluate_app(const std::string& app_id,
                           const std::vector<ScenOpSet>& goldens,
                           const engine::ScenarioRunResult& result) {
  AppEvaluation eval;
  eval.app_id = app_id;
  if (goldens.empty()) throw MetricInputError("no golden files for " + app_id);

  std::vector<std::vector<ScenOp>> completed;
  for (const auto& run : result.runs) {
    if (run.termination == engine::TerminationCase::kCompleted) {
      completed.push_back(to_scen_ops(run.events));
    }
  }

  std::vector<bool> run_used(completed.size(), false);
  double rate_sum = 0.0;
  for (const auto& golden : goldens) {
    eval.all_subs.insert(golden.sub_scenario_id);
    eval.required_total += golden.ops.size();

    // Pair the golden with the unused completed run matching it best.
    std::size_t best_run = completed.size();
    std::size_t best_match = 0;
    for (std::size_t i = 0; i < completed.size(); ++i) {
      if (run_used[i]) continue;
      std::size_t m = matched_prefix(golden.ops, completed[i]);
      if (best_run == completed.size() || m > best_match) {
        best_run = i;
        best_match = m;
      }
    }
    double rate = 0.0;
    if (best_run < completed.size()) {
      run_used[best_run] = true;
      eval.matched_total += best_match;
      rate = 100.0 * static_cast<double>(best_match) / golden.ops.size();
      if (best_match == golden.ops.size() &&
          completed[best_run].size() == golden.ops.size()) {
        eval.covered.insert(golden.sub_scenario_id);
      }
    }
    rate_sum += rate;
    eval.per_sub_rates.emplace_back(golden.sub_scenario_id, rate);
  }
  eval.gen_rate_event_weighted =
      eval.required_total
          ? 100.0 * static_cast<double>(eval.matched_total) /
                static_cast<double>(eval.required_total)
          : 0.0;
  eval.gen_rate_scenario_averaged = rate_sum / goldens.size();
  eval.scen_cov_percent = scen_cov(eval.all_subs, eval.covered);
  return eval;
}

double MetricReport::aggregate_event_weighted() const {
  std::size_t req = 0;
  std::size_t matched = 0;
  for (const auto& a : apps) {
    req += a.required_total;
    matched += a.matched_total;
  }
  return req ? 100.0 * static_cast<double>(matched) / req : 0.0;
}

double MetricReport::aggregate_scenario_averaged() const {
  if (apps.empty()) return 0.0;
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& a : apps) {
    for (const auto& [sub, rate] : a.per_sub_rates) {
      sum += rate;
      ++n;
    }
  }
  return n ? sum / n : 0.0;
}

namespace {

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void print_bug_set(std::ostringstream& out, const char* name,
                   const std::set<BugKey>& bugs) {
  out << name << ": " << bugs.size();
  for (const auto& [app, bug] : bugs) out << ' ' << app << '/' << bug;
  out << "\n";
}

}  // namespace

std::string metric_report_to_string(const MetricReport& report,
                                    const std::string& timestamp) {
  std::ostringstream out;
  out << "# generated " << timestamp << "\n";
  out << "scenmetrics 1\n";
  for (const auto& a : report.apps) {
    out << "app: " << a.app_id << "\n";
    out << "  required: " << a.required_total << "\n";
    out << "  matched: " << a.matched_total << "\n";
    out << "  gen-rate-event-weighted: " << fmt2(a.gen_rate_event_weighted)
        << "\n";
    out << "  gen-rate-scenario-averaged: "
        << fmt2(a.gen_rate_scenario_averaged) << "\n";
    out << "  scen-cov: " << fmt2(a.scen_cov_percent) << " ("
        << a.covered.size() << "/" << a.all_subs.size() << ")\n";
    for (const auto& [sub, rate] : a.per_sub_rates) {
      out << "  sub: " << sub << " gen-rate=" << fmt2(rate)
          << " covered=" << (a.covered.count(sub) ? 1 : 0) << "\n";
    }
  }
  out << "aggregate-gen-rate-event-weighted: "
      << fmt2(report.aggregate_event_weighted()) << "\n";
  out << "aggregate-gen-rate-scenario-averaged: "
      << fmt2(report.aggregate_scenario_averaged()) << "\n";
  if (report.bugs) {
    print_bug_set(out, "bugs-engine-only", report.bugs->only_engine);
    print_bug_set(out, "bugs-both", report.bugs->both);
    print_bug_set(out, "bugs-baseline-only", report.bugs->only_baseline);
  }
  return out.str();
}

std::string metric_report_to_csv(const MetricReport& report) {
  std::ostringstream out;
  out << "app,required,matched,gen_rate,scen_cov,covered,subs\n";
  for (const auto& a : report.apps) {
    out << a.app_id << ',' << a.required_total << ',' << a.matched_total
        << ',' << fmt2(a.gen_rate_event_weighted) << ','
        << fmt2(a.scen_cov_percent) << ',' << a.covered.size() << ','
        << a.all_subs.size() << "\n";
  }
  return out.str();
}

}  // namespace scengraph::eval
