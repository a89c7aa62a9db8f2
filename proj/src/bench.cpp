#include "pushplan/bench.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "json.hpp"

namespace pushplan {

using nlohmann::json;

std::vector<Mode> all_modes() {
  return {{Algorithm::rrt, true}, {Algorithm::rrt, false}, {Algorithm::kpiece, true}, {Algorithm::kpiece, false}};
}

const ModeAggregate* BenchReport::aggregate_for(const Mode& m) const {
  for (const ModeAggregate& a : aggregates)
    if (a.mode == m) return &a;
  return nullptr;
}

const TimeRatio* BenchReport::ratio_for(Algorithm alg) const {
  for (const TimeRatio& r : ratios)
    if (r.algorithm == alg) return &r;
  return nullptr;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

void summarize(BenchReport& report) {
  report.aggregates.clear();
  report.ratios.clear();
  std::vector<Mode> modes;
  for (const RunRecord& r : report.records)
    if (std::find(modes.begin(), modes.end(), r.mode()) == modes.end()) modes.push_back(r.mode());

  for (const Mode& m : modes) {
    ModeAggregate a;
    a.mode = m;
    std::vector<double> times, iters;
    for (const RunRecord& r : report.records) {
      if (r.mode() != m) continue;
      ++a.runs;
      if (r.solved) {
        ++a.solved;
        times.push_back(r.wall_time_s);
      } else {
        ++a.censored;
        times.push_back(report.t_max);
      }
      iters.push_back(static_cast<double>(r.iterations));
    }
    a.success_rate = static_cast<double>(a.solved) / static_cast<double>(a.runs);
    a.median_time_s = quantile(times, 0.5);
    a.q1_time_s = quantile(times, 0.25);
    a.q3_time_s = quantile(times, 0.75);
    a.median_iterations = quantile(iters, 0.5);
    report.aggregates.push_back(a);
  }

  for (Algorithm alg : {Algorithm::rrt, Algorithm::kpiece}) {
    const ModeAggregate* on = report.aggregate_for({alg, true});
    const ModeAggregate* off = report.aggregate_for({alg, false});
    if (!on || !off || on->median_time_s <= 0.0) continue;
    report.ratios.push_back({alg, off->median_time_s / on->median_time_s, on->censored + off->censored > 0});
  }
}

RunRecord make_record(const PlannerConfig& config, const PlanResult& result) {
  RunRecord r;
  r.algorithm = config.algorithm;
  r.knowledge_enabled = config.knowledge_enabled;
  r.seed = config.seed;
  r.solved = result.stats.solved;
  r.wall_time_s = std::round(result.stats.wall_time_s * 1000.0) / 1000.0;
  r.iterations = result.stats.iterations;
  r.rejected_transitions = result.stats.rejected_transitions;
  r.path_length_states = result.path ? result.path->states.size() : 0;
  return r;
}

RunRecord run_once(const KnowledgeBase& kb, const Scene& scene, const PlannerConfig& config,
                   std::optional<Path>* path_out) {
  PlanResult res = plan(kb, scene.world, config);
  const RunRecord r = make_record(config, res);
  if (path_out) *path_out = std::move(res.path);
  return r;
}

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PUSHPLAN_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1, omp_get_max_threads());
}

namespace {

struct Job {
  Mode mode;
  std::uint64_t seed;
};

std::vector<Job> make_jobs(const std::vector<std::uint64_t>& seeds, const std::vector<Mode>& modes) {
  std::vector<Job> jobs;
  for (const Mode& m : modes)
    for (std::uint64_t s : seeds) jobs.push_back({m, s});
  return jobs;
}

PlannerConfig config_for(const PlannerConfig& base, const Job& job) {
  PlannerConfig c = base;
  c.algorithm = job.mode.algorithm;
  c.knowledge_enabled = job.mode.knowledge_enabled;
  c.seed = job.seed;
  return c;
}

BenchReport finish(std::vector<RunRecord> records, std::vector<std::optional<Path>> paths, double t_max,
                   bool keep_paths) {
  BenchReport report;
  report.t_max = t_max;
  report.records = std::move(records);
  if (keep_paths) report.paths = std::move(paths);
  summarize(report);
  return report;
}

}  // namespace

BenchReport run_benchmark(const Scene& scene, const AbstractKnowledge& k, const PlannerConfig& base,
                          const std::vector<std::uint64_t>& seeds, const std::vector<Mode>& modes,
                          const BenchOptions& options) {
  const KnowledgeBase kb(k, scene.world, scene.room);
  const std::vector<Job> jobs = make_jobs(seeds, modes);
  std::vector<RunRecord> records(jobs.size());
  std::vector<std::optional<Path>> paths(jobs.size());
  const int threads = worker_count(options.threads);
  const auto n = static_cast<long>(jobs.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    records[idx] = run_once(kb, scene, config_for(base, jobs[idx]), options.keep_paths ? &paths[idx] : nullptr);
  }
  return finish(std::move(records), std::move(paths), base.t_max, options.keep_paths);
}

BenchReport run_benchmark_serial(const Scene& scene, const AbstractKnowledge& k, const PlannerConfig& base,
                                 const std::vector<std::uint64_t>& seeds, const std::vector<Mode>& modes,
                                 bool keep_paths) {
  const KnowledgeBase kb(k, scene.world, scene.room);
  const std::vector<Job> jobs = make_jobs(seeds, modes);
  std::vector<RunRecord> records;
  std::vector<std::optional<Path>> paths(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i)
    records.push_back(run_once(kb, scene, config_for(base, jobs[i]), keep_paths ? &paths[i] : nullptr));
  return finish(std::move(records), std::move(paths), base.t_max, keep_paths);
}

std::string record_to_json(const RunRecord& r) {
  json j;
  j["algorithm"] = to_string(r.algorithm);
  j["knowledge_enabled"] = r.knowledge_enabled;
  j["seed"] = r.seed;
  j["solved"] = r.solved;
  j["wall_time_s"] = r.wall_time_s;
  j["iterations"] = r.iterations;
  j["rejected_transitions"] = r.rejected_transitions;
  j["path_length_states"] = r.path_length_states;
  return j.dump();
}

RunRecord record_from_json(const std::string& line) {
  const json j = json::parse(line);
  RunRecord r;
  r.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  r.knowledge_enabled = j.at("knowledge_enabled").get<bool>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.solved = j.at("solved").get<bool>();
  r.wall_time_s = j.at("wall_time_s").get<double>();
  r.iterations = j.at("iterations").get<std::uint64_t>();
  r.rejected_transitions = j.at("rejected_transitions").get<std::uint64_t>();
  r.path_length_states = j.at("path_length_states").get<std::size_t>();
  return r;
}

std::string report_to_jsonl(const BenchReport& report) {
  std::ostringstream out;
  for (const RunRecord& r : report.records) out << record_to_json(r) << '\n';
  for (const ModeAggregate& a : report.aggregates) {
    json j;
    j["aggregate"] = {{"algorithm", to_string(a.mode.algorithm)},
                      {"knowledge_enabled", a.mode.knowledge_enabled},
                      {"runs", a.runs},
                      {"success_rate", a.success_rate},
                      {"median_wall_time_s", a.median_time_s},
                      {"iqr_wall_time_s", {a.q1_time_s, a.q3_time_s}},
                      {"median_iterations", a.median_iterations},
                      {"censored", a.censored},
                      {"t_max", report.t_max}};
    out << j.dump() << '\n';
  }
  for (const TimeRatio& r : report.ratios) {
    json j;
    j["ratio"] = {{"algorithm", to_string(r.algorithm)},
                  {"ratio_without_over_with", r.ratio},
                  {"censored", r.censored}};
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace pushplan
