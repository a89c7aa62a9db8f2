#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pushplan/planners.hpp"
#include "pushplan/scene.hpp"

namespace pushplan {

struct Mode {
  Algorithm algorithm = Algorithm::rrt;
  bool knowledge_enabled = true;
  friend bool operator==(const Mode&, const Mode&) = default;
};

/// The four combinations of {rrt, kpiece} x {knowledge on, off}.
std::vector<Mode> all_modes();

/// One planner run, as written to report files.
struct RunRecord {
  Algorithm algorithm = Algorithm::rrt;
  bool knowledge_enabled = true;
  std::uint64_t seed = 0;
  bool solved = false;
  double wall_time_s = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t rejected_transitions = 0;
  std::size_t path_length_states = 0;

  Mode mode() const { return {algorithm, knowledge_enabled}; }
};

struct ModeAggregate {
  Mode mode;
  std::size_t runs = 0;
  std::size_t solved = 0;
  double success_rate = 0.0;
  /// Wall-time statistics with unsolved runs counted at t_max.
  double median_time_s = 0.0;
  double q1_time_s = 0.0;
  double q3_time_s = 0.0;
  double median_iterations = 0.0;
  std::size_t censored = 0;
};

struct TimeRatio {
  Algorithm algorithm = Algorithm::rrt;
  /// median(knowledge off) / median(knowledge on)
  double ratio = 0.0;
  bool censored = false;
};

struct BenchReport {
  double t_max = 0.0;
  std::vector<RunRecord> records;
  std::vector<ModeAggregate> aggregates;
  std::vector<TimeRatio> ratios;
  /// Solution paths in record order; filled only when requested.
  std::vector<std::optional<Path>> paths;

  const ModeAggregate* aggregate_for(const Mode& m) const;
  const TimeRatio* ratio_for(Algorithm a) const;
};

struct BenchOptions {
  /// Worker count; 0 reads PUSHPLAN_THREADS and otherwise uses the OpenMP default.
  int threads = 0;
  bool keep_paths = false;
};

/// Median with linear interpolation between order statistics (type 7 for
/// quantiles).
double quantile(std::vector<double> values, double q);

/// Aggregates and ratios recomputed from raw records alone.
void summarize(BenchReport& report);

RunRecord make_record(const PlannerConfig& config, const PlanResult& result);

RunRecord run_once(const KnowledgeBase& kb, const Scene& scene, const PlannerConfig& config,
                   std::optional<Path>* path_out = nullptr);

/// Runs every (mode, seed) pair, spreading runs across an OpenMP worker pool.
/// Records are ordered mode-major, seed-minor regardless of scheduling.
BenchReport run_benchmark(const Scene& scene, const AbstractKnowledge& k, const PlannerConfig& base,
                          const std::vector<std::uint64_t>& seeds, const std::vector<Mode>& modes,
                          const BenchOptions& options = {});

/// Single-threaded reference for run_benchmark.
BenchReport run_benchmark_serial(const Scene& scene, const AbstractKnowledge& k, const PlannerConfig& base,
                                 const std::vector<std::uint64_t>& seeds, const std::vector<Mode>& modes,
                                 bool keep_paths = false);

int worker_count(int requested);

std::string record_to_json(const RunRecord& r);
RunRecord record_from_json(const std::string& line);
/// Records, then one line per aggregate, then one per ratio.
std::string report_to_jsonl(const BenchReport& report);

}  // namespace pushplan
