// Command-line front end: plan, bench and render.

#include <fstream>
#include <iostream>
#include <numeric>

#include "CLI11.hpp"
#include "pushplan/bench.hpp"
#include "pushplan/render.hpp"
#include "pushplan/scene.hpp"
#include "pushplan/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUnsolved = 2;

struct PlanArgs {
  std::string scene, knowledge, algo = "rrt", out;
  std::uint64_t seed = 0;
  double tmax = 0.0;
  bool no_knowledge = false;
};

struct BenchArgs {
  std::string scene, knowledge, out;
  int seeds = 20;
  double tmax = 0.0;
  int threads = 0;
};

struct RenderArgs {
  std::string mode = "workspace", in, out;
};

int run_plan(const PlanArgs& a) {
  const pushplan::LoadedScene loaded = pushplan::load_scene(a.scene, a.knowledge);
  const pushplan::KnowledgeBase kb(loaded.knowledge, loaded.scene.world, loaded.scene.room);
  pushplan::PlannerConfig config = loaded.scene.planner.to_config();
  config.algorithm = pushplan::parse_algorithm(a.algo);
  config.seed = a.seed;
  config.knowledge_enabled = !a.no_knowledge;
  if (a.tmax > 0.0) config.t_max = a.tmax;

  const pushplan::PlanResult result = pushplan::plan(kb, loaded.scene.world, config);
  std::ofstream out(a.out);
  if (!out) throw std::runtime_error("cannot write " + a.out);
  pushplan::write_plan_trace(out, loaded.scene, kb, config, result);

  std::cout << pushplan::record_to_json(pushplan::make_record(config, result)) << '\n';
  return result.stats.solved ? kExitOk : kExitUnsolved;
}

int run_bench(const BenchArgs& a) {
  const pushplan::LoadedScene loaded = pushplan::load_scene(a.scene, a.knowledge);
  pushplan::PlannerConfig config = loaded.scene.planner.to_config();
  if (a.tmax > 0.0) config.t_max = a.tmax;
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(a.seeds));
  std::iota(seeds.begin(), seeds.end(), std::uint64_t{1});

  const pushplan::BenchReport report = pushplan::run_benchmark(loaded.scene, loaded.knowledge, config, seeds,
                                                               pushplan::all_modes(), {a.threads, false});
  std::ofstream out(a.out);
  if (!out) throw std::runtime_error("cannot write " + a.out);
  out << pushplan::report_to_jsonl(report);
  for (const auto& agg : report.aggregates)
    std::cerr << pushplan::to_string(agg.mode.algorithm) << (agg.mode.knowledge_enabled ? " knowledge-on " : " knowledge-off")
              << "  success " << agg.success_rate << "  median " << agg.median_time_s << " s\n";
  for (const auto& r : report.ratios)
    std::cerr << pushplan::to_string(r.algorithm) << " off/on median-time ratio " << r.ratio
              << (r.censored ? " (censored runs at t_max)" : "") << '\n';
  return kExitOk;
}

int run_render(const RenderArgs& a) {
  std::ifstream in(a.in);
  if (!in) throw std::runtime_error("cannot read " + a.in);
  const pushplan::Trace trace = pushplan::read_trace(in);
  const std::string svg = pushplan::render_svg(trace, pushplan::parse_render_mode(a.mode));
  std::ofstream out(a.out);
  if (!out) throw std::runtime_error("cannot write " + a.out);
  out << svg;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-guided physics-based push planning"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Plan one query and write a trace");
  plan->add_option("--scene", plan_args.scene, "Scene file")->required();
  plan->add_option("--knowledge", plan_args.knowledge, "Knowledge document (default: the scene's reference)");
  plan->add_option("--algo", plan_args.algo, "rrt or kpiece")->check(CLI::IsMember({"rrt", "kpiece"}));
  plan->add_option("--seed", plan_args.seed, "Random seed");
  plan->add_option("--tmax", plan_args.tmax, "Planning time budget in seconds");
  plan->add_flag("--no-knowledge", plan_args.no_knowledge, "Disable knowledge-based reasoning");
  plan->add_option("--out", plan_args.out, "Trace output (JSONL)")->required();

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Run every mode over a range of seeds");
  bench->add_option("--scene", bench_args.scene, "Scene file")->required();
  bench->add_option("--knowledge", bench_args.knowledge, "Knowledge document (default: the scene's reference)");
  bench->add_option("--seeds", bench_args.seeds, "Number of seeds (1..N)")->check(CLI::PositiveNumber);
  bench->add_option("--tmax", bench_args.tmax, "Planning time budget per run in seconds");
  bench->add_option("--threads", bench_args.threads, "Worker count (default: PUSHPLAN_THREADS or all cores)");
  bench->add_option("--out", bench_args.out, "Report output (JSONL)")->required();

  RenderArgs render_args;
  auto* render = app.add_subcommand("render", "Render a trace as SVG");
  render->add_option("--mode", render_args.mode, "workspace or tree")->check(CLI::IsMember({"workspace", "tree"}));
  render->add_option("--in", render_args.in, "Trace file")->required();
  render->add_option("--out", render_args.out, "SVG output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*plan) return run_plan(plan_args);
    if (*bench) return run_bench(bench_args);
    if (*render) return run_render(render_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
