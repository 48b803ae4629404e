// streamsched: generate graphs, build stream plans and launch orders, simulate
// them and compare scheduling policies.
//
// Exit codes: 0 success, 1 internal error, 2 invalid input or usage.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "streamsched/comparison.hpp"
#include "streamsched/error.hpp"
#include "streamsched/generators.hpp"
#include "streamsched/gpu_config.hpp"
#include "streamsched/graph_io.hpp"
#include "streamsched/launch_order.hpp"
#include "streamsched/oracle.hpp"
#include "streamsched/simulator.hpp"
#include "streamsched/stream_plan.hpp"

#ifndef STREAMSCHED_VERSION
#define STREAMSCHED_VERSION "dev"
#endif

namespace {

using namespace streamsched;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

struct CommonOptions {
  std::string graph;
  std::string profile;
  std::string gpu_config = "a100-like";
  std::optional<double> slowdown;
  double t_overhead_us = kDefaultSyncOverheadUs;
  std::uint64_t seed = 0;
  std::string out;
};

ComputationGraph load_input_graph(const CommonOptions& opt) {
  std::vector<std::string> warnings;
  std::optional<std::filesystem::path> profile;
  if (!opt.profile.empty()) profile = opt.profile;
  auto g = load_graph(opt.graph, profile, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return g;
}

GpuConfig load_config(const CommonOptions& opt) {
  auto cfg = load_gpu_config(opt.gpu_config);
  if (opt.slowdown) cfg.same_class_slowdown = *opt.slowdown;
  cfg.validate();
  return cfg;
}

void emit_json(const nlohmann::ordered_json& doc, const std::string& out) {
  if (out.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    write_json_file(doc, out);
  }
}

std::string plural(std::size_t n, const char* word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

int run_gen(const std::string& kind, const std::vector<int>& args, int max_width, std::uint64_t seed,
            const std::string& out) {
  auto need = [&](std::size_t count) {
    if (args.size() != count) {
      throw InputError("gen " + kind + " takes " + std::to_string(count) + " integer argument(s)");
    }
  };
  GeneratorSpec spec;
  if (kind == "chain") {
    need(1);
    spec = gen::Chain{args[0]};
  } else if (kind == "fork") {
    need(1);
    spec = gen::Fork{args[0]};
  } else if (kind == "diamond") {
    need(0);
    spec = gen::Diamond{};
  } else if (kind == "inception") {
    need(2);
    spec = gen::InceptionBlock{args[0], args[1]};
  } else if (kind == "random") {
    need(1);
    spec = gen::RandomDag{args[0], max_width, seed};
  } else {
    throw InputError("unknown generator \"" + kind + "\" (chain|fork|diamond|inception|random)");
  }
  emit_json(graph_to_json(gen_graph(spec)), out);
  return kExitOk;
}

int run_schedule(const CommonOptions& opt, const std::string& policy_name, const std::string& plan_out,
                 const std::string& order_out) {
  const auto policy = parse_policy(policy_name);
  if (!policy) throw InputError("unknown policy \"" + policy_name + "\"");
  const auto g = load_input_graph(opt);
  const auto cfg = load_config(opt);
  const auto ps = schedule_for_policy(g, cfg, *policy, opt.seed);
  write_json_file(plan_to_json(ps.plan, ps.schedule.order), plan_out);
  write_json_file(schedule_to_json(ps.schedule), order_out);
  std::cout << plural(static_cast<std::size_t>(ps.plan.num_streams), "stream") << ", "
            << plural(ps.plan.sync_events.size(), "sync") << '\n';
  return kExitOk;
}

// The per-stream listing in a plan file must agree with the launch order.
void check_plan_matches_order(const ParsedPlan& parsed, const LaunchSchedule& schedule) {
  std::map<StreamId, std::vector<NodeId>> from_order;
  for (auto id : schedule.order) {
    auto it = parsed.plan.assignment.find(id);
    if (it != parsed.plan.assignment.end()) from_order[it->second].push_back(id);
  }
  for (const auto& [s, listed] : parsed.stream_order) {
    if (from_order[s] != listed) {
      throw ConstraintViolation("plan stream " + std::to_string(s) + " lists operators in a different order than "
                                "the launch order");
    }
  }
}

int run_simulate(const CommonOptions& opt, const std::string& plan_path, const std::string& order_path,
                 const std::string& trace_path) {
  const auto g = load_input_graph(opt);
  const auto cfg = load_config(opt);
  const auto parsed = plan_from_json(read_json_file(plan_path));
  const auto schedule = schedule_from_json(read_json_file(order_path));
  if (auto violations = validate_plan(g, parsed.plan); !violations.empty()) {
    std::string msg = plan_path + ":";
    for (const auto& v : violations) msg += " " + v.message + ";";
    throw ConstraintViolation(msg);
  }
  if (!is_linear_extension(g, schedule.order)) {
    throw ConstraintViolation(order_path + ": order does not cover the graph in dependency order");
  }
  check_plan_matches_order(parsed, schedule);

  const auto result = simulate(g, parsed.plan, schedule, cfg);
  if (!trace_path.empty()) {
    std::ofstream tsv(trace_path);
    if (!tsv) throw Error(trace_path + ": cannot open for writing");
    write_trace_tsv(trace(g, result), tsv);
  }
  emit_json(sim_result_to_json(result), opt.out);
  return kExitOk;
}

int run_compare(const CommonOptions& opt, const std::vector<std::string>& policy_names) {
  std::vector<OrderPolicy> policies;
  for (const auto& name : policy_names) {
    auto p = parse_policy(name);
    if (!p) throw InputError("unknown policy \"" + name + "\"");
    policies.push_back(*p);
  }
  const auto g = load_input_graph(opt);
  const auto cfg = load_config(opt);
  ComparisonMetadata meta{.graph_file = opt.graph,
                          .config_file = opt.gpu_config,
                          .seed = opt.seed,
                          .tool_version = STREAMSCHED_VERSION};
  const auto report = compare_policies(g, cfg, policies, opt.seed, opt.t_overhead_us, std::move(meta));
  print_report_table(report, std::cout);
  if (!opt.out.empty()) write_json_file(report_to_json(report), opt.out);
  return kExitOk;
}

int run_oracle(const CommonOptions& opt, std::uint64_t max_orders, int max_streams) {
  const auto g = load_input_graph(opt);
  const auto cfg = load_config(opt);
  if (max_streams > 0) {
    emit_json(plan_oracle_result_to_json(best_plan(g, cfg, max_streams, max_orders, opt.t_overhead_us)), opt.out);
  } else {
    const auto plan = allocate_streams(g);
    auto doc = oracle_result_to_json(best_order(g, plan, cfg, max_orders));
    doc["plan"] = plan_to_json(plan);
    emit_json(doc, opt.out);
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_graph = true) {
  if (with_graph) cmd->add_option("graph", opt.graph, "Graph JSON file")->required();
  cmd->add_option("--profile", opt.profile, "Profile overlay JSON keyed by node id");
  cmd->add_option("--gpu-config", opt.gpu_config, "Preset (a100-like, 2080s-like) or GpuConfig JSON file");
  cmd->add_option("--slowdown", opt.slowdown, "Override same_class_slowdown");
  cmd->add_option("--seed", opt.seed, "Seed for the random policy");
  cmd->add_option("--out", opt.out, "Write JSON output here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stream allocation, launch ordering and GPU simulation for operator DAGs"};
  app.set_version_flag("--version", STREAMSCHED_VERSION);
  app.require_subcommand(1);

  CommonOptions opt;

  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic graph");
  std::string gen_kind;
  std::vector<int> gen_args;
  int max_width = 20;
  gen_cmd->add_option("kind", gen_kind, "chain | fork | diamond | inception | random")->required();
  gen_cmd->add_option("args", gen_args, "chain N | fork K | inception BRANCHES DEPTH | random N");
  gen_cmd->add_option("--max-width", max_width, "Width bound for random graphs");
  gen_cmd->add_option("--seed", opt.seed, "Seed for random graphs");
  gen_cmd->add_option("--out", opt.out, "Write the graph here instead of stdout");

  auto* schedule_cmd = app.add_subcommand("schedule", "Allocate streams and compute a launch order");
  add_common(schedule_cmd, opt);
  std::string policy = "opara";
  std::string plan_out = "plan.json";
  std::string order_out = "order.json";
  schedule_cmd->add_option("--policy", policy, "opara | dfs | wavefront | random | sequential");
  schedule_cmd->add_option("--plan-out", plan_out, "Stream plan output file");
  schedule_cmd->add_option("--order-out", order_out, "Launch order output file");

  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a plan and launch order");
  add_common(simulate_cmd, opt);
  std::string plan_path;
  std::string order_path;
  std::string trace_path;
  simulate_cmd->add_option("--plan", plan_path, "Stream plan JSON")->required();
  simulate_cmd->add_option("--order", order_path, "Launch order JSON")->required();
  simulate_cmd->add_option("--trace", trace_path, "Write a TSV timeline");

  auto* compare_cmd = app.add_subcommand("compare", "Compare scheduling policies");
  add_common(compare_cmd, opt);
  std::vector<std::string> policies{"sequential", "dfs", "wavefront", "random", "opara"};
  compare_cmd->add_option("--policies", policies, "Comma-separated policies (at least two)")->delimiter(',');
  compare_cmd->add_option("--t-overhead-us", opt.t_overhead_us, "Cost of one sync event in microseconds");

  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive search on small graphs");
  add_common(oracle_cmd, opt);
  std::uint64_t max_orders = 100000;
  int max_streams = 0;
  oracle_cmd->add_option("--max-orders", max_orders, "Cap on simulated launch orders");
  oracle_cmd->add_option("--max-streams", max_streams, "Also search stream plans with up to K streams");
  oracle_cmd->add_option("--t-overhead-us", opt.t_overhead_us, "Cost of one sync event in microseconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*gen_cmd) return run_gen(gen_kind, gen_args, max_width, opt.seed, opt.out);
    if (*schedule_cmd) return run_schedule(opt, policy, plan_out, order_out);
    if (*simulate_cmd) return run_simulate(opt, plan_path, order_path, trace_path);
    if (*compare_cmd) return run_compare(opt, policies);
    if (*oracle_cmd) return run_oracle(opt, max_orders, max_streams);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
