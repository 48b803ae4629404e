#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamsched/gpu_config.hpp"
#include "streamsched/graph.hpp"
#include "streamsched/launch_order.hpp"
#include "streamsched/stream_plan.hpp"

namespace streamsched {

// Simulated time is integer nanoseconds; graph durations are microseconds.
std::int64_t to_ns(double us);

struct OpTiming {
  NodeId id = 0;
  StreamId stream = 0;
  std::int64_t head_ns = 0;      // reached the front of its stream
  std::int64_t eligible_ns = 0;  // head and all sync waits satisfied
  std::int64_t start_ns = 0;     // first block placed
  std::int64_t end_ns = 0;       // last block finished
  std::vector<int> sms;          // SMs that ran at least one block, ascending

  friend bool operator==(const OpTiming&, const OpTiming&) = default;
};

// One executed thread block; the full list is the simulation's event log.
struct BlockRecord {
  NodeId op = 0;
  int sm = 0;
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
  bool slowed = false;

  friend bool operator==(const BlockRecord&, const BlockRecord&) = default;
};

struct SimResult {
  std::int64_t makespan_ns = 0;
  std::vector<OpTiming> ops;  // ascending id
  std::vector<std::int64_t> sm_busy_ns;
  double sm_efficiency = 0.0;  // sum(sm_busy) / (num_sms * makespan)
  // Sum over operators of (start - eligible): time spent at a stream head
  // with all dependencies met but no room on any SM.
  std::int64_t blocked_ns = 0;
  // Sum over operators of (eligible - head): time spent at a stream head
  // waiting for cross-stream producers.
  std::int64_t sync_wait_ns = 0;
  std::vector<BlockRecord> blocks;  // placement order

  double makespan_us() const { return static_cast<double>(makespan_ns) / 1000.0; }
  const OpTiming& op(NodeId id) const;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

// Throws ConfigError if some operator's block cannot fit on an empty SM.
void check_feasible(const ComputationGraph& g, const GpuConfig& cfg);

// Event-driven execution of `plan` with kernels enqueued in `order`.
//
// Streams are FIFO: a kernel reaches its stream's head when the previous
// kernel of that stream has completed, and becomes eligible once every sync
// producer has completed too. Eligible kernels place blocks in order of
// (eligible time, launch position); each block goes to the lowest-indexed SM
// with enough free threads, shared memory, registers and block slots. A kernel
// that cannot place its next block does not stop later kernels from placing
// theirs. Blocks are non-preemptive. All blocks placed at the same instant are
// then checked together: a block sharing its SM with a block of the same class
// from another operator runs for block_duration * same_class_slowdown. The
// multiplier is fixed at placement.
//
// Throws ConstraintViolation for an invalid plan or an order that is not a
// linear extension, and ConfigError for infeasible blocks.
SimResult simulate(const ComputationGraph& g, const StreamPlan& plan, std::span<const NodeId> order,
                   const GpuConfig& cfg);

inline SimResult simulate(const ComputationGraph& g, const StreamPlan& plan, const LaunchSchedule& schedule,
                          const GpuConfig& cfg) {
  return simulate(g, plan, schedule.order, cfg);
}

// Makespan of the single-stream topo_sort schedule.
std::int64_t sequential_makespan_ns(const ComputationGraph& g, const GpuConfig& cfg);

struct TraceRow {
  NodeId op_id = 0;
  std::string name;
  OpClass op_class = OpClass::ComputeIntensive;
  StreamId stream = 0;
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
  std::vector<int> sms;
};

// One row per operator, sorted by (start, id).
std::vector<TraceRow> trace(const ComputationGraph& g, const SimResult& result);

// Columns: op_id, name, class, stream, start_ns, end_ns (with a header line).
void write_trace_tsv(std::span<const TraceRow> rows, std::ostream& out);

nlohmann::ordered_json sim_result_to_json(const SimResult& result);

}  // namespace streamsched
