#include "streamsched/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <set>
#include <tuple>

#include "streamsched/error.hpp"

namespace streamsched {

std::int64_t to_ns(double us) { return std::llround(us * 1000.0); }

const OpTiming& SimResult::op(NodeId id) const {
  auto it = std::lower_bound(ops.begin(), ops.end(), id, [](const OpTiming& t, NodeId v) { return t.id < v; });
  if (it == ops.end() || it->id != id) throw ValidationError("no timing for node " + std::to_string(id));
  return *it;
}

void check_feasible(const ComputationGraph& g, const GpuConfig& cfg) {
  cfg.validate();
  for (const auto& n : g.nodes()) {
    const auto& d = n.demand;
    const auto who = "node " + std::to_string(n.id) + ": block needs ";
    if (d.threads_per_block > cfg.threads_per_sm) {
      throw ConfigError(who + std::to_string(d.threads_per_block) + " threads, SM has " +
                        std::to_string(cfg.threads_per_sm));
    }
    if (d.shared_mem_per_block > cfg.shared_mem_per_sm) {
      throw ConfigError(who + std::to_string(d.shared_mem_per_block) + " bytes of shared memory, SM has " +
                        std::to_string(cfg.shared_mem_per_sm));
    }
    if (d.registers_per_block() > cfg.registers_per_sm) {
      throw ConfigError(who + std::to_string(d.registers_per_block()) + " registers, SM has " +
                        std::to_string(cfg.registers_per_sm));
    }
  }
}

namespace {

struct SmState {
  std::int64_t free_threads = 0;
  std::int64_t free_shared_mem = 0;
  std::int64_t free_registers = 0;
  std::int64_t free_slots = 0;
  std::int64_t resident = 0;
  std::int64_t busy_since = 0;
  std::int64_t busy_ns = 0;
  std::array<std::int64_t, 2> class_blocks{0, 0};
  std::vector<std::pair<std::size_t, std::int64_t>> op_blocks;  // (kernel, resident blocks)

  bool fits(const ResourceDemand& d) const {
    return free_slots > 0 && free_threads >= d.threads_per_block && free_shared_mem >= d.shared_mem_per_block &&
           free_registers >= d.registers_per_block();
  }

  std::int64_t& count_for(std::size_t kernel) {
    auto it = std::find_if(op_blocks.begin(), op_blocks.end(), [&](const auto& e) { return e.first == kernel; });
    if (it == op_blocks.end()) {
      op_blocks.emplace_back(kernel, 0);
      return op_blocks.back().second;
    }
    return it->second;
  }

  void drop_empty() {
    std::erase_if(op_blocks, [](const auto& e) { return e.second == 0; });
  }
};

struct KernelState {
  StreamId stream = 0;
  std::size_t launch_pos = 0;
  std::int64_t unplaced = 0;
  std::int64_t running = 0;
  std::size_t pending_syncs = 0;
  bool at_head = false;
  bool started = false;
  bool done = false;
};

int class_slot(OpClass c) { return c == OpClass::MemoryIntensive ? 1 : 0; }

class Simulation {
 public:
  Simulation(const ComputationGraph& g, const StreamPlan& plan, std::span<const NodeId> order, const GpuConfig& cfg)
      : g_(g), cfg_(cfg), kernels_(g.size()), timing_(g.size()), sync_consumers_(g.size()) {
    sms_.resize(static_cast<std::size_t>(cfg.num_sms));
    for (auto& sm : sms_) {
      sm.free_threads = cfg.threads_per_sm;
      sm.free_shared_mem = cfg.shared_mem_per_sm;
      sm.free_registers = cfg.registers_per_sm;
      sm.free_slots = cfg.max_blocks_per_sm;
    }
    streams_.resize(static_cast<std::size_t>(plan.num_streams));
    stream_cursor_.assign(streams_.size(), 0);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const auto k = g.index_of(order[pos]);
      auto& ks = kernels_[k];
      ks.stream = plan.stream_of(order[pos]);
      ks.launch_pos = pos;
      ks.unplaced = g.at(k).demand.num_blocks;
      streams_[static_cast<std::size_t>(ks.stream)].push_back(k);
      timing_[k].id = order[pos];
      timing_[k].stream = ks.stream;
    }
    by_launch_pos_.resize(order.size());
    for (std::size_t k = 0; k < kernels_.size(); ++k) by_launch_pos_[kernels_[k].launch_pos] = k;
    for (const auto& e : plan.sync_events) {
      const auto u = g.index_of(e.from);
      const auto v = g.index_of(e.to);
      sync_consumers_[u].push_back(v);
      ++kernels_[v].pending_syncs;
    }
  }

  SimResult run() {
    for (std::size_t s = 0; s < streams_.size(); ++s) advance_head(s, 0);
    dispatch(0);
    while (!events_.empty()) {
      const auto now = std::get<0>(events_.top());
      while (!events_.empty() && std::get<0>(events_.top()) == now) {
        const auto block = std::get<1>(events_.top());
        events_.pop();
        finish_block(block, now);
      }
      dispatch(now);
    }
    for (std::size_t k = 0; k < kernels_.size(); ++k) {
      if (!kernels_[k].done) throw Error("simulation stalled before node " + std::to_string(g_.at(k).id) + " ran");
    }
    return collect();
  }

 private:
  using Event = std::tuple<std::int64_t, std::size_t>;  // (end time, block record index)

  void advance_head(std::size_t stream, std::int64_t now) {
    auto& cursor = stream_cursor_[stream];
    if (cursor >= streams_[stream].size()) return;
    const auto k = streams_[stream][cursor];
    kernels_[k].at_head = true;
    timing_[k].head_ns = now;
    if (kernels_[k].pending_syncs == 0) make_eligible(k, now);
  }

  void make_eligible(std::size_t k, std::int64_t now) {
    timing_[k].eligible_ns = now;
    ready_.emplace(now, kernels_[k].launch_pos);
  }

  void dispatch(std::int64_t now) {
    const auto first_new = blocks_.size();
    for (auto it = ready_.begin(); it != ready_.end();) {
      const auto k = by_launch_pos_[it->second];
      auto& ks = kernels_[k];
      const auto& node = g_.at(k);
      while (ks.unplaced > 0) {
        auto sm = std::find_if(sms_.begin(), sms_.end(), [&](const SmState& s) { return s.fits(node.demand); });
        if (sm == sms_.end()) break;
        place(k, static_cast<int>(sm - sms_.begin()), now);
      }
      it = ks.unplaced == 0 ? ready_.erase(it) : std::next(it);
    }

    for (auto b = first_new; b < blocks_.size(); ++b) {
      auto& rec = blocks_[b];
      const auto k = g_.index_of(rec.op);
      auto& sm = sms_[static_cast<std::size_t>(rec.sm)];
      const auto& node = g_.at(k);
      const auto others_same_class = sm.class_blocks[static_cast<std::size_t>(class_slot(node.op_class))] -
                                     sm.count_for(k);
      auto duration = to_ns(node.block_duration_us);
      if (others_same_class > 0 && cfg_.same_class_slowdown > 1.0) {
        duration = std::llround(static_cast<double>(duration) * cfg_.same_class_slowdown);
        rec.slowed = true;
      }
      rec.end_ns = now + duration;
      events_.emplace(rec.end_ns, b);
    }
  }

  void place(std::size_t k, int sm_index, std::int64_t now) {
    auto& ks = kernels_[k];
    const auto& node = g_.at(k);
    auto& sm = sms_[static_cast<std::size_t>(sm_index)];
    sm.free_threads -= node.demand.threads_per_block;
    sm.free_shared_mem -= node.demand.shared_mem_per_block;
    sm.free_registers -= node.demand.registers_per_block();
    sm.free_slots -= 1;
    if (sm.resident++ == 0) sm.busy_since = now;
    ++sm.class_blocks[static_cast<std::size_t>(class_slot(node.op_class))];
    ++sm.count_for(k);

    --ks.unplaced;
    ++ks.running;
    if (!ks.started) {
      ks.started = true;
      timing_[k].start_ns = now;
    }
    auto& touched = timing_[k].sms;
    if (std::find(touched.begin(), touched.end(), sm_index) == touched.end()) touched.push_back(sm_index);
    blocks_.push_back({.op = node.id, .sm = sm_index, .start_ns = now, .end_ns = now, .slowed = false});
  }

  void finish_block(std::size_t b, std::int64_t now) {
    const auto& rec = blocks_[b];
    const auto k = g_.index_of(rec.op);
    const auto& node = g_.at(k);
    auto& sm = sms_[static_cast<std::size_t>(rec.sm)];
    sm.free_threads += node.demand.threads_per_block;
    sm.free_shared_mem += node.demand.shared_mem_per_block;
    sm.free_registers += node.demand.registers_per_block();
    sm.free_slots += 1;
    if (--sm.resident == 0) sm.busy_ns += now - sm.busy_since;
    --sm.class_blocks[static_cast<std::size_t>(class_slot(node.op_class))];
    --sm.count_for(k);
    sm.drop_empty();

    auto& ks = kernels_[k];
    if (--ks.running > 0 || ks.unplaced > 0) return;
    ks.done = true;
    ks.at_head = false;
    timing_[k].end_ns = now;
    makespan_ = std::max(makespan_, now);
    for (auto v : sync_consumers_[k]) {
      if (--kernels_[v].pending_syncs == 0 && kernels_[v].at_head) make_eligible(v, now);
    }
    const auto stream = static_cast<std::size_t>(ks.stream);
    ++stream_cursor_[stream];
    advance_head(stream, now);
  }

  SimResult collect() {
    SimResult r;
    r.makespan_ns = makespan_;
    for (auto& t : timing_) {
      std::sort(t.sms.begin(), t.sms.end());
      r.blocked_ns += t.start_ns - t.eligible_ns;
      r.sync_wait_ns += t.eligible_ns - t.head_ns;
    }
    r.ops = std::move(timing_);
    std::int64_t busy_total = 0;
    for (const auto& sm : sms_) {
      r.sm_busy_ns.push_back(sm.busy_ns);
      busy_total += sm.busy_ns;
    }
    r.sm_efficiency = makespan_ == 0 ? 0.0
                                     : static_cast<double>(busy_total) /
                                           (static_cast<double>(cfg_.num_sms) * static_cast<double>(makespan_));
    r.blocks = std::move(blocks_);
    return r;
  }

  const ComputationGraph& g_;
  const GpuConfig& cfg_;
  std::vector<KernelState> kernels_;
  std::vector<OpTiming> timing_;
  std::vector<std::vector<std::size_t>> sync_consumers_;
  std::vector<std::vector<std::size_t>> streams_;
  std::vector<std::size_t> stream_cursor_;
  std::vector<std::size_t> by_launch_pos_;
  std::vector<SmState> sms_;
  std::set<std::pair<std::int64_t, std::size_t>> ready_;  // (eligible time, launch position)
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::vector<BlockRecord> blocks_;
  std::int64_t makespan_ = 0;
};

}  // namespace

SimResult simulate(const ComputationGraph& g, const StreamPlan& plan, std::span<const NodeId> order,
                   const GpuConfig& cfg) {
  check_feasible(g, cfg);
  if (auto violations = validate_plan(g, plan); !violations.empty()) {
    throw ConstraintViolation("invalid stream plan: " + violations.front().message);
  }
  if (!is_linear_extension(g, order)) {
    throw ConstraintViolation("launch order is not a linear extension of the graph");
  }
  return Simulation(g, plan, order, cfg).run();
}

std::int64_t sequential_makespan_ns(const ComputationGraph& g, const GpuConfig& cfg) {
  const auto order = topo_sort(g);
  return simulate(g, single_stream_plan(g), order, cfg).makespan_ns;
}

std::vector<TraceRow> trace(const ComputationGraph& g, const SimResult& result) {
  std::vector<TraceRow> rows;
  rows.reserve(result.ops.size());
  for (const auto& t : result.ops) {
    const auto& n = g.node(t.id);
    rows.push_back({.op_id = t.id,
                    .name = n.name,
                    .op_class = n.op_class,
                    .stream = t.stream,
                    .start_ns = t.start_ns,
                    .end_ns = t.end_ns,
                    .sms = t.sms});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const TraceRow& a, const TraceRow& b) {
    return std::tie(a.start_ns, a.op_id) < std::tie(b.start_ns, b.op_id);
  });
  return rows;
}

void write_trace_tsv(std::span<const TraceRow> rows, std::ostream& out) {
  out << "op_id\tname\tclass\tstream\tstart_ns\tend_ns\n";
  for (const auto& r : rows) {
    out << r.op_id << '\t' << r.name << '\t' << to_string(r.op_class) << '\t' << r.stream << '\t' << r.start_ns
        << '\t' << r.end_ns << '\n';
  }
}

nlohmann::ordered_json sim_result_to_json(const SimResult& result) {
  nlohmann::ordered_json doc;
  doc["makespan_ns"] = result.makespan_ns;
  doc["makespan_us"] = result.makespan_us();
  doc["sm_efficiency"] = result.sm_efficiency;
  doc["blocked_time_ns"] = result.blocked_ns;
  doc["sync_wait_time_ns"] = result.sync_wait_ns;
  doc["sm_busy_time_ns"] = result.sm_busy_ns;
  auto ops = nlohmann::ordered_json::array();
  for (const auto& t : result.ops) {
    nlohmann::ordered_json op;
    op["id"] = t.id;
    op["stream"] = t.stream;
    op["start_ns"] = t.start_ns;
    op["end_ns"] = t.end_ns;
    op["sms"] = t.sms;
    ops.push_back(std::move(op));
  }
  doc["ops"] = std::move(ops);
  return doc;
}

}  // namespace streamsched
