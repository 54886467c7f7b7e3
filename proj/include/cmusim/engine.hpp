#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cmusim/model.hpp"
#include "cmusim/scheduler.hpp"

namespace cmusim {

struct TraceRecord {
  long long t;
  std::vector<int> q;            // state at the start of the slot
  std::vector<uint8_t> arrived;  // per queue
  std::vector<int> assign;       // server to queue, -1 idle
  std::vector<uint8_t> served;   // per server, success this slot
  double slot_cost;
  bool explored;
};

struct RunOptions {
  long long horizon = 10000;
  uint64_t seed = 1;
  std::vector<int> initial_state;        // empty means all zero
  std::optional<double> discount;
  std::vector<long long> sample_points;  // ascending slot indices
  bool keep_trace = false;
  bool keep_cost_path = false;
};

struct RunResult {
  double total_cost = 0.0;
  std::vector<int> final_q;
  long long last_explore_slot = 0;  // 0 when the rule never explored
  std::vector<double> cost_at_sample;
  std::vector<std::vector<int>> q_at_sample;
  std::vector<double> cost_path;
  std::vector<TraceRecord> trace;
};

// Simulates horizon slots of the system under the given rule. Arrivals are
// drawn per queue and slot; service luck is drawn per queue and cumulative
// job index, with a queue's granted servers matched to its jobs from the
// highest success probability down.
RunResult run(const SystemParams& p, Scheduler& sched, const RunOptions& opt);

struct CoupledOptions {
  long long horizon = 10000;
  uint64_t seed = 1;
  std::vector<int> initial_a;
  std::vector<int> initial_b;
  std::optional<double> discount;
  std::vector<long long> sample_points;
  bool keep_trace = false;
  bool keep_cost_path = false;
};

struct CoupledResult {
  RunResult a;
  RunResult b;
  // Slots where the first state fails to be componentwise at most the
  // second. Meaningful when the two runs differ only in initial state.
  long long dominance_violations = 0;
};

// Runs two rules on common randomness: identical arrivals, and service luck
// addressed by shared per-queue job counters so the paths stay comparable.
CoupledResult coupled_run(const SystemParams& p, Scheduler& sched_a,
                          Scheduler& sched_b, const CoupledOptions& opt);

bool single_server_work_conserving(const std::vector<TraceRecord>& trace);

void write_trace_csv(std::ostream& os, const SystemParams& p,
                     const RunResult& r);

//---------------------------------------------------------------------------
// Workload view of a single server system: geometric interarrival gaps and
// geometric job requirements, one unit of work done per busy slot. Any
// rule that never idles while work remains empties the system on the same
// slots, so regeneration points can be compared exactly across rules.

using QueuePicker = std::function<int(const std::vector<int>& q, long long t)>;

QueuePicker priority_picker(const PriorityOrder& order);
QueuePicker round_robin_picker();
QueuePicker longest_queue_picker();

struct WorkloadRunResult {
  std::vector<long long> zero_hits;       // slots with an empty system
  std::vector<long long> cycle_lengths;   // gaps between zero hits
  double total_cost = 0.0;
};

WorkloadRunResult geometric_workload_run(const SystemParams& p,
                                         const QueuePicker& pick,
                                         long long horizon, uint64_t seed);

void write_cycles_csv(std::ostream& os, const WorkloadRunResult& r);

}  // namespace cmusim
