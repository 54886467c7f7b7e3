#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cmusim/engine.hpp"
#include "cmusim/model.hpp"
#include "cmusim/stats.hpp"

namespace cmusim {

//---------------------------------------------------------------------------
// Regret of a learning rule against a reference rule on common randomness.
// Each replication couples the two systems (same arrivals, same service
// luck per job index), so the cost difference psi is a low variance paired
// estimate.

struct RegretPoint {
  long long horizon = 0;
  double cost = 0.0;       // learner
  double cost_star = 0.0;  // reference
  double psi = 0.0;        // mean paired cost difference
  double se = 0.0;         // standard error of the paired difference
  double queue_gap = 0.0;  // mean L1 distance between the coupled states
};

struct RegretCurve {
  std::vector<RegretPoint> points;
};

struct RegretConfig {
  std::string learner = "cmuhat-single";
  std::string reference = "cmu-greedy-priority";
  std::vector<long long> grid;  // ascending sample horizons
  int reps = 100;
  uint64_t seed = 1;
  std::optional<double> discount;
};

RegretCurve regret_experiment(const SystemParams& p, const RegretConfig& cfg);

void write_regret_csv(std::ostream& os, const RegretCurve& curve);

//---------------------------------------------------------------------------
// Growth demonstration: per replication slope of the holding cost path,
// fitted on batch means over the last half of the run.

struct InstabilityReport {
  int reps = 0;
  int significant = 0;  // replications whose slope CI sits above zero
  double mean_slope = 0.0;
  std::vector<SlopeFit> fits;
  CapacityResult capacity;
};

InstabilityReport instability_demo(const SystemParams& p,
                                   const std::string& scheduler,
                                   long long horizon, int reps, uint64_t seed);

//---------------------------------------------------------------------------
// Regeneration check for single server rules: under the shared workload
// construction every rule that never idles empties the system on exactly
// the same slots.

using PickerFactory = std::function<QueuePicker()>;

struct BusyCycleCheck {
  bool all_equal = true;
  std::string detail;  // first mismatch, empty when all runs agree
  std::vector<WorkloadRunResult> baseline;  // first policy, one per seed
};

BusyCycleCheck busy_cycle_equality(
    const SystemParams& p,
    const std::vector<std::pair<std::string, PickerFactory>>& policies,
    long long horizon, const std::vector<uint64_t>& seeds);

//---------------------------------------------------------------------------
// Lower bound on the per cycle probability that queue i alone fills the
// system while its services keep failing, which forces every server to
// sample queue i. Learning rules inherit samples from these windows
// without paying for exploration.

double free_exploration_rate(const SystemParams& p);

// Last slot on which a learning rule chose to explore; zero when it never
// did.
long long no_explore_onset(const RunResult& r);

}  // namespace cmusim
