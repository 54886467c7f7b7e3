#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cmusim/model.hpp"
#include "cmusim/rng.hpp"

namespace cmusim {

// A slot decision. server_to_queue[j] names the queue granted server j,
// -1 leaves the server idle. Assignments never exceed the queue length.
struct Decision {
  std::vector<int> server_to_queue;
  bool explored = false;

  std::vector<std::pair<int, int>> pairs() const;  // sorted (queue, server)
};

// Total order over (queue, server) pairs, highest priority first.
using PriorityOrder = std::vector<std::pair<int, int>>;

// All pairs of the weight matrix sorted by descending weight, ties broken
// by queue then server index.
PriorityOrder ranked_by_weight(const std::vector<std::vector<double>>& w);

// Priority order induced by the weights c_i * mu_ij, service links first.
// Throws when two competing links (same server or same queue) tie, since
// the induced order is then ambiguous.
PriorityOrder cmu_order(const SystemParams& p);

// Walk the order, granting each free server to its queue as long as the
// queue still has unserved jobs this slot.
Decision greedy_priority_assignment(const PriorityOrder& order,
                                    const std::vector<int>& q,
                                    int num_servers);

// Matching of servers to queues maximizing total weight, with at most q_i
// grants to queue i. Among maximizers prefers more matched pairs, then the
// lexicographically smallest pair list. Falls back to a Hungarian solve for
// systems too large to enumerate; that path returns some maximizer without
// the tie-break guarantees.
Decision max_weight_assignment(const std::vector<std::vector<double>>& w,
                               const std::vector<int>& q);

//---------------------------------------------------------------------------

struct EmpiricalStats {
  std::vector<std::vector<long long>> samples;
  std::vector<std::vector<long long>> successes;

  EmpiricalStats(int num_queues, int num_servers);
  void record(int queue, int server, bool success);
  double mu_hat(int queue, int server) const;
  std::vector<std::vector<double>> mu_hat_matrix() const;
  long long n_min() const;
};

// Exploration schedule of the learning rule for parallel servers. The
// threshold grows polylogarithmically; exploration fires only while some
// link has fewer samples than the threshold, and then only with a
// probability decaying like log^2(t)/t.
double exploration_threshold(long long t);
double exploration_gate_prob(long long t, int num_queues);

//---------------------------------------------------------------------------

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual Decision decide(long long t, const std::vector<int>& q) = 0;
  virtual void observe(long long t, const Decision& d,
                       const std::vector<uint8_t>& success);
  virtual std::string name() const = 0;
};

class StaticPriorityScheduler : public Scheduler {
 public:
  StaticPriorityScheduler(PriorityOrder order, int num_servers,
                          std::string name);
  Decision decide(long long t, const std::vector<int>& q) override;
  std::string name() const override { return name_; }
  const PriorityOrder& order() const { return order_; }

 private:
  PriorityOrder order_;
  int num_servers_;
  std::string name_;
};

class MaxWeightScheduler : public Scheduler {
 public:
  MaxWeightScheduler(std::vector<std::vector<double>> weights,
                     std::string name);
  Decision decide(long long t, const std::vector<int>& q) override;
  std::string name() const override { return name_; }

 private:
  std::vector<std::vector<double>> weights_;
  std::string name_;
};

// Single server greedy rule on estimated weights c_i * mu_hat_i. Serves the
// nonempty queue with the highest estimated weight, lowest index on ties,
// and learns from every attempt.
class CmuHatSingleScheduler : public Scheduler {
 public:
  explicit CmuHatSingleScheduler(const SystemParams& p);
  Decision decide(long long t, const std::vector<int>& q) override;
  void observe(long long t, const Decision& d,
               const std::vector<uint8_t>& success) override;
  std::string name() const override { return "cmuhat-single"; }
  const EmpiricalStats& stats() const { return stats_; }

 private:
  std::vector<double> cost_;
  EmpiricalStats stats_;
};

// Parallel server learning rule: epsilon-greedy exploration conditioned on
// an undersampled link, exploitation by max weight (or ranked greedy) on
// the estimated weights. Statistics update on every scheduled link, so
// exploitation keeps feeding the estimates.
class CmuHatParallelScheduler : public Scheduler {
 public:
  enum class Exploit { MaxWeight, RankedGreedy };

  CmuHatParallelScheduler(const SystemParams& p, uint64_t seed,
                          Exploit exploit = Exploit::MaxWeight);
  Decision decide(long long t, const std::vector<int>& q) override;
  void observe(long long t, const Decision& d,
               const std::vector<uint8_t>& success) override;
  std::string name() const override;
  const EmpiricalStats& stats() const { return stats_; }
  long long last_explore_slot() const { return last_explore_slot_; }

 private:
  std::vector<double> cost_;
  int num_queues_;
  int num_servers_;
  EmpiricalStats stats_;
  Stream gate_;
  Stream pick_;
  Exploit exploit_;
  long long last_explore_slot_ = 0;
};

// Accepted names:
//   cmu-maxweight
//   cmu-greedy-priority
//   cmuhat-single
//   cmuhat-parallel            (max weight exploitation)
//   cmuhat-parallel:greedy     (ranked greedy exploitation)
//   static-priority:1-1,2-1,2-2,3-2   (queue-server ranks, 1-indexed)
std::unique_ptr<Scheduler> make_scheduler(const std::string& name,
                                          const SystemParams& p,
                                          uint64_t seed);

}  // namespace cmusim
