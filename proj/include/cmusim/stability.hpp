#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cmusim/model.hpp"
#include "cmusim/scheduler.hpp"

namespace cmusim {

//---------------------------------------------------------------------------
// Closed form stationary law of one queue drained by a dedicated server mu1
// plus a helper mu2 that only reaches the second job in line. The tail is
// geometric from level two on: pi_{n+1} = alpha * pi_n for n >= 2.

struct GeomTailDist {
  bool stable = false;
  double pi0 = 0.0;
  double pi1 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;  // pi2 = beta * pi1

  double at(int n) const;
  double head_mass(int n) const;  // P(Q <= n)
};

GeomTailDist stationary_two_server_queue(double lambda, double mu1,
                                         double mu2);

//---------------------------------------------------------------------------
// Numerical stationary law of the chain on a queue subset under greedy
// assignment by a priority order, solved on a clamped box that grows until
// the clamp layer carries less than cfg.boundary_tol probability.

struct StationaryResult {
  bool ok = false;
  std::vector<int> queues;   // global ids, defines the dimension order
  std::vector<int> servers;  // global ids of the servers in the subsystem
  std::vector<int> box;      // per dimension truncation size
  std::vector<double> pi;    // row major over the box
  double boundary_mass = 1.0;
  long long states = 0;
  int iterations = 0;        // 0 for direct solves
  std::string note;

  double prob(const std::vector<int>& local_q) const;
  double mass(const std::function<bool(const std::vector<int>&)>& pred) const;
};

StationaryResult stationary_truncated(const SystemParams& p,
                                      const std::vector<int>& queues,
                                      const std::vector<int>& servers,
                                      const PriorityOrder& order,
                                      const TruncationConfig& cfg = {});

// Probability that the given server is left free by the subsystem the
// stationary law was computed for.
double server_free_probability(const SystemParams& p,
                               const StationaryResult& st,
                               const PriorityOrder& order, int server);

//---------------------------------------------------------------------------
// Exact classification of the two queue, two server system in which both
// servers rank queue 1 first and queue 1 ranks server 1 first. Queue 2 is
// stable exactly when its arrival rate stays below the rate it collects
// from servers left free by queue 1.

enum class Verdict { Stable, Unstable, Boundary };
std::string to_string(Verdict v);

struct TwoByTwoClassification {
  Verdict verdict = Verdict::Boundary;
  double lambda2_star = 0.0;  // service rate seen by a saturated queue 2
  GeomTailDist queue1;
  std::string note;
};

TwoByTwoClassification classify_2x2(const SystemParams& p, double tol = 1e-9);

//---------------------------------------------------------------------------
// Drift feasibility game. For an occupancy profile q of the servers'
// worth of jobs, R(q) holds the service rates the rule grants. The game
// value is max over probability vectors alpha of the worst case weighted
// drift min_q (R(q) - lambda) . alpha; a positive value certifies that the
// rule drains every heavy traffic direction.

using AssignmentRule = std::function<Decision(const std::vector<int>& q)>;

std::vector<std::vector<int>> compositions(int total, int parts);

std::vector<double> service_rates(const SystemParams& p, const Decision& d);

struct FeasibilityResult {
  double value = 0.0;
  std::vector<double> alpha;
  std::vector<int> worst_profile;
};

FeasibilityResult feasibility_game(const SystemParams& p,
                                   const AssignmentRule& rule);

double feasibility_value_at(const SystemParams& p, const AssignmentRule& rule,
                            const std::vector<double>& alpha);

//---------------------------------------------------------------------------
// Hierarchy of a priority order: queue i sits below i' when i outranks i'
// on every server they share. The order is hierarchical when every sharing
// pair is one sided and the relation has no cycle; levels come from
// repeatedly peeling the queues that dominate all their remaining peers.

struct HierarchyResult {
  bool hierarchical = false;
  std::vector<std::vector<int>> levels;
  std::string witness;  // first violation, empty when hierarchical
};

HierarchyResult hierarchy_levels(const SystemParams& p,
                                 const PriorityOrder& order);

enum class Ergodicity { Geometric, Unstable, Inconclusive };
std::string to_string(Ergodicity e);

struct LevelCheck {
  int queue = -1;
  int level = 0;
  double lambda = 0.0;
  double service_rate = 0.0;  // rate collected from servers free of lower levels
  bool pass = false;
};

struct HierarchicalVerdict {
  Ergodicity verdict = Ergodicity::Inconclusive;
  HierarchyResult hierarchy;
  std::vector<LevelCheck> checks;
  std::string note;
};

// Level by level drift test. A queue passes when the rate it collects from
// servers left free by all lower levels exceeds its arrival rate; lower
// level behaviour is autonomous because lower queues never yield a shared
// server. Verdicts: all levels pass -> Geometric, a level fails with lower
// levels confirmed -> Unstable, otherwise Inconclusive.
HierarchicalVerdict hierarchical_verdict(const SystemParams& p,
                                         const PriorityOrder& order,
                                         const TruncationConfig& cfg = {},
                                         double tol = 1e-9);

//---------------------------------------------------------------------------
// Two flexible queues on three servers, each queue with a fast dedicated
// server and a slow shared one. For small eps the arrival vector sits
// inside the capacity region, yet either way the shared server conflict is
// resolved, the losing queue starves.

SystemParams m_network(double eps);

}  // namespace cmusim
