#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cmusim {

// Discrete-time multiclass parallel-server system.
//   lambda[i]  per-slot arrival probability for queue i
//   mu[i][j]   success probability when server j spends a slot on a queue-i job
//   cost[i]    per-slot holding cost of a queue-i job
// Queue lengths follow Q(t+1) = (Q(t) - S(t))^+ + A(t): service is resolved
// first, then arrivals join; a job arriving in slot t is servable from t+1.
struct SystemParams {
  std::vector<double> lambda;
  std::vector<std::vector<double>> mu;
  std::vector<double> cost;

  int num_queues() const { return static_cast<int>(lambda.size()); }
  int num_servers() const {
    return mu.empty() ? 0 : static_cast<int>(mu[0].size());
  }
  double weight(int i, int j) const { return cost[i] * mu[i][j]; }

  // (queue, server) pairs with mu > 0, row-major
  std::vector<std::pair<int, int>> edges() const;
};

struct ValidationReport {
  bool ok = false;
  bool cmu_well_defined = false;
  // Smallest separation among competing cost-rate weights; +inf when the
  // system admits no comparison (single queue on a single server).
  double weight_gap = std::numeric_limits<double>::infinity();
  std::vector<std::string> errors;
};

// Minimum over |c_i mu_ij - c_i' mu_i'j| (two queues competing for server j)
// and |c_i mu_ij - c_i mu_ij'| (one queue choosing between servers), anchored
// at links with mu_ij > 0. Zero means the weight order is ambiguous.
double weight_gap(const SystemParams& p);

ValidationReport validate(const SystemParams& p);

struct CapacityResult {
  bool inside = false;
  bool boundary = false;
  // Largest t such that some static split gives every queue service rate
  // lambda_i + t; negative when the arrival vector is unsupportable.
  double margin = 0.0;
  // split[j][i]: fraction of server j's time given to queue i (rows sum to 1)
  std::vector<std::vector<double>> split;
  std::string note;
};

// Tests whether arrivals lie strictly inside the stability region spanned by
// static server splits, via a small linear program.
CapacityResult capacity_contains(const SystemParams& p,
                                 double boundary_tol = 1e-12);

struct TruncationConfig {
  int start_scalar = 200;  // initial bound for one-dimensional chains
  int start_joint = 60;    // initial per-dimension bound for joint chains
  double boundary_tol = 1e-9;
  long long max_states = 1'000'000;
  double growth = 1.6;
};

struct RunConfig {
  std::string scheduler = "cmu-maxweight";
  long long horizon = 10000;
  int reps = 1;
  uint64_t seed = 1;
  std::optional<double> discount;
  std::vector<int> initial_state;  // empty = start empty
  std::string out;                 // output path prefix ("" = stdout only)
  TruncationConfig truncation;
};

struct Instance {
  SystemParams params;
  RunConfig run;
};

// JSON loading; throws std::runtime_error naming the offending field.
Instance load_instance(const std::string& path);
Instance parse_instance(const std::string& json_text, const std::string& origin);

}  // namespace cmusim
