#include "cmusim/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cmusim {

std::vector<std::pair<int, int>> Decision::pairs() const {
  std::vector<std::pair<int, int>> out;
  for (size_t j = 0; j < server_to_queue.size(); ++j)
    if (server_to_queue[j] >= 0)
      out.emplace_back(server_to_queue[j], static_cast<int>(j));
  std::sort(out.begin(), out.end());
  return out;
}

PriorityOrder ranked_by_weight(const std::vector<std::vector<double>>& w) {
  PriorityOrder order;
  for (size_t i = 0; i < w.size(); ++i)
    for (size_t j = 0; j < w[i].size(); ++j)
      order.emplace_back(static_cast<int>(i), static_cast<int>(j));
  std::stable_sort(order.begin(), order.end(),
                   [&w](const auto& a, const auto& b) {
                     double wa = w[a.first][a.second];
                     double wb = w[b.first][b.second];
                     if (wa != wb) return wa > wb;
                     return a < b;
                   });
  return order;
}

PriorityOrder cmu_order(const SystemParams& p) {
  if (!(weight_gap(p) > 0.0))
    throw std::runtime_error(
        "cmu order undefined: two competing links share the same weight");
  std::vector<std::vector<double>> w(p.num_queues(),
                                     std::vector<double>(p.num_servers()));
  for (int i = 0; i < p.num_queues(); ++i)
    for (int j = 0; j < p.num_servers(); ++j) w[i][j] = p.weight(i, j);
  return ranked_by_weight(w);
}

Decision greedy_priority_assignment(const PriorityOrder& order,
                                    const std::vector<int>& q,
                                    int num_servers) {
  Decision d;
  d.server_to_queue.assign(num_servers, -1);
  std::vector<int> granted(q.size(), 0);
  for (const auto& [i, j] : order) {
    if (d.server_to_queue[j] >= 0) continue;
    if (granted[i] < q[i]) {
      d.server_to_queue[j] = i;
      ++granted[i];
    }
  }
  return d;
}

//---------------------------------------------------------------------------
// Max weight matching.

namespace {

constexpr double kTieTol = 1e-12;

struct Candidate {
  double objective = -std::numeric_limits<double>::infinity();
  int pairs = -1;
  std::vector<std::pair<int, int>> pair_list;
  std::vector<int> assignment;

  // Preference: objective, then pair count, then smallest pair list.
  bool better_than(const Candidate& o) const {
    if (objective > o.objective + kTieTol) return true;
    if (objective < o.objective - kTieTol) return false;
    if (pairs != o.pairs) return pairs > o.pairs;
    return pair_list < o.pair_list;
  }
};

Decision max_weight_enumerate(const std::vector<std::vector<double>>& w,
                              const std::vector<int>& q) {
  const int U = static_cast<int>(q.size());
  const int K = static_cast<int>(w[0].size());
  std::vector<int> choice(K, -1);  // -1 idle, else queue index
  Candidate best;
  for (;;) {
    std::vector<int> granted(U, 0);
    bool feasible = true;
    double obj = 0.0;
    int pairs = 0;
    for (int j = 0; j < K && feasible; ++j) {
      int i = choice[j];
      if (i < 0) continue;
      if (++granted[i] > q[i]) feasible = false;
      obj += w[i][j];
      ++pairs;
    }
    if (feasible) {
      Candidate cand;
      cand.objective = obj;
      cand.pairs = pairs;
      for (int j = 0; j < K; ++j)
        if (choice[j] >= 0) cand.pair_list.emplace_back(choice[j], j);
      std::sort(cand.pair_list.begin(), cand.pair_list.end());
      cand.assignment = choice;
      if (cand.better_than(best)) best = std::move(cand);
    }
    int j = 0;
    while (j < K && choice[j] == U - 1) choice[j++] = -1;
    if (j == K) break;
    ++choice[j];
  }
  Decision d;
  d.server_to_queue = best.assignment;
  return d;
}

// Hungarian algorithm on servers x job slots, minimizing negated weights.
Decision max_weight_hungarian(const std::vector<std::vector<double>>& w,
                              const std::vector<int>& q) {
  const int U = static_cast<int>(q.size());
  const int K = static_cast<int>(w[0].size());
  std::vector<int> slot_queue;  // queue of each job slot, -1 for idle slots
  for (int i = 0; i < U; ++i)
    for (int k = 0; k < std::min(q[i], K); ++k) slot_queue.push_back(i);
  for (int j = 0; j < K; ++j) slot_queue.push_back(-1);

  const int n = K;
  const int m = static_cast<int>(slot_queue.size());
  auto cost = [&](int server, int slot) {
    int i = slot_queue[slot];
    return i < 0 ? 0.0 : -w[i][server];
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  Decision d;
  d.server_to_queue.assign(K, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] != 0) d.server_to_queue[p[j] - 1] = slot_queue[j - 1];
  return d;
}

}  // namespace

Decision max_weight_assignment(const std::vector<std::vector<double>>& w,
                               const std::vector<int>& q) {
  const int U = static_cast<int>(q.size());
  const int K = static_cast<int>(w[0].size());
  double combos = std::pow(static_cast<double>(U + 1), K);
  if (combos <= 2e5) return max_weight_enumerate(w, q);
  return max_weight_hungarian(w, q);
}

//---------------------------------------------------------------------------

EmpiricalStats::EmpiricalStats(int num_queues, int num_servers)
    : samples(num_queues, std::vector<long long>(num_servers, 0)),
      successes(num_queues, std::vector<long long>(num_servers, 0)) {}

void EmpiricalStats::record(int queue, int server, bool success) {
  ++samples[queue][server];
  if (success) ++successes[queue][server];
}

double EmpiricalStats::mu_hat(int queue, int server) const {
  long long n = samples[queue][server];
  return n == 0 ? 0.0
               : static_cast<double>(successes[queue][server]) /
                     static_cast<double>(n);
}

std::vector<std::vector<double>> EmpiricalStats::mu_hat_matrix() const {
  std::vector<std::vector<double>> w(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    w[i].resize(samples[i].size());
    for (size_t j = 0; j < samples[i].size(); ++j)
      w[i][j] = mu_hat(static_cast<int>(i), static_cast<int>(j));
  }
  return w;
}

long long EmpiricalStats::n_min() const {
  long long best = std::numeric_limits<long long>::max();
  for (const auto& row : samples)
    for (long long n : row) best = std::min(best, n);
  return best;
}

double exploration_threshold(long long t) {
  if (t <= 1) return 1.0;
  double l = std::log(static_cast<double>(t - 1));
  return std::max(1.0, 2.0 * l * l * l);
}

double exploration_gate_prob(long long t, int num_queues) {
  if (t <= 1) return 0.0;
  double l = std::log(static_cast<double>(t));
  return std::min(1.0, 3.0 * num_queues * l * l / static_cast<double>(t));
}

//---------------------------------------------------------------------------

void Scheduler::observe(long long, const Decision&,
                        const std::vector<uint8_t>&) {}

StaticPriorityScheduler::StaticPriorityScheduler(PriorityOrder order,
                                                 int num_servers,
                                                 std::string name)
    : order_(std::move(order)), num_servers_(num_servers),
      name_(std::move(name)) {}

Decision StaticPriorityScheduler::decide(long long, const std::vector<int>& q) {
  return greedy_priority_assignment(order_, q, num_servers_);
}

MaxWeightScheduler::MaxWeightScheduler(std::vector<std::vector<double>> weights,
                                       std::string name)
    : weights_(std::move(weights)), name_(std::move(name)) {}

Decision MaxWeightScheduler::decide(long long, const std::vector<int>& q) {
  return max_weight_assignment(weights_, q);
}

CmuHatSingleScheduler::CmuHatSingleScheduler(const SystemParams& p)
    : cost_(p.cost), stats_(p.num_queues(), 1) {
  if (p.num_servers() != 1)
    throw std::runtime_error("cmuhat-single needs a single server");
}

Decision CmuHatSingleScheduler::decide(long long, const std::vector<int>& q) {
  std::vector<std::vector<double>> w(cost_.size(), std::vector<double>(1));
  for (size_t i = 0; i < cost_.size(); ++i)
    w[i][0] = cost_[i] * stats_.mu_hat(static_cast<int>(i), 0);
  return greedy_priority_assignment(ranked_by_weight(w), q, 1);
}

void CmuHatSingleScheduler::observe(long long, const Decision& d,
                                    const std::vector<uint8_t>& success) {
  if (d.server_to_queue[0] >= 0)
    stats_.record(d.server_to_queue[0], 0, success[0]);
}

CmuHatParallelScheduler::CmuHatParallelScheduler(const SystemParams& p,
                                                 uint64_t seed, Exploit exploit)
    : cost_(p.cost), num_queues_(p.num_queues()),
      num_servers_(p.num_servers()),
      stats_(p.num_queues(), p.num_servers()),
      gate_(seed, "explore-gate"), pick_(seed, "explore-pick"),
      exploit_(exploit) {}

Decision CmuHatParallelScheduler::decide(long long t,
                                         const std::vector<int>& q) {
  bool explore = false;
  if (stats_.n_min() < exploration_threshold(t))
    explore = gate_.bernoulli_at(static_cast<uint64_t>(t),
                                 exploration_gate_prob(t, num_queues_));
  Decision d;
  if (explore) {
    last_explore_slot_ = t;
    int m = pick_.pick_at(static_cast<uint64_t>(t), num_queues_);
    d.server_to_queue.assign(num_servers_, -1);
    std::vector<int> granted(num_queues_, 0);
    for (int j = 0; j < num_servers_; ++j) {
      int i = (j + m) % num_queues_;
      if (granted[i] < q[i]) {
        d.server_to_queue[j] = i;
        ++granted[i];
      }
    }
  } else {
    std::vector<std::vector<double>> w(num_queues_,
                                       std::vector<double>(num_servers_));
    for (int i = 0; i < num_queues_; ++i)
      for (int j = 0; j < num_servers_; ++j)
        w[i][j] = cost_[i] * stats_.mu_hat(i, j);
    d = exploit_ == Exploit::MaxWeight
            ? max_weight_assignment(w, q)
            : greedy_priority_assignment(ranked_by_weight(w), q, num_servers_);
  }
  d.explored = explore;
  return d;
}

void CmuHatParallelScheduler::observe(long long, const Decision& d,
                                      const std::vector<uint8_t>& success) {
  for (int j = 0; j < num_servers_; ++j)
    if (d.server_to_queue[j] >= 0)
      stats_.record(d.server_to_queue[j], j, success[j]);
}

std::string CmuHatParallelScheduler::name() const {
  return exploit_ == Exploit::MaxWeight ? "cmuhat-parallel"
                                        : "cmuhat-parallel:greedy";
}

//---------------------------------------------------------------------------

namespace {

PriorityOrder parse_static_priority(const std::string& list,
                                    const SystemParams& p) {
  PriorityOrder order;
  std::vector<std::vector<char>> seen(
      p.num_queues(), std::vector<char>(p.num_servers(), 0));
  std::istringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto dash = tok.find('-');
    if (dash == std::string::npos)
      throw std::runtime_error("static-priority: expected queue-server pair, "
                               "got '" + tok + "'");
    int i = std::stoi(tok.substr(0, dash)) - 1;
    int j = std::stoi(tok.substr(dash + 1)) - 1;
    if (i < 0 || i >= p.num_queues() || j < 0 || j >= p.num_servers())
      throw std::runtime_error("static-priority: pair '" + tok +
                               "' is out of range");
    if (seen[i][j])
      throw std::runtime_error("static-priority: pair '" + tok +
                               "' listed twice");
    seen[i][j] = 1;
    order.emplace_back(i, j);
  }
  for (const auto& [i, j] : p.edges())
    if (!seen[i][j])
      throw std::runtime_error(
          "static-priority: link " + std::to_string(i + 1) + "-" +
          std::to_string(j + 1) + " has positive rate but no rank");
  for (int i = 0; i < p.num_queues(); ++i)
    for (int j = 0; j < p.num_servers(); ++j)
      if (!seen[i][j]) order.emplace_back(i, j);
  return order;
}

}  // namespace

std::unique_ptr<Scheduler> make_scheduler(const std::string& name,
                                          const SystemParams& p,
                                          uint64_t seed) {
  if (name == "cmu-maxweight") {
    std::vector<std::vector<double>> w(p.num_queues(),
                                       std::vector<double>(p.num_servers()));
    for (int i = 0; i < p.num_queues(); ++i)
      for (int j = 0; j < p.num_servers(); ++j) w[i][j] = p.weight(i, j);
    return std::make_unique<MaxWeightScheduler>(std::move(w), name);
  }
  if (name == "cmu-greedy-priority")
    return std::make_unique<StaticPriorityScheduler>(cmu_order(p),
                                                     p.num_servers(), name);
  if (name == "cmuhat-single")
    return std::make_unique<CmuHatSingleScheduler>(p);
  if (name == "cmuhat-parallel" || name == "cmuhat-parallel:maxweight")
    return std::make_unique<CmuHatParallelScheduler>(
        p, seed, CmuHatParallelScheduler::Exploit::MaxWeight);
  if (name == "cmuhat-parallel:greedy")
    return std::make_unique<CmuHatParallelScheduler>(
        p, seed, CmuHatParallelScheduler::Exploit::RankedGreedy);
  const std::string kStatic = "static-priority:";
  if (name.rfind(kStatic, 0) == 0)
    return std::make_unique<StaticPriorityScheduler>(
        parse_static_priority(name.substr(kStatic.size()), p),
        p.num_servers(), name);
  throw std::runtime_error(
      "unknown scheduler '" + name +
      "'; expected cmu-maxweight, cmu-greedy-priority, cmuhat-single, "
      "cmuhat-parallel[:greedy], or static-priority:<ranks>");
}

}  // namespace cmusim
