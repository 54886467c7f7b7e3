#include "cmusim/stability.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "cmusim/lp.hpp"

namespace cmusim {

//---------------------------------------------------------------------------
// Closed form scalar chain.

double GeomTailDist::at(int n) const {
  if (n < 0) return 0.0;
  if (n == 0) return pi0;
  if (n == 1) return pi1;
  return beta * pi1 * std::pow(alpha, n - 2);
}

double GeomTailDist::head_mass(int n) const {
  if (n < 0) return 0.0;
  if (n == 0) return pi0;
  double m = pi0 + pi1;
  if (n >= 2) m += beta * pi1 * (1.0 - std::pow(alpha, n - 1)) / (1.0 - alpha);
  return m;
}

GeomTailDist stationary_two_server_queue(double lambda, double mu1,
                                         double mu2) {
  GeomTailDist d;
  if (lambda <= 0.0) {
    d.stable = true;
    d.pi0 = 1.0;
    return d;
  }
  d.stable = lambda < mu1 + mu2;
  if (!d.stable) return d;

  // One step transition weights of the levels above 2: up one, down one,
  // down two. The tail decay alpha is the minimal root of the associated
  // quadratic, written in a form that survives p_down2 = 0.
  const double p_up = lambda * (1.0 - mu1) * (1.0 - mu2);
  const double p_down1 =
      (1.0 - lambda) * ((1.0 - mu1) * mu2 + (1.0 - mu2) * mu1) +
      lambda * mu1 * mu2;
  const double p_down2 = (1.0 - lambda) * mu1 * mu2;
  const double s = p_down1 + p_down2;
  const double disc = std::sqrt(s * s + 4.0 * p_up * p_down2);
  d.alpha = 2.0 * p_up / (s + disc);
  d.beta = 2.0 * lambda * (1.0 - mu1) / (s + disc);

  if (mu1 == 0.0) {
    // The dedicated server never finishes, so the queue never drains past
    // one job; all mass sits on the levels from one up.
    d.pi0 = 0.0;
    d.pi1 = 1.0 / (1.0 + d.beta / (1.0 - d.alpha));
  } else {
    const double a =
        lambda / ((1.0 - lambda) * mu1 + d.beta * p_down2);
    d.pi0 = 1.0 / (1.0 + a * (1.0 + d.beta / (1.0 - d.alpha)));
    d.pi1 = a * d.pi0;
  }
  return d;
}

//---------------------------------------------------------------------------
// Truncated solves.

namespace {

struct SubNet {
  std::vector<int> queues;   // global ids
  std::vector<int> servers;  // global ids
  std::vector<double> lambda;
  std::vector<std::vector<double>> mu;  // local U x K
  PriorityOrder local_order;

  int num_queues() const { return static_cast<int>(queues.size()); }
  int num_servers() const { return static_cast<int>(servers.size()); }
};

SubNet make_subnet(const SystemParams& p, const std::vector<int>& queues,
                   const std::vector<int>& servers,
                   const PriorityOrder& order) {
  SubNet net;
  net.queues = queues;
  net.servers = servers;
  std::vector<int> ql(p.num_queues(), -1), sl(p.num_servers(), -1);
  for (size_t a = 0; a < queues.size(); ++a) ql[queues[a]] = static_cast<int>(a);
  for (size_t a = 0; a < servers.size(); ++a)
    sl[servers[a]] = static_cast<int>(a);
  for (int i : queues) {
    net.lambda.push_back(p.lambda[i]);
    std::vector<double> row;
    for (int j : servers) row.push_back(p.mu[i][j]);
    net.mu.push_back(std::move(row));
  }
  // Zero rate links are dropped: they neither serve nor, for the purposes
  // of this analysis, occupy a server.
  for (const auto& [i, j] : order)
    if (ql[i] >= 0 && sl[j] >= 0 && p.mu[i][j] > 0.0)
      net.local_order.emplace_back(ql[i], sl[j]);
  return net;
}

long long state_index(const std::vector<int>& q, const std::vector<int>& box) {
  long long idx = 0;
  for (size_t d = 0; d < box.size(); ++d) idx = idx * box[d] + q[d];
  return idx;
}

bool next_state(std::vector<int>& q, const std::vector<int>& box) {
  for (int d = static_cast<int>(box.size()) - 1; d >= 0; --d) {
    if (++q[d] < box[d]) return true;
    q[d] = 0;
  }
  return false;
}

// Distribution of the next value of one queue given its granted service
// rates, clamped to the box.
std::vector<std::pair<int, double>> queue_step_dist(int q, double lambda,
                                                    const std::vector<double>&
                                                        rates,
                                                    int cap) {
  std::vector<double> served{1.0};
  for (double r : rates) {
    std::vector<double> nxt(served.size() + 1, 0.0);
    for (size_t s = 0; s < served.size(); ++s) {
      nxt[s] += served[s] * (1.0 - r);
      nxt[s + 1] += served[s] * r;
    }
    served = std::move(nxt);
  }
  std::map<int, double> acc;
  for (size_t s = 0; s < served.size(); ++s) {
    if (served[s] == 0.0) continue;
    int base = q - static_cast<int>(s);
    acc[std::min(base, cap)] += served[s] * (1.0 - lambda);
    acc[std::min(base + 1, cap)] += served[s] * lambda;
  }
  return {acc.begin(), acc.end()};
}

struct ChainData {
  std::vector<int> box;
  long long states = 0;
  // CSR style successor lists.
  std::vector<int> offsets;
  std::vector<int> target;
  std::vector<double> prob;
};

ChainData build_chain(const SubNet& net, const std::vector<int>& box) {
  ChainData chain;
  chain.box = box;
  chain.states = 1;
  for (int b : box) chain.states *= b;
  chain.offsets.reserve(chain.states + 1);
  chain.offsets.push_back(0);

  const int u = net.num_queues();
  std::vector<int> q(u, 0);
  std::vector<std::vector<std::pair<int, double>>> per_queue(u);
  do {
    Decision d = greedy_priority_assignment(net.local_order, q,
                                            net.num_servers());
    for (int i = 0; i < u; ++i) {
      std::vector<double> rates;
      for (int j = 0; j < net.num_servers(); ++j)
        if (d.server_to_queue[j] == i) rates.push_back(net.mu[i][j]);
      per_queue[i] = queue_step_dist(q[i], net.lambda[i], rates, box[i] - 1);
    }
    // Cartesian product of the per queue marginals.
    std::vector<size_t> pickidx(u, 0);
    for (;;) {
      long long idx = 0;
      double pr = 1.0;
      for (int i = 0; i < u; ++i) {
        idx = idx * box[i] + per_queue[i][pickidx[i]].first;
        pr *= per_queue[i][pickidx[i]].second;
      }
      chain.target.push_back(static_cast<int>(idx));
      chain.prob.push_back(pr);
      int d2 = u - 1;
      while (d2 >= 0 && ++pickidx[d2] == per_queue[d2].size())
        pickidx[d2--] = 0;
      if (d2 < 0) break;
    }
    chain.offsets.push_back(static_cast<int>(chain.target.size()));
  } while (next_state(q, box));
  return chain;
}

constexpr long long kDenseStates = 2048;
constexpr double kPowerTol = 1e-13;
constexpr int kPowerMaxIters = 20000;

void solve_dense(const ChainData& chain, std::vector<double>& pi) {
  const long long n = chain.states;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (long long s = 0; s < n; ++s)
    for (int k = chain.offsets[s]; k < chain.offsets[s + 1]; ++k)
      a(chain.target[k], s) += chain.prob[k];
  for (long long s = 0; s < n; ++s) a(s, s) -= 1.0;
  for (long long s = 0; s < n; ++s) a(n - 1, s) = 1.0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd x = a.partialPivLu().solve(b);
  pi.assign(n, 0.0);
  double total = 0.0;
  for (long long s = 0; s < n; ++s) {
    pi[s] = std::max(0.0, x(s));
    total += pi[s];
  }
  for (double& v : pi) v /= total;
}

int solve_power(const ChainData& chain, std::vector<double>& pi) {
  const long long n = chain.states;
  std::vector<double> cur(n, 0.0), nxt(n, 0.0);
  cur[0] = 1.0;
  for (int it = 1; it <= kPowerMaxIters; ++it) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (long long s = 0; s < n; ++s) {
      double m = cur[s];
      if (m == 0.0) continue;
      for (int k = chain.offsets[s]; k < chain.offsets[s + 1]; ++k)
        nxt[chain.target[k]] += m * chain.prob[k];
    }
    double diff = 0.0;
    for (long long s = 0; s < n; ++s) diff += std::fabs(nxt[s] - cur[s]);
    cur.swap(nxt);
    if (diff < kPowerTol) {
      pi = std::move(cur);
      return it;
    }
  }
  pi = std::move(cur);
  return -1;
}

double clamp_layer_mass(const std::vector<double>& pi,
                        const std::vector<int>& box) {
  double m = 0.0;
  std::vector<int> q(box.size(), 0);
  long long idx = 0;
  do {
    bool clamped = false;
    for (size_t d = 0; d < box.size(); ++d)
      if (q[d] == box[d] - 1) clamped = true;
    if (clamped) m += pi[idx];
    ++idx;
  } while (next_state(q, box));
  return m;
}

}  // namespace

double StationaryResult::prob(const std::vector<int>& local_q) const {
  for (size_t d = 0; d < box.size(); ++d)
    if (local_q[d] < 0 || local_q[d] >= box[d]) return 0.0;
  return pi[state_index(local_q, box)];
}

double StationaryResult::mass(
    const std::function<bool(const std::vector<int>&)>& pred) const {
  double m = 0.0;
  std::vector<int> q(box.size(), 0);
  long long idx = 0;
  do {
    if (pred(q)) m += pi[idx];
    ++idx;
  } while (next_state(q, box));
  return m;
}

StationaryResult stationary_truncated(const SystemParams& p,
                                      const std::vector<int>& queues,
                                      const std::vector<int>& servers,
                                      const PriorityOrder& order,
                                      const TruncationConfig& cfg) {
  SubNet net = make_subnet(p, queues, servers, order);
  const int u = net.num_queues();
  if (u == 0) throw std::invalid_argument("empty queue set");

  StationaryResult res;
  res.queues = queues;
  res.servers = servers;
  int side = u == 1 ? cfg.start_scalar : cfg.start_joint;
  for (;;) {
    std::vector<int> box(u, side);
    long long states = 1;
    for (int b : box) states *= b;
    if (states > cfg.max_states) {
      res.ok = false;
      res.note = "state budget exhausted at " + std::to_string(states) +
                 " states with clamp mass " + std::to_string(res.boundary_mass);
      return res;
    }
    ChainData chain = build_chain(net, box);
    res.box = box;
    res.states = states;
    if (states <= kDenseStates) {
      solve_dense(chain, res.pi);
      res.iterations = 0;
    } else {
      res.iterations = solve_power(chain, res.pi);
      if (res.iterations < 0) {
        res.ok = false;
        res.note = "power iteration stalled on " + std::to_string(states) +
                   " states";
        return res;
      }
    }
    res.boundary_mass = clamp_layer_mass(res.pi, box);
    if (res.boundary_mass <= cfg.boundary_tol) {
      res.ok = true;
      return res;
    }
    side = static_cast<int>(std::ceil(side * cfg.growth));
  }
}

double server_free_probability(const SystemParams& p,
                               const StationaryResult& st,
                               const PriorityOrder& order, int server) {
  SubNet net = make_subnet(p, st.queues, st.servers, order);
  int ls = -1;
  for (size_t a = 0; a < st.servers.size(); ++a)
    if (st.servers[a] == server) ls = static_cast<int>(a);
  if (ls < 0) return 1.0;

  double m = 0.0;
  std::vector<int> q(st.box.size(), 0);
  long long idx = 0;
  do {
    Decision d =
        greedy_priority_assignment(net.local_order, q, net.num_servers());
    if (d.server_to_queue[ls] < 0) m += st.pi[idx];
    ++idx;
  } while (next_state(q, st.box));
  return m;
}

//---------------------------------------------------------------------------
// Two by two classifier.

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "Stable";
    case Verdict::Unstable: return "Unstable";
    default: return "Boundary";
  }
}

TwoByTwoClassification classify_2x2(const SystemParams& p, double tol) {
  if (p.num_queues() != 2 || p.num_servers() != 2)
    throw std::runtime_error("classifier needs two queues and two servers");
  const double w00 = p.weight(0, 0), w01 = p.weight(0, 1);
  const double w10 = p.weight(1, 0), w11 = p.weight(1, 1);
  if (!(w10 < w00 && w11 < w01))
    throw std::runtime_error(
        "classifier inapplicable: both servers must rank queue 1 first");
  if (!(p.mu[0][1] < p.mu[0][0]))
    throw std::runtime_error(
        "classifier inapplicable: queue 1 must rank server 1 first");

  TwoByTwoClassification out;
  const double band = tol / 2.0;
  const double sum1 = p.mu[0][0] + p.mu[0][1];
  if (p.lambda[0] >= sum1 - band) {
    out.queue1.stable = false;
    if (p.lambda[0] <= sum1 + band) {
      out.verdict = Verdict::Boundary;
      out.note = "queue 1 sits on its own stability edge";
    } else {
      out.verdict = Verdict::Unstable;
      out.note = "queue 1 alone outruns both servers";
    }
    return out;
  }

  out.queue1 = stationary_two_server_queue(p.lambda[0], p.mu[0][0],
                                           p.mu[0][1]);
  out.lambda2_star = out.queue1.pi0 * p.mu[1][0] +
                     out.queue1.head_mass(1) * p.mu[1][1];
  const double diff = p.lambda[1] - out.lambda2_star;
  if (diff <= -band) {
    out.verdict = Verdict::Stable;
  } else if (diff >= band) {
    out.verdict = Verdict::Unstable;
    out.note = "queue 2 starves behind queue 1";
  } else {
    out.verdict = Verdict::Boundary;
    out.note = "queue 2 sits on the leftover capacity edge";
  }
  return out;
}

//---------------------------------------------------------------------------
// Feasibility game.

std::vector<std::vector<int>> compositions(int total, int parts) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(parts, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == parts - 1) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  if (parts > 0) rec(0, total);
  return out;
}

std::vector<double> service_rates(const SystemParams& p, const Decision& d) {
  std::vector<double> r(p.num_queues(), 0.0);
  for (size_t j = 0; j < d.server_to_queue.size(); ++j)
    if (d.server_to_queue[j] >= 0)
      r[d.server_to_queue[j]] += p.mu[d.server_to_queue[j]][j];
  return r;
}

double feasibility_value_at(const SystemParams& p, const AssignmentRule& rule,
                            const std::vector<double>& alpha) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& q : compositions(p.num_servers(), p.num_queues())) {
    auto r = service_rates(p, rule(q));
    double drift = 0.0;
    for (int i = 0; i < p.num_queues(); ++i)
      drift += alpha[i] * (r[i] - p.lambda[i]);
    worst = std::min(worst, drift);
  }
  return worst;
}

FeasibilityResult feasibility_game(const SystemParams& p,
                                   const AssignmentRule& rule) {
  const int u = p.num_queues();
  auto profiles = compositions(p.num_servers(), u);

  // Variables: alpha_1..alpha_U, v+ and v-.
  const int nv = u + 2;
  std::vector<lp::Row> rows;
  {
    lp::Row simplex;
    simplex.a.assign(nv, 0.0);
    for (int i = 0; i < u; ++i) simplex.a[i] = 1.0;
    simplex.rel = lp::Relation::Equal;
    simplex.b = 1.0;
    rows.push_back(std::move(simplex));
  }
  for (const auto& q : profiles) {
    auto r = service_rates(p, rule(q));
    lp::Row row;
    row.a.assign(nv, 0.0);
    for (int i = 0; i < u; ++i) row.a[i] = r[i] - p.lambda[i];
    row.a[u] = -1.0;
    row.a[u + 1] = 1.0;
    row.rel = lp::Relation::GreaterEq;
    row.b = 0.0;
    rows.push_back(std::move(row));
  }
  std::vector<double> obj(nv, 0.0);
  obj[u] = 1.0;
  obj[u + 1] = -1.0;

  auto sol = lp::maximize(obj, rows);
  if (sol.status != lp::Status::Optimal)
    throw std::runtime_error("feasibility game solve failed: " +
                             lp::to_string(sol.status));
  FeasibilityResult out;
  out.value = sol.objective;
  out.alpha.assign(sol.x.begin(), sol.x.begin() + u);

  double worst = std::numeric_limits<double>::infinity();
  for (const auto& q : profiles) {
    auto r = service_rates(p, rule(q));
    double drift = 0.0;
    for (int i = 0; i < u; ++i) drift += out.alpha[i] * (r[i] - p.lambda[i]);
    if (drift < worst) {
      worst = drift;
      out.worst_profile = q;
    }
  }
  return out;
}

//---------------------------------------------------------------------------
// Hierarchy.

std::string to_string(Ergodicity e) {
  switch (e) {
    case Ergodicity::Geometric: return "Geometric";
    case Ergodicity::Unstable: return "Unstable";
    default: return "Inconclusive";
  }
}

HierarchyResult hierarchy_levels(const SystemParams& p,
                                 const PriorityOrder& order) {
  const int u = p.num_queues(), k = p.num_servers();
  std::vector<std::vector<int>> pos(u, std::vector<int>(k, -1));
  for (size_t r = 0; r < order.size(); ++r)
    pos[order[r].first][order[r].second] = static_cast<int>(r);
  for (int i = 0; i < u; ++i)
    for (int j = 0; j < k; ++j)
      if (p.mu[i][j] > 0.0 && pos[i][j] < 0)
        throw std::runtime_error("priority order misses link " +
                                 std::to_string(i + 1) + "-" +
                                 std::to_string(j + 1));

  auto shared = [&](int a, int b) {
    std::vector<int> js;
    for (int j = 0; j < k; ++j)
      if (p.mu[a][j] > 0.0 && p.mu[b][j] > 0.0) js.push_back(j);
    return js;
  };
  auto dominates = [&](int a, int b) {
    for (int j : shared(a, b))
      if (pos[a][j] > pos[b][j]) return false;
    return true;
  };

  HierarchyResult res;
  for (int a = 0; a < u; ++a)
    for (int b = a + 1; b < u; ++b) {
      auto js = shared(a, b);
      if (js.empty()) continue;
      if (!dominates(a, b) && !dominates(b, a)) {
        std::ostringstream w;
        w << "queues " << a + 1 << " and " << b + 1
          << " split their shared servers";
        res.witness = w.str();
        return res;
      }
    }

  std::vector<char> placed(u, 0);
  int remaining = u;
  while (remaining > 0) {
    std::vector<int> level;
    for (int i = 0; i < u; ++i) {
      if (placed[i]) continue;
      bool minimal = true;
      for (int i2 = 0; i2 < u && minimal; ++i2) {
        if (i2 == i || placed[i2] || shared(i, i2).empty()) continue;
        if (!dominates(i, i2)) minimal = false;
      }
      if (minimal) level.push_back(i);
    }
    if (level.empty()) {
      std::ostringstream w;
      w << "priority cycle among queues";
      for (int i = 0; i < u; ++i)
        if (!placed[i]) w << ' ' << i + 1;
      res.witness = w.str();
      res.levels.clear();
      return res;
    }
    for (int i : level) placed[i] = 1;
    remaining -= static_cast<int>(level.size());
    res.levels.push_back(std::move(level));
  }
  res.hierarchical = true;
  return res;
}

HierarchicalVerdict hierarchical_verdict(const SystemParams& p,
                                         const PriorityOrder& order,
                                         const TruncationConfig& cfg,
                                         double tol) {
  HierarchicalVerdict out;
  out.hierarchy = hierarchy_levels(p, order);
  if (!out.hierarchy.hierarchical) {
    out.note = "order is not hierarchical: " + out.hierarchy.witness;
    return out;
  }

  const int k = p.num_servers();
  std::vector<int> lower;
  std::map<std::vector<int>, StationaryResult> cache;

  for (size_t lk = 0; lk < out.hierarchy.levels.size(); ++lk) {
    // Connected components of the lower levels under server sharing.
    std::vector<int> comp_of(p.num_queues(), -1);
    std::vector<std::vector<int>> comps;
    for (int i : lower) {
      if (comp_of[i] >= 0) continue;
      std::vector<int> comp{i}, frontier{i};
      comp_of[i] = static_cast<int>(comps.size());
      while (!frontier.empty()) {
        int a = frontier.back();
        frontier.pop_back();
        for (int b : lower) {
          if (comp_of[b] >= 0) continue;
          bool share = false;
          for (int j = 0; j < k && !share; ++j)
            share = p.mu[a][j] > 0.0 && p.mu[b][j] > 0.0;
          if (share) {
            comp_of[b] = comp_of[i];
            comp.push_back(b);
            frontier.push_back(b);
          }
        }
      }
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }

    for (int i : out.hierarchy.levels[lk]) {
      LevelCheck check;
      check.queue = i;
      check.level = static_cast<int>(lk) + 1;
      check.lambda = p.lambda[i];
      for (int j = 0; j < k; ++j) {
        if (!(p.mu[i][j] > 0.0)) continue;
        int neighbor = -1;
        for (int i2 : lower)
          if (p.mu[i2][j] > 0.0) neighbor = i2;
        double pfree = 1.0;
        if (neighbor >= 0) {
          const auto& comp = comps[comp_of[neighbor]];
          auto it = cache.find(comp);
          if (it == cache.end()) {
            std::vector<int> servers;
            for (int j2 = 0; j2 < k; ++j2)
              for (int i2 : comp)
                if (p.mu[i2][j2] > 0.0) {
                  servers.push_back(j2);
                  break;
                }
            it = cache
                     .emplace(comp, stationary_truncated(p, comp, servers,
                                                         order, cfg))
                     .first;
          }
          if (!it->second.ok) {
            out.checks.push_back(check);
            out.verdict = Ergodicity::Inconclusive;
            out.note = "stationary solve failed below queue " +
                       std::to_string(i + 1) + ": " + it->second.note;
            return out;
          }
          pfree = server_free_probability(p, it->second, order, j);
        }
        check.service_rate += pfree * p.mu[i][j];
      }
      const double slack = check.service_rate - check.lambda;
      check.pass = slack > tol;
      out.checks.push_back(check);
      if (slack < -tol) {
        out.verdict = Ergodicity::Unstable;
        std::ostringstream note;
        note << "queue " << i + 1 << " at level " << lk + 1
             << " starves: free service " << check.service_rate
             << " versus arrivals " << check.lambda;
        out.note = note.str();
        return out;
      }
      if (!check.pass) {
        out.verdict = Ergodicity::Inconclusive;
        out.note = "queue " + std::to_string(i + 1) +
                   " has slack inside the tolerance";
        return out;
      }
    }
    for (int i : out.hierarchy.levels[lk]) lower.push_back(i);
  }
  out.verdict = Ergodicity::Geometric;
  return out;
}

SystemParams m_network(double eps) {
  if (!(eps > 0.0 && eps < 0.2))
    throw std::invalid_argument("m_network needs eps in (0, 0.2)");
  SystemParams p;
  p.lambda = {0.4 + eps, 0.4 + eps};
  p.mu = {{0.4, 3.0 * eps, 0.0}, {0.0, 3.0 * eps, 0.4}};
  p.cost = {1.0, 1.0};
  return p;
}

}  // namespace cmusim
