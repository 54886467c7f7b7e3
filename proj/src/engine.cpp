#include "cmusim/engine.hpp"

#include <algorithm>
#include <deque>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace cmusim {

namespace {

struct Streams {
  std::vector<Stream> arrival;
  std::vector<Stream> service;

  Streams(const SystemParams& p, uint64_t seed) {
    for (int i = 0; i < p.num_queues(); ++i) {
      arrival.emplace_back(seed, "arrival", i);
      service.emplace_back(seed, "service", i);
    }
  }
};

void check_decision(const SystemParams& p, const Decision& d,
                    const std::vector<int>& q) {
  if (static_cast<int>(d.server_to_queue.size()) != p.num_servers())
    throw std::logic_error("scheduler returned wrong assignment width");
  std::vector<int> granted(q.size(), 0);
  for (int i : d.server_to_queue) {
    if (i < -1 || i >= p.num_queues())
      throw std::logic_error("scheduler assigned an unknown queue");
    if (i >= 0 && ++granted[i] > q[i])
      throw std::logic_error("scheduler granted more servers than jobs");
  }
}

// Servers granted to queue i, best success rate first, so the n-th job of
// the queue meets the n-th service draw with the n-th best rate.
std::vector<int> grant_order(const SystemParams& p, const Decision& d, int i) {
  std::vector<int> js;
  for (size_t j = 0; j < d.server_to_queue.size(); ++j)
    if (d.server_to_queue[j] == i) js.push_back(static_cast<int>(j));
  std::sort(js.begin(), js.end(), [&](int a, int b) {
    if (p.mu[i][a] != p.mu[i][b]) return p.mu[i][a] > p.mu[i][b];
    return a < b;
  });
  return js;
}

// Evaluates one slot of service for one system. Z holds the per queue job
// counters shared by coupled runs; draws are addressed relative to them.
std::vector<int> apply_service(const SystemParams& p, const Streams& st,
                               const std::vector<uint64_t>& z,
                               const Decision& d,
                               std::vector<uint8_t>& success) {
  std::vector<int> served(p.num_queues(), 0);
  success.assign(p.num_servers(), 0);
  for (int i = 0; i < p.num_queues(); ++i) {
    auto js = grant_order(p, d, i);
    for (size_t n = 0; n < js.size(); ++n) {
      double u = st.service[i].uniform_at(z[i] + n + 1);
      if (u > 1.0 - p.mu[i][js[n]]) {
        success[js[n]] = 1;
        ++served[i];
      }
    }
  }
  return served;
}

std::vector<int> initial_state(const SystemParams& p,
                               const std::vector<int>& given) {
  if (given.empty()) return std::vector<int>(p.num_queues(), 0);
  if (static_cast<int>(given.size()) != p.num_queues())
    throw std::runtime_error("initial_state: wrong number of queues");
  for (int v : given)
    if (v < 0) throw std::runtime_error("initial_state: negative length");
  return given;
}

struct SlotAccounting {
  double total = 0.0;
  double factor = 1.0;
  double rate = 1.0;

  explicit SlotAccounting(const std::optional<double>& discount) {
    if (discount) rate = *discount;
  }
  void add(double slot_cost) {
    total += factor * slot_cost;
    factor *= rate;
  }
};

struct SystemState {
  std::vector<int> q;
  RunResult res;
  SlotAccounting acct;
  size_t next_sample = 0;

  SystemState(const SystemParams& p, const std::vector<int>& init,
              const std::optional<double>& discount)
      : q(initial_state(p, init)), acct(discount) {}

  void slot(const SystemParams& p, Scheduler& sched, const Streams& st,
            const std::vector<uint64_t>& z, long long t,
            const std::vector<uint8_t>& arrived,
            const std::vector<long long>& sample_points, bool keep_trace,
            bool keep_cost_path) {
    Decision d = sched.decide(t, q);
    check_decision(p, d, q);
    std::vector<uint8_t> success;
    auto served = apply_service(p, st, z, d, success);

    double slot_cost = 0.0;
    for (int i = 0; i < p.num_queues(); ++i) slot_cost += p.cost[i] * q[i];
    acct.add(slot_cost);
    if (keep_cost_path) res.cost_path.push_back(slot_cost);
    if (d.explored) res.last_explore_slot = t;
    if (keep_trace)
      res.trace.push_back({t, q, arrived, d.server_to_queue, success,
                           slot_cost, d.explored});
    while (next_sample < sample_points.size() &&
           sample_points[next_sample] == t) {
      res.cost_at_sample.push_back(acct.total);
      res.q_at_sample.push_back(q);
      ++next_sample;
    }
    sched.observe(t, d, success);
    for (int i = 0; i < p.num_queues(); ++i)
      q[i] = q[i] - served[i] + arrived[i];
  }

  RunResult finish() {
    res.total_cost = acct.total;
    res.final_q = q;
    return std::move(res);
  }
};

}  // namespace

RunResult run(const SystemParams& p, Scheduler& sched, const RunOptions& opt) {
  Streams st(p, opt.seed);
  SystemState sys(p, opt.initial_state, opt.discount);
  std::vector<uint64_t> z(p.num_queues(), 0);
  std::vector<uint8_t> arrived(p.num_queues());
  for (long long t = 1; t <= opt.horizon; ++t) {
    for (int i = 0; i < p.num_queues(); ++i)
      arrived[i] = st.arrival[i].bernoulli_at(static_cast<uint64_t>(t),
                                              p.lambda[i]);
    std::vector<int> q_before = sys.q;
    sys.slot(p, sched, st, z, t, arrived, opt.sample_points, opt.keep_trace,
             opt.keep_cost_path);
    for (int i = 0; i < p.num_queues(); ++i) z[i] += q_before[i];
  }
  return sys.finish();
}

CoupledResult coupled_run(const SystemParams& p, Scheduler& sched_a,
                          Scheduler& sched_b, const CoupledOptions& opt) {
  Streams st(p, opt.seed);
  SystemState a(p, opt.initial_a, opt.discount);
  SystemState b(p, opt.initial_b, opt.discount);
  std::vector<uint64_t> z(p.num_queues(), 0);
  std::vector<uint8_t> arrived(p.num_queues());
  CoupledResult out;
  for (long long t = 1; t <= opt.horizon; ++t) {
    for (int i = 0; i < p.num_queues(); ++i)
      arrived[i] = st.arrival[i].bernoulli_at(static_cast<uint64_t>(t),
                                              p.lambda[i]);
    for (int i = 0; i < p.num_queues(); ++i)
      if (a.q[i] > b.q[i]) {
        ++out.dominance_violations;
        break;
      }
    std::vector<int> qa = a.q, qb = b.q;
    a.slot(p, sched_a, st, z, t, arrived, opt.sample_points, opt.keep_trace,
           opt.keep_cost_path);
    b.slot(p, sched_b, st, z, t, arrived, opt.sample_points, opt.keep_trace,
           opt.keep_cost_path);
    for (int i = 0; i < p.num_queues(); ++i)
      z[i] += static_cast<uint64_t>(std::max(qa[i], qb[i]));
  }
  out.a = a.finish();
  out.b = b.finish();
  return out;
}

bool single_server_work_conserving(const std::vector<TraceRecord>& trace) {
  for (const auto& rec : trace) {
    if (rec.assign.size() != 1) return false;
    long long total = 0;
    for (int v : rec.q) total += v;
    if (total > 0 && rec.assign[0] < 0) return false;
  }
  return true;
}

//---------------------------------------------------------------------------

namespace {

void write_pairs(std::ostream& os, const std::vector<std::pair<int, int>>& ps) {
  for (size_t k = 0; k < ps.size(); ++k) {
    if (k) os << ';';
    os << ps[k].first + 1 << '-' << ps[k].second + 1;
  }
}

}  // namespace

void write_trace_csv(std::ostream& os, const SystemParams& p,
                     const RunResult& r) {
  os << 't';
  for (int i = 0; i < p.num_queues(); ++i) os << ",q_" << i + 1;
  for (int i = 0; i < p.num_queues(); ++i) os << ",a_" << i + 1;
  os << ",assign,served,slot_cost,explored\n";
  os << std::setprecision(12);
  for (const auto& rec : r.trace) {
    os << rec.t;
    for (int v : rec.q) os << ',' << v;
    for (uint8_t v : rec.arrived) os << ',' << int(v);
    os << ',';
    std::vector<std::pair<int, int>> assigned, succeeded;
    for (size_t j = 0; j < rec.assign.size(); ++j)
      if (rec.assign[j] >= 0) {
        assigned.emplace_back(rec.assign[j], static_cast<int>(j));
        if (rec.served[j])
          succeeded.emplace_back(rec.assign[j], static_cast<int>(j));
      }
    std::sort(assigned.begin(), assigned.end());
    std::sort(succeeded.begin(), succeeded.end());
    write_pairs(os, assigned);
    os << ',';
    write_pairs(os, succeeded);
    os << ',' << rec.slot_cost << ',' << int(rec.explored) << '\n';
  }
}

//---------------------------------------------------------------------------

QueuePicker priority_picker(const PriorityOrder& order) {
  return [order](const std::vector<int>& q, long long) {
    for (const auto& [i, j] : order)
      if (q[i] > 0) return i;
    return -1;
  };
}

QueuePicker round_robin_picker() {
  return [pos = 0](const std::vector<int>& q, long long) mutable {
    const int u = static_cast<int>(q.size());
    for (int k = 1; k <= u; ++k) {
      int i = (pos + k) % u;
      if (q[i] > 0) {
        pos = i;
        return i;
      }
    }
    return -1;
  };
}

QueuePicker longest_queue_picker() {
  return [](const std::vector<int>& q, long long) {
    int best = -1;
    for (size_t i = 0; i < q.size(); ++i)
      if (q[i] > 0 && (best < 0 || q[i] > q[best]))
        best = static_cast<int>(i);
    return best;
  };
}

WorkloadRunResult geometric_workload_run(const SystemParams& p,
                                         const QueuePicker& pick,
                                         long long horizon, uint64_t seed) {
  if (p.num_servers() != 1)
    throw std::runtime_error("workload run needs a single server");
  const int U = p.num_queues();
  for (int i = 0; i < U; ++i)
    if (!(p.mu[i][0] > 0.0))
      throw std::runtime_error("workload run needs positive service rates");

  std::vector<Stream> gap, size;
  std::vector<long long> next_arrival(U), arrivals(U, 0);
  std::vector<std::deque<long long>> work(U);
  for (int i = 0; i < U; ++i) {
    gap.emplace_back(seed, "gap", i);
    size.emplace_back(seed, "size", i);
    next_arrival[i] = gap[i].geometric_at(0, p.lambda[i]);
  }

  WorkloadRunResult res;
  std::vector<int> q(U, 0);
  for (long long t = 1; t <= horizon; ++t) {
    bool empty = true;
    double slot_cost = 0.0;
    for (int i = 0; i < U; ++i) {
      q[i] = static_cast<int>(work[i].size());
      if (q[i] > 0) empty = false;
      slot_cost += p.cost[i] * q[i];
    }
    res.total_cost += slot_cost;
    if (empty) {
      res.zero_hits.push_back(t);
    } else {
      int i = pick(q, t);
      if (i < 0 || i >= U || work[i].empty())
        throw std::logic_error("picker chose an empty queue");
      if (--work[i].front() == 0) work[i].pop_front();
    }
    for (int i = 0; i < U; ++i) {
      if (next_arrival[i] == t) {
        work[i].push_back(size[i].geometric_at(arrivals[i], p.mu[i][0]));
        ++arrivals[i];
        next_arrival[i] += gap[i].geometric_at(arrivals[i], p.lambda[i]);
      }
    }
  }
  for (size_t k = 1; k < res.zero_hits.size(); ++k)
    res.cycle_lengths.push_back(res.zero_hits[k] - res.zero_hits[k - 1]);
  return res;
}

void write_cycles_csv(std::ostream& os, const WorkloadRunResult& r) {
  os << "cycle_index,length\n";
  for (size_t k = 0; k < r.cycle_lengths.size(); ++k)
    os << k + 1 << ',' << r.cycle_lengths[k] << '\n';
}

}  // namespace cmusim
