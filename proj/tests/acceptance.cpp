// Acceptance gate: ten end to end checks across the scheduler, the engine,
// the stability machinery, and the learning experiments. Each check prints
// one PASS/FAIL line with its key numbers; the exit code is the number of
// failing checks, so a zero exit means the whole gate is green.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cmusim/engine.hpp"
#include "cmusim/experiments.hpp"
#include "cmusim/model.hpp"
#include "cmusim/rng.hpp"
#include "cmusim/scheduler.hpp"
#include "cmusim/stability.hpp"
#include "cmusim/stats.hpp"

namespace {

using namespace cmusim;
using Clock = std::chrono::steady_clock;

// Pinned tolerances. Loosening any of these weakens the gate; justify
// changes in review, not in code.
constexpr double kObjectiveTol = 1e-9;   // matching objective agreement
constexpr double kEnumTieTol = 1e-12;    // tie band inside the enumerator
constexpr double kTvTol = 1e-8;          // stationary law total variation
constexpr double kBoundaryTol = 1e-9;    // classification flip offset
constexpr double kSignBand = 1e-9;       // feasibility sign boundary band
constexpr double kRatePinTol = 1e-6;     // hand computed service rate pins
constexpr double kMarginFloor = 0.02;    // capacity slack that must imply
                                         // a geometric verdict
constexpr double kStableSlopeCap = 0.01;  // near zero growth on stable runs
constexpr double kGrowthFloor = 0.02;     // clear growth on unstable runs

struct Gate {
  int failures = 0;

  void report(int idx, bool ok, const std::string& name,
              const std::string& detail, double seconds) {
    if (!ok) ++failures;
    std::ostringstream line;
    line << "criterion " << std::setw(2) << idx << "  "
         << (ok ? "PASS" : "FAIL") << "  " << name << ": " << detail << " ["
         << std::fixed << std::setprecision(1) << seconds << "s]";
    std::cout << line.str() << std::endl;
  }
};

double elapsed(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

SystemParams make(std::vector<double> lambda,
                  std::vector<std::vector<double>> mu,
                  std::vector<double> cost) {
  SystemParams p;
  p.lambda = std::move(lambda);
  p.mu = std::move(mu);
  p.cost = std::move(cost);
  return p;
}

SystemParams three_single() {
  return make({0.1, 0.15, 0.2}, {{0.8}, {0.6}, {0.9}}, {1.0, 2.0, 1.5});
}

SystemParams overload_2x2() {
  return make({0.55, 0.6}, {{0.6, 0.5}, {0.1, 0.65}}, {2.0, 1.0});
}

SystemParams learn_2x2() {
  return make({0.5, 0.45}, {{0.7, 0.5}, {0.2, 0.6}}, {2.0, 1.0});
}

SystemParams w_network() {
  return make({0.3, 0.3, 0.1}, {{0.6, 0.0}, {0.55, 0.45}, {0.0, 0.6}},
              {1.5, 1.2, 0.8});
}

SystemParams ladder_network() {
  return make({0.15, 0.2, 0.25, 0.15},
              {{0.5, 0.0, 0.0},
               {0.55, 0.5, 0.0},
               {0.0, 0.5, 0.55},
               {0.0, 0.0, 0.5}},
              {1.0, 1.4, 2.0, 1.2});
}

//---------------------------------------------------------------------------
// Criterion 1: the matching routine against exhaustive enumeration with the
// same preference rules (objective, then more matched pairs, then the
// lexicographically smallest pair list).

struct BestAssignment {
  bool any = false;
  double obj = 0.0;
  int npairs = -1;
  std::vector<std::pair<int, int>> plist;
};

void consider(const std::vector<std::vector<double>>& w,
              const std::vector<int>& assign, BestAssignment& best) {
  double obj = 0.0;
  int npairs = 0;
  std::vector<std::pair<int, int>> plist;
  for (size_t j = 0; j < assign.size(); ++j)
    if (assign[j] >= 0) {
      obj += w[assign[j]][j];
      ++npairs;
      plist.emplace_back(assign[j], static_cast<int>(j));
    }
  std::sort(plist.begin(), plist.end());
  bool take = false;
  if (!best.any || obj > best.obj + kEnumTieTol) {
    take = true;
  } else if (obj >= best.obj - kEnumTieTol) {
    if (npairs > best.npairs)
      take = true;
    else if (npairs == best.npairs && plist < best.plist)
      take = true;
  }
  if (take) {
    best.any = true;
    best.obj = obj;
    best.npairs = npairs;
    best.plist = std::move(plist);
  }
}

void enumerate_assignments(const std::vector<std::vector<double>>& w,
                           const std::vector<int>& q, size_t server,
                           std::vector<int>& granted, std::vector<int>& assign,
                           BestAssignment& best) {
  if (server == assign.size()) {
    consider(w, assign, best);
    return;
  }
  assign[server] = -1;
  enumerate_assignments(w, q, server + 1, granted, assign, best);
  for (size_t i = 0; i < q.size(); ++i) {
    if (granted[i] >= q[i]) continue;
    assign[server] = static_cast<int>(i);
    ++granted[i];
    enumerate_assignments(w, q, server + 1, granted, assign, best);
    --granted[i];
  }
  assign[server] = -1;
}

void criterion_matching(Gate& gate) {
  auto start = Clock::now();
  std::mt19937 gen(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int trials = 1000;
  int mismatches = 0;
  for (int trial = 0; trial < trials; ++trial) {
    int nq = 1 + static_cast<int>(u(gen) * 3.999);
    int ns = 1 + static_cast<int>(u(gen) * 3.999);
    std::vector<std::vector<double>> w(nq, std::vector<double>(ns));
    for (auto& row : w)
      for (double& x : row) {
        if (trial % 4 == 3)
          x = 0.4 * static_cast<int>(u(gen) * 3.999);  // force ties
        else
          x = 2.0 * u(gen);
      }
    std::vector<int> q(nq);
    for (int& x : q) x = static_cast<int>(u(gen) * 4.999);

    auto d = max_weight_assignment(w, q);
    double obj = 0.0;
    for (size_t j = 0; j < d.server_to_queue.size(); ++j)
      if (d.server_to_queue[j] >= 0) obj += w[d.server_to_queue[j]][j];

    BestAssignment best;
    std::vector<int> granted(nq, 0), assign(ns, -1);
    enumerate_assignments(w, q, 0, granted, assign, best);

    if (std::fabs(obj - best.obj) > kObjectiveTol ||
        d.pairs() != best.plist)
      ++mismatches;
  }
  double secs = elapsed(start);
  std::ostringstream detail;
  detail << trials - mismatches << "/" << trials << " decisions identical";
  gate.report(1, mismatches == 0 && secs < 60.0,
              "max weight matching equals enumeration", detail.str(), secs);
}

//---------------------------------------------------------------------------
// Criterion 2: closed form stationary law of one queue with a primary and a
// helper server against the truncated chain solver, over a parameter grid
// that includes a vanishing helper.

void criterion_stationary(Gate& gate) {
  auto start = Clock::now();
  const double lambdas[] = {0.1, 0.3, 0.5, 0.7, 0.85};
  const double mu1s[] = {0.2, 0.4, 0.6, 0.8, 0.95};
  const double mu2s[] = {0.0, 0.15, 0.35, 0.55, 0.75};
  int points = 0;
  double worst_tv = 0.0;
  bool all_ok = true;
  for (double lam : lambdas)
    for (double m1 : mu1s)
      for (double m2 : mu2s) {
        if (lam >= m1 + m2 - 1e-12) continue;
        auto cf = stationary_two_server_queue(lam, m1, m2);
        auto p = make({lam}, {{m1, m2}}, {1.0});
        PriorityOrder order{{0, 0}, {0, 1}};
        TruncationConfig cfg;
        cfg.boundary_tol = 1e-11;
        auto st = stationary_truncated(p, {0}, {0, 1}, order, cfg);
        if (!cf.stable || !st.ok) {
          all_ok = false;
          continue;
        }
        int box = st.box[0];
        double tv = 0.0;
        for (int n = 0; n + 1 < box; ++n)
          tv += std::fabs(cf.at(n) - st.prob({n}));
        tv += std::fabs((1.0 - cf.head_mass(box - 2)) - st.prob({box - 1}));
        tv /= 2.0;
        worst_tv = std::max(worst_tv, tv);
        ++points;
      }
  double secs = elapsed(start);
  std::ostringstream detail;
  detail << std::scientific << std::setprecision(2) << "worst TV " << worst_tv
         << " over " << points << " stable grid points";
  gate.report(2, all_ok && points > 60 && worst_tv <= kTvTol && secs < 60.0,
              "closed form stationary law matches the truncated chain",
              detail.str(), secs);
}

//---------------------------------------------------------------------------
// Criterion 3: identical busy cycles for every work conserving single
// server rule on the shared workload construction.

void criterion_busy_cycles(Gate& gate) {
  auto start = Clock::now();
  auto p = three_single();
  auto order = cmu_order(p);
  std::vector<std::pair<std::string, PickerFactory>> policies{
      {"priority", [order] { return priority_picker(order); }},
      {"round-robin", [] { return round_robin_picker(); }},
      {"longest-queue", [] { return longest_queue_picker(); }},
  };
  std::vector<uint64_t> seeds;
  for (uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  auto check = busy_cycle_equality(p, policies, 10000, seeds);
  long long cycles = 0;
  for (const auto& base : check.baseline)
    cycles += static_cast<long long>(base.cycle_lengths.size());
  double secs = elapsed(start);
  std::ostringstream detail;
  if (check.all_equal)
    detail << "3 rules, 20 seeds, " << cycles << " cycles, all equal";
  else
    detail << check.detail;
  gate.report(3, check.all_equal && cycles > 1000,
              "busy cycle lists agree across work conserving rules",
              detail.str(), secs);
}

//---------------------------------------------------------------------------
// Criteria 4 and 9 share the plateau test: the paired cost gap psi must
// stop moving between the two largest horizons, within two pooled standard
// errors.

bool plateau(const RegretPoint& a, const RegretPoint& b, double& delta,
             double& band) {
  delta = std::fabs(b.psi - a.psi);
  band = 2.0 * std::hypot(a.se, b.se);
  return delta <= band;
}

void criterion_single_server_regret(Gate& gate) {
  auto start = Clock::now();
  auto p = three_single();
  RegretConfig cfg;
  cfg.learner = "cmuhat-single";
  cfg.reference = "cmu-greedy-priority";
  cfg.grid = {1000, 10000, 50000, 100000};
  cfg.reps = 200;
  cfg.seed = 11;
  auto curve = regret_experiment(p, cfg);
  double delta = 0.0, band = 0.0;
  bool flat = plateau(curve.points[2], curve.points[3], delta, band);
  double gap3 = curve.points[0].queue_gap;
  double gap4 = curve.points[1].queue_gap;
  bool decayed = gap4 <= 0.1 * gap3;
  double secs = elapsed(start);
  std::ostringstream detail;
  detail << std::setprecision(4) << "|psi(1e5)-psi(5e4)| " << delta
         << " <= band " << band << ", queue gap " << gap3 << " -> " << gap4;
  gate.report(4, flat && decayed && secs < 600.0,
              "single server learner regret plateaus", detail.str(), secs);
}

//---------------------------------------------------------------------------
// Criterion 5: under greedy priority on the overloaded two by two system
// the second queue grows linearly, while the static split capacity check
// still reports the arrival vector inside.

void criterion_instability(Gate& gate) {
  auto start = Clock::now();
  auto p = overload_2x2();
  const long long horizon = 100000;
  const int reps = 20;
  int significant = 0;
  double slope_sum = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    uint64_t seed = 5000 + static_cast<uint64_t>(rep);
    auto sched =
        make_scheduler("cmu-greedy-priority", p, substream(seed, "policy"));
    RunOptions opt;
    opt.horizon = horizon;
    opt.seed = seed;
    opt.keep_trace = true;
    auto r = run(p, *sched, opt);
    std::vector<double> q2(r.trace.size());
    for (size_t k = 0; k < r.trace.size(); ++k) q2[k] = r.trace[k].q[1];
    auto fit = batch_mean_slope(q2);
    slope_sum += fit.slope;
    if (fit.significant_positive) ++significant;
  }
  auto cap = capacity_contains(p);
  double secs = elapsed(start);
  std::ostringstream detail;
  detail << significant << "/" << reps << " growing, mean slope "
         << std::setprecision(4) << slope_sum / reps << ", margin "
         << cap.margin << (cap.inside ? " inside" : " NOT inside");
  gate.report(5, significant >= 18 && cap.inside,
              "greedy priority grows queue 2 inside the capacity region",
              detail.str(), secs);
}

//---------------------------------------------------------------------------
// Criterion 6: the exact classification flips at the threshold, and long
// simulations on either side of it show the matching behaviour.

void criterion_boundary(Gate& gate) {
  auto start = Clock::now();
  auto base = overload_2x2();
  auto at = [&base](double l2) {
    auto p = base;
    p.lambda[1] = l2;
    return classify_2x2(p);
  };
  double star = at(base.lambda[1]).lambda2_star;
  bool flips = at(star - kBoundaryTol).verdict == Verdict::Stable &&
               at(star + kBoundaryTol).verdict == Verdict::Unstable &&
               at(star).verdict == Verdict::Boundary;

  auto below = base;
  below.lambda[1] = star - 0.05;
  auto above = base;
  above.lambda[1] = star + 0.05;
  auto calm = instability_demo(below, "cmu-greedy-priority", 200000, 5, 601);
  auto grow = instability_demo(above, "cmu-greedy-priority", 100000, 5, 602);
  bool sim_ok = calm.significant <= 2 &&
                std::fabs(calm.mean_slope) <= kStableSlopeCap &&
                grow.significant >= 4 && grow.mean_slope >= kGrowthFloor;
  double secs = elapsed(start);
  std::ostringstream detail;
  detail << std::setprecision(10) << "threshold " << star
         << (flips ? ", flips at +-1e-9" : ", NO flip") << std::setprecision(3)
         << "; slopes below/above " << calm.mean_slope << "/"
         << grow.mean_slope;
  gate.report(6, flips && sim_ok,
              "stability classification flips exactly at the threshold",
              detail.str(), secs);
}

//---------------------------------------------------------------------------
// Criterion 7: the drift game value sign against closed forms for two
// families, two flexible queues with full priority for queue 1, and the
// asymmetric two queue network whose second queue reaches one server.

void criterion_feasibility(Gate& gate) {
  auto start = Clock::now();
  std::mt19937 gen(71);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  int mismatches = 0, pos_a = 0, neg_a = 0;
  for (int done = 0; done < 100;) {
    int ns = 2 + static_cast<int>(u(gen) * 1.999);
    std::vector<double> row1(ns), row2(ns);
    double sum2 = 0.0;
    for (int j = 0; j < ns; ++j) {
      row2[j] = 0.05 + 0.5 * u(gen);
      row1[j] = std::min(0.99, row2[j] + 0.05 + 0.4 * u(gen));
      sum2 += row2[j];
    }
    double l1 = 0.05 + 0.9 * u(gen);
    double l2 = 0.05 + 0.9 * u(gen);
    if (std::fabs(l1 + l2 - sum2) <= kSignBand) continue;
    auto p = make({l1, l2}, {row1, row2}, {2.0, 1.0});
    PriorityOrder order;
    std::vector<int> idx(ns);
    for (int j = 0; j < ns; ++j) idx[j] = j;
    auto by_mu = [](const std::vector<double>& row, std::vector<int> ix) {
      std::sort(ix.begin(), ix.end(),
                [&row](int a, int b) { return row[a] > row[b]; });
      return ix;
    };
    for (int j : by_mu(row1, idx)) order.emplace_back(0, j);
    for (int j : by_mu(row2, idx)) order.emplace_back(1, j);
    auto rule = [order, ns](const std::vector<int>& q) {
      return greedy_priority_assignment(order, q, ns);
    };
    double value = feasibility_value_at(p, rule, {0.5, 0.5});
    double closed = 0.5 * (sum2 - l1 - l2);
    if (std::fabs(value - closed) > kSignBand ||
        (value > 0) != (closed > 0))
      ++mismatches;
    (closed > 0 ? pos_a : neg_a) += 1;
    ++done;
  }

  int pos_b = 0, neg_b = 0;
  for (int done = 0; done < 100;) {
    double m11 = 0.3 + 0.6 * u(gen);
    double m12 = m11 * (0.35 + 0.55 * u(gen));
    double m22 = 0.2 + 0.7 * u(gen);
    double c2 = (m12 / m22) * (0.3 + 0.5 * u(gen));
    double cap1 = m11 + m12;
    double l1 = (done % 2 == 0) ? cap1 * (0.15 + 0.6 * u(gen))
                                : 0.05 + 0.9 * u(gen);
    l1 = std::min(l1, 0.95);
    double cap2 = (1.0 - l1 / cap1) * m22;
    double l2 = (done % 2 == 0) ? std::max(0.01, cap2 * (0.2 + 0.6 * u(gen)))
                                : 0.05 + 0.9 * u(gen);
    l2 = std::min(l2, 0.95);
    if (std::fabs(l1 - cap1) <= kSignBand || std::fabs(l2 - cap2) <= kSignBand)
      continue;
    auto p = make({l1, l2}, {{m11, m12}, {0.0, m22}}, {1.0, c2});
    auto order = cmu_order(p);
    int ns = p.num_servers();
    auto rule = [order, ns](const std::vector<int>& q) {
      return greedy_priority_assignment(order, q, ns);
    };
    auto res = feasibility_game(p, rule);
    bool drains = l1 < cap1 && l2 < cap2;
    if (std::fabs(res.value) > kSignBand && (res.value > 0) != drains)
      ++mismatches;
    (drains ? pos_b : neg_b) += 1;
    ++done;
  }

  double secs = elapsed(start);
  std::ostringstream detail;
  detail << mismatches << " sign disagreements in 200 draws (splits "
         << pos_a << "/" << neg_a << " and " << pos_b << "/" << neg_b << ")";
  gate.report(7,
              mismatches == 0 && pos_a >= 20 && neg_a >= 20 && pos_b >= 20 &&
                  neg_b >= 20,
              "drift game sign matches the closed form conditions",
              detail.str(), secs);
}

//---------------------------------------------------------------------------
// Criterion 8: the hierarchical checker on the canonical networks, a
// randomized family with dedicated top queues and one flexible bottom
// queue, and the shared server construction that starves a queue under
// either priority order while capacity says feasible.

void criterion_hierarchy(Gate& gate) {
  auto start = Clock::now();
  std::ostringstream detail;

  auto w = w_network();
  auto vw = hierarchical_verdict(w, cmu_order(w));
  bool ok_w = vw.verdict == Ergodicity::Geometric &&
              vw.hierarchy.levels ==
                  std::vector<std::vector<int>>{{0}, {1}, {2}} &&
              vw.checks.size() == 3 &&
              std::fabs(vw.checks[1].service_rate - 0.725) < kRatePinTol;
  detail << "W " << to_string(vw.verdict);

  auto lad = ladder_network();
  auto vl = hierarchical_verdict(lad, cmu_order(lad));
  bool ok_l = vl.verdict == Ergodicity::Geometric &&
              vl.hierarchy.levels ==
                  std::vector<std::vector<int>>{{2}, {1, 3}, {0}} &&
              vl.checks.size() == 4;
  for (const auto& c : vl.checks) ok_l = ok_l && c.pass;
  detail << ", ladder " << to_string(vl.verdict);

  std::mt19937 gen(81);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int qualifying = 0;
  bool ok_gn = true;
  for (int trial = 0; trial < 30; ++trial) {
    int nd = 1 + static_cast<int>(u(gen) * 2.999);
    int nq = nd + 1;
    std::vector<std::vector<double>> mu(nq, std::vector<double>(nd, 0.0));
    std::vector<double> cost(nq, 1.0), lambda(nq, 0.0);
    double flex_cap = 0.0;
    for (int d = 0; d < nd; ++d) {
      mu[0][d] = 0.1 + 0.3 * u(gen);
      mu[d + 1][d] = 0.5 + 0.45 * u(gen);
      cost[d + 1] = (mu[0][d] / mu[d + 1][d]) * (1.05 + u(gen));
      lambda[d + 1] = mu[d + 1][d] * (0.25 + 0.55 * u(gen));
      flex_cap += mu[0][d] * (1.0 - lambda[d + 1] / mu[d + 1][d]);
    }
    lambda[0] = std::min(0.95, flex_cap * (0.3 + 0.8 * u(gen)));
    auto p = make(lambda, mu, cost);
    auto cap = capacity_contains(p);
    if (cap.margin <= kMarginFloor) continue;
    ++qualifying;
    auto v = hierarchical_verdict(p, cmu_order(p));
    if (v.verdict != Ergodicity::Geometric) ok_gn = false;
  }
  detail << ", dedicated-top family " << qualifying << " qualifying draws"
         << (ok_gn ? " all geometric" : " with NON geometric verdicts");

  auto m = m_network(0.01);
  PriorityOrder first{{0, 0}, {0, 1}, {1, 2}, {1, 1}};
  PriorityOrder second{{0, 0}, {1, 2}, {1, 1}, {0, 1}};
  auto v1 = hierarchical_verdict(m, first);
  auto v2 = hierarchical_verdict(m, second);
  auto mcap = capacity_contains(m);
  bool ok_m = v1.verdict == Ergodicity::Unstable &&
              v2.verdict == Ergodicity::Unstable && mcap.inside;
  detail << ", shared server net " << to_string(v1.verdict) << "/"
         << to_string(v2.verdict)
         << (mcap.inside ? " inside capacity" : " NOT inside");

  double secs = elapsed(start);
  gate.report(8, ok_w && ok_l && ok_gn && qualifying >= 10 && ok_m,
              "hierarchical checker reproduces the known verdicts",
              detail.str(), secs);
}

//---------------------------------------------------------------------------
// Criterion 9: the parallel server learner on a verified geometric
// instance, plateauing regret plus exploration dying out before half the
// horizon in nearly every replication.

void criterion_parallel_regret(Gate& gate) {
  auto start = Clock::now();
  auto p = learn_2x2();
  bool geo =
      hierarchical_verdict(p, cmu_order(p)).verdict == Ergodicity::Geometric;

  RegretConfig cfg;
  cfg.learner = "cmuhat-parallel";
  cfg.reference = "cmu-greedy-priority";
  cfg.grid = {50000, 100000};
  cfg.reps = 200;
  cfg.seed = 91;
  auto curve = regret_experiment(p, cfg);
  double delta = 0.0, band = 0.0;
  bool flat = plateau(curve.points[0], curve.points[1], delta, band);

  const long long horizon = 100000;
  int early = 0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    uint64_t seed = 9000 + static_cast<uint64_t>(rep);
    auto sched =
        make_scheduler("cmuhat-parallel", p, substream(seed, "policy"));
    RunOptions opt;
    opt.horizon = horizon;
    opt.seed = seed;
    auto r = run(p, *sched, opt);
    if (r.last_explore_slot < horizon / 2) ++early;
  }
  double secs = elapsed(start);
  std::ostringstream detail;
  detail << std::setprecision(4) << "|psi(1e5)-psi(5e4)| " << delta
         << " <= band " << band << ", exploration done early in " << early
         << "/" << reps;
  gate.report(9, geo && flat && early >= 190 && secs < 600.0,
              "parallel learner regret plateaus and exploration stops",
              detail.str(), secs);
}

//---------------------------------------------------------------------------
// Criterion 10: the coupled runner preserves componentwise state order
// between a lighter and a heavier start under one fixed rule.

void criterion_coupling(Gate& gate) {
  auto start = Clock::now();
  long long violations = 0;
  int runs = 0;

  auto p3 = three_single();
  for (uint64_t seed = 10000; seed < 10025; ++seed) {
    auto sa = make_scheduler("cmu-greedy-priority", p3, 1);
    auto sb = make_scheduler("cmu-greedy-priority", p3, 1);
    CoupledOptions opt;
    opt.horizon = 10000;
    opt.seed = seed;
    opt.initial_a = (seed % 2 == 0) ? std::vector<int>{0, 0, 0}
                                    : std::vector<int>{1, 0, 2};
    opt.initial_b = (seed % 2 == 0) ? std::vector<int>{4, 2, 3}
                                    : std::vector<int>{1, 4, 2};
    violations += coupled_run(p3, *sa, *sb, opt).dominance_violations;
    ++runs;
  }

  auto p2 = learn_2x2();
  for (uint64_t seed = 11000; seed < 11025; ++seed) {
    auto sa = make_scheduler("cmu-greedy-priority", p2, 1);
    auto sb = make_scheduler("cmu-greedy-priority", p2, 1);
    CoupledOptions opt;
    opt.horizon = 10000;
    opt.seed = seed;
    opt.initial_a = {0, 0};
    opt.initial_b = {3, 2};
    violations += coupled_run(p2, *sa, *sb, opt).dominance_violations;
    ++runs;
  }

  double secs = elapsed(start);
  std::ostringstream detail;
  detail << violations << " order violations across " << runs
         << " coupled runs";
  gate.report(10, violations == 0 && runs == 50,
              "coupled runs preserve componentwise state order",
              detail.str(), secs);
}

}  // namespace

int main() {
  Gate gate;
  criterion_matching(gate);
  criterion_stationary(gate);
  criterion_busy_cycles(gate);
  criterion_single_server_regret(gate);
  criterion_instability(gate);
  criterion_boundary(gate);
  criterion_feasibility(gate);
  criterion_hierarchy(gate);
  criterion_parallel_regret(gate);
  criterion_coupling(gate);
  std::cout << "acceptance: " << 10 - gate.failures << "/10 criteria passed"
            << std::endl;
  return gate.failures;
}
