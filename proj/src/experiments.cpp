#include "cmusim/experiments.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "cmusim/scheduler.hpp"

namespace cmusim {

RegretCurve regret_experiment(const SystemParams& p, const RegretConfig& cfg) {
  if (cfg.grid.empty())
    throw std::invalid_argument("regret experiment needs sample horizons");
  for (size_t g = 1; g < cfg.grid.size(); ++g)
    if (cfg.grid[g] <= cfg.grid[g - 1])
      throw std::invalid_argument("sample horizons must increase");
  if (cfg.reps < 2) throw std::invalid_argument("need at least two reps");

  const size_t points = cfg.grid.size();
  std::vector<std::vector<double>> diffs(points), costs(points),
      costs_star(points), gaps(points);

  for (int r = 0; r < cfg.reps; ++r) {
    const uint64_t rep_seed = cfg.seed + static_cast<uint64_t>(r);
    auto learner =
        make_scheduler(cfg.learner, p, substream(rep_seed, "learner"));
    auto reference =
        make_scheduler(cfg.reference, p, substream(rep_seed, "reference"));
    CoupledOptions opt;
    opt.horizon = cfg.grid.back();
    opt.seed = rep_seed;
    opt.discount = cfg.discount;
    opt.sample_points = cfg.grid;
    auto cr = coupled_run(p, *learner, *reference, opt);
    if (cr.a.cost_at_sample.size() != points)
      throw std::logic_error("missing sample points in coupled run");
    for (size_t g = 0; g < points; ++g) {
      costs[g].push_back(cr.a.cost_at_sample[g]);
      costs_star[g].push_back(cr.b.cost_at_sample[g]);
      diffs[g].push_back(cr.a.cost_at_sample[g] - cr.b.cost_at_sample[g]);
      double gap = 0.0;
      for (int i = 0; i < p.num_queues(); ++i)
        gap += std::abs(cr.a.q_at_sample[g][i] - cr.b.q_at_sample[g][i]);
      gaps[g].push_back(gap);
    }
  }

  RegretCurve curve;
  for (size_t g = 0; g < points; ++g) {
    RegretPoint pt;
    pt.horizon = cfg.grid[g];
    pt.cost = mean(costs[g]);
    pt.cost_star = mean(costs_star[g]);
    pt.psi = mean(diffs[g]);
    pt.se = standard_error(diffs[g]);
    pt.queue_gap = mean(gaps[g]);
    curve.points.push_back(pt);
  }
  return curve;
}

void write_regret_csv(std::ostream& os, const RegretCurve& curve) {
  os << "T,J,J_star,psi,stderr\n" << std::setprecision(12);
  for (const auto& pt : curve.points)
    os << pt.horizon << ',' << pt.cost << ',' << pt.cost_star << ','
       << pt.psi << ',' << pt.se << '\n';
}

InstabilityReport instability_demo(const SystemParams& p,
                                   const std::string& scheduler,
                                   long long horizon, int reps,
                                   uint64_t seed) {
  InstabilityReport report;
  report.reps = reps;
  report.capacity = capacity_contains(p);
  std::vector<double> slopes;
  for (int r = 0; r < reps; ++r) {
    const uint64_t rep_seed = seed + static_cast<uint64_t>(r);
    auto sched = make_scheduler(scheduler, p, substream(rep_seed, "policy"));
    RunOptions opt;
    opt.horizon = horizon;
    opt.seed = rep_seed;
    opt.keep_cost_path = true;
    auto res = run(p, *sched, opt);
    auto fit = batch_mean_slope(res.cost_path);
    if (fit.significant_positive) ++report.significant;
    slopes.push_back(fit.slope);
    report.fits.push_back(fit);
  }
  report.mean_slope = mean(slopes);
  return report;
}

BusyCycleCheck busy_cycle_equality(
    const SystemParams& p,
    const std::vector<std::pair<std::string, PickerFactory>>& policies,
    long long horizon, const std::vector<uint64_t>& seeds) {
  if (policies.size() < 2)
    throw std::invalid_argument("need at least two rules to compare");
  BusyCycleCheck check;
  for (uint64_t seed : seeds) {
    auto base_picker = policies[0].second();
    auto base = geometric_workload_run(p, base_picker, horizon, seed);
    for (size_t k = 1; k < policies.size(); ++k) {
      auto picker = policies[k].second();
      auto other = geometric_workload_run(p, picker, horizon, seed);
      if (other.zero_hits != base.zero_hits) {
        check.all_equal = false;
        if (check.detail.empty())
          check.detail = "seed " + std::to_string(seed) + ": " +
                         policies[k].first + " empties on different slots than " +
                         policies[0].first;
      }
    }
    check.baseline.push_back(std::move(base));
  }
  return check;
}

double free_exploration_rate(const SystemParams& p) {
  const int u = p.num_queues(), k = p.num_servers();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < u; ++i) {
    double isolate = p.lambda[i];
    for (int i2 = 0; i2 < u; ++i2)
      if (i2 != i) isolate *= 1.0 - p.lambda[i2];
    double fail = 1.0;
    for (int j = 0; j < k; ++j) fail *= 1.0 - p.mu[i][j];
    best = std::min(best, std::pow(isolate, k) * std::pow(fail, k - 1));
  }
  return best;
}

long long no_explore_onset(const RunResult& r) { return r.last_explore_slot; }

}  // namespace cmusim
