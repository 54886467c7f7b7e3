// Command line front end: simulation, regret curves, stability analysis,
// capacity checks, and the busy cycle regeneration check, all driven by a
// JSON instance file. Exit codes: 0 success, 2 invalid input, 3 runtime
// failure (or an inconclusive verdict under --strict).

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cmusim/engine.hpp"
#include "cmusim/experiments.hpp"
#include "cmusim/model.hpp"
#include "cmusim/scheduler.hpp"
#include "cmusim/stability.hpp"

namespace {

using namespace cmusim;

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitFailure = 3;

struct Overrides {
  std::string instance_path;
  std::string scheduler;
  long long horizon = -1;
  int reps = -1;
  long long seed = -1;
  std::optional<double> discount;
  std::vector<int> initial;
  std::string out;
  long long max_states = -1;
  double boundary_tol = -1.0;
};

void add_common(CLI::App* cmd, Overrides& o, bool with_run_flags = true) {
  cmd->add_option("-i,--instance", o.instance_path, "instance JSON file")
      ->required();
  if (with_run_flags) {
    cmd->add_option("-s,--scheduler", o.scheduler, "scheduling rule");
    cmd->add_option("-T,--horizon", o.horizon, "slots to simulate");
    cmd->add_option("-r,--reps", o.reps, "replications");
    cmd->add_option("--seed", o.seed, "base seed");
    cmd->add_option("--discount", o.discount, "per slot discount factor");
    cmd->add_option("--initial", o.initial, "initial queue lengths")
        ->delimiter(',');
  }
  cmd->add_option("-o,--out", o.out, "output file path");
}

Instance load(const Overrides& o) {
  Instance inst = load_instance(o.instance_path);
  if (!o.scheduler.empty()) inst.run.scheduler = o.scheduler;
  if (o.horizon > 0) inst.run.horizon = o.horizon;
  if (o.reps > 0) inst.run.reps = o.reps;
  if (o.seed >= 0) inst.run.seed = static_cast<uint64_t>(o.seed);
  if (o.discount) inst.run.discount = o.discount;
  if (!o.initial.empty()) inst.run.initial_state = o.initial;
  if (!o.out.empty()) inst.run.out = o.out;
  if (o.max_states > 0) inst.run.truncation.max_states = o.max_states;
  if (o.boundary_tol > 0) inst.run.truncation.boundary_tol = o.boundary_tol;
  return inst;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(path + ": cannot write");
  return os;
}

void print_state(const std::vector<int>& q) {
  std::cout << '(';
  for (size_t i = 0; i < q.size(); ++i)
    std::cout << (i ? "," : "") << q[i];
  std::cout << ')';
}

int run_simulate(const Overrides& o) {
  Instance inst = load(o);
  const auto& p = inst.params;
  const auto& cfg = inst.run;
  std::cout << "scheduler: " << cfg.scheduler << "\nhorizon: " << cfg.horizon
            << "\nreps: " << cfg.reps << "\n";

  std::vector<double> costs;
  RunResult first;
  for (int r = 0; r < cfg.reps; ++r) {
    const uint64_t rep_seed = cfg.seed + static_cast<uint64_t>(r);
    auto sched =
        make_scheduler(cfg.scheduler, p, substream(rep_seed, "policy"));
    RunOptions opt;
    opt.horizon = cfg.horizon;
    opt.seed = rep_seed;
    opt.initial_state = cfg.initial_state;
    opt.discount = cfg.discount;
    opt.keep_trace = cfg.reps == 1 && !cfg.out.empty();
    auto res = run(p, *sched, opt);
    costs.push_back(res.total_cost);
    if (r == 0) first = std::move(res);
  }

  std::cout << std::setprecision(10);
  if (cfg.reps == 1) {
    std::cout << "cost: " << costs[0] << "\ncost_per_slot: "
              << costs[0] / static_cast<double>(cfg.horizon)
              << "\nfinal_state: ";
    print_state(first.final_q);
    std::cout << "\nlast_explore_slot: " << first.last_explore_slot << "\n";
    if (!cfg.out.empty()) {
      auto os = open_out(cfg.out);
      write_trace_csv(os, p, first);
      std::cout << "trace: " << cfg.out << "\n";
    }
  } else {
    std::cout << "mean_cost: " << mean(costs)
              << "\nstderr: " << standard_error(costs) << "\n";
    if (!cfg.out.empty()) {
      auto os = open_out(cfg.out);
      os << "rep,cost\n" << std::setprecision(12);
      for (size_t r = 0; r < costs.size(); ++r)
        os << r + 1 << ',' << costs[r] << '\n';
      std::cout << "costs: " << cfg.out << "\n";
    }
  }
  return kExitOk;
}

int run_regret(const Overrides& o, const std::string& learner,
               const std::string& reference, std::vector<long long> grid) {
  Instance inst = load(o);
  RegretConfig cfg;
  if (!inst.run.scheduler.empty() &&
      inst.run.scheduler.rfind("cmuhat", 0) == 0)
    cfg.learner = inst.run.scheduler;
  if (!learner.empty()) cfg.learner = learner;
  if (!reference.empty()) cfg.reference = reference;
  if (!grid.empty()) cfg.grid = std::move(grid);
  if (cfg.grid.empty()) cfg.grid = {inst.run.horizon};
  cfg.reps = inst.run.reps > 1 ? inst.run.reps : 100;
  if (o.reps > 0) cfg.reps = o.reps;
  cfg.seed = inst.run.seed;
  cfg.discount = inst.run.discount;

  auto curve = regret_experiment(inst.params, cfg);
  std::cout << "learner: " << cfg.learner << "\nreference: " << cfg.reference
            << "\nreps: " << cfg.reps << "\n"
            << std::setprecision(8) << "T,J,J_star,psi,stderr,queue_gap\n";
  for (const auto& pt : curve.points)
    std::cout << pt.horizon << ',' << pt.cost << ',' << pt.cost_star << ','
              << pt.psi << ',' << pt.se << ',' << pt.queue_gap << '\n';
  if (!inst.run.out.empty()) {
    auto os = open_out(inst.run.out);
    write_regret_csv(os, curve);
    std::cout << "csv: " << inst.run.out << "\n";
  }
  return kExitOk;
}

int run_capacity(const Overrides& o) {
  Instance inst = load(o);
  auto cap = capacity_contains(inst.params);
  std::cout << std::setprecision(10) << "margin: " << cap.margin
            << "\ninside: " << (cap.inside ? "yes" : "no")
            << "\nboundary: " << (cap.boundary ? "yes" : "no") << "\n";
  if (!cap.note.empty()) std::cout << "note: " << cap.note << "\n";
  for (size_t j = 0; j < cap.split.size(); ++j) {
    std::cout << "server " << j + 1 << " split:";
    for (double v : cap.split[j]) std::cout << ' ' << v;
    std::cout << "\n";
  }
  return kExitOk;
}

int run_stability(const Overrides& o, const std::string& ranks, double tol,
                  bool strict) {
  Instance inst = load(o);
  const auto& p = inst.params;
  auto report = validate(p);
  nlohmann::json doc;
  std::cout << std::setprecision(10) << "weight_gap: " << report.weight_gap
            << "\n";
  doc["weight_gap"] = report.weight_gap;

  auto cap = capacity_contains(p);
  std::cout << "capacity_margin: " << cap.margin << " ("
            << (cap.inside ? "inside" : cap.boundary ? "boundary" : "outside")
            << ")\n";
  doc["capacity"] = {{"margin", cap.margin},
                     {"inside", cap.inside},
                     {"boundary", cap.boundary}};

  PriorityOrder order;
  if (!ranks.empty()) {
    auto sched = make_scheduler("static-priority:" + ranks, p, 1);
    order = dynamic_cast<StaticPriorityScheduler&>(*sched).order();
  } else {
    order = cmu_order(p);
  }
  std::cout << "order:";
  for (const auto& [i, j] : order)
    if (p.mu[i][j] > 0) {
      std::cout << ' ' << i + 1 << '-' << j + 1;
      doc["order"].push_back(std::to_string(i + 1) + "-" +
                             std::to_string(j + 1));
    }
  std::cout << "\n";

  const int k = p.num_servers();
  auto fz = feasibility_game(
      p, [&order, k](const std::vector<int>& q) {
        return greedy_priority_assignment(order, q, k);
      });
  std::cout << "feasibility_value: " << fz.value << "\nalpha:";
  for (double a : fz.alpha) std::cout << ' ' << a;
  std::cout << "\n";
  doc["feasibility"] = {{"value", fz.value},
                        {"alpha", fz.alpha},
                        {"worst_profile", fz.worst_profile}};

  auto v = hierarchical_verdict(p, order, inst.run.truncation, tol);
  if (!v.hierarchy.hierarchical) {
    std::cout << "hierarchy: none (" << v.hierarchy.witness << ")\n";
    doc["hierarchy"] = {{"hierarchical", false},
                        {"witness", v.hierarchy.witness}};
  } else {
    std::cout << "hierarchy:";
    auto levels = nlohmann::json::array();
    for (size_t lk = 0; lk < v.hierarchy.levels.size(); ++lk) {
      std::cout << (lk ? " | " : " ");
      auto lv = nlohmann::json::array();
      for (size_t n = 0; n < v.hierarchy.levels[lk].size(); ++n) {
        std::cout << (n ? "," : "") << v.hierarchy.levels[lk][n] + 1;
        lv.push_back(v.hierarchy.levels[lk][n] + 1);
      }
      levels.push_back(std::move(lv));
    }
    std::cout << "\n";
    doc["hierarchy"] = {{"hierarchical", true}, {"levels", std::move(levels)}};
    for (const auto& c : v.checks) {
      std::cout << "queue " << c.queue + 1 << " level " << c.level
                << ": arrivals " << c.lambda << " free_service "
                << c.service_rate << (c.pass ? " ok" : " short") << "\n";
      doc["checks"].push_back({{"queue", c.queue + 1},
                               {"level", c.level},
                               {"arrivals", c.lambda},
                               {"free_service", c.service_rate},
                               {"margin", c.service_rate - c.lambda},
                               {"pass", c.pass}});
    }
  }
  std::cout << "verdict: " << to_string(v.verdict) << "\n";
  if (!v.note.empty()) std::cout << "note: " << v.note << "\n";
  doc["status"] = to_string(v.verdict);
  if (!v.note.empty()) doc["note"] = v.note;
  doc["truncation"] = {{"start_scalar", inst.run.truncation.start_scalar},
                       {"start_joint", inst.run.truncation.start_joint},
                       {"boundary_tol", inst.run.truncation.boundary_tol},
                       {"max_states", inst.run.truncation.max_states}};

  if (p.num_queues() == 2 && p.num_servers() == 2) {
    try {
      auto cls = classify_2x2(p, tol);
      std::cout << "classification: " << to_string(cls.verdict)
                << "\nlambda2_star: " << cls.lambda2_star << "\n";
      doc["classification"] = {{"verdict", to_string(cls.verdict)},
                               {"lambda2_star", cls.lambda2_star}};
    } catch (const std::runtime_error&) {
      std::cout << "classification: not applicable\n";
    }
  }
  if (!inst.run.out.empty()) {
    auto os = open_out(inst.run.out);
    os << doc.dump(2) << "\n";
    std::cout << "report: " << inst.run.out << "\n";
  }
  if (strict && v.verdict == Ergodicity::Inconclusive) return kExitFailure;
  return kExitOk;
}

int run_demo(const Overrides& o) {
  Instance inst = load(o);
  std::string rule = inst.run.scheduler;
  auto report = instability_demo(inst.params, rule, inst.run.horizon,
                                 inst.run.reps, inst.run.seed);
  std::cout << std::setprecision(6) << "scheduler: " << rule
            << "\nhorizon: " << inst.run.horizon << "\nreps: " << report.reps
            << "\ncapacity_margin: " << report.capacity.margin << " ("
            << (report.capacity.inside ? "inside" : "not inside") << ")\n";
  for (size_t r = 0; r < report.fits.size(); ++r)
    std::cout << "rep " << r + 1 << ": slope " << report.fits[r].slope
              << " +- " << report.fits[r].half_width
              << (report.fits[r].significant_positive ? " growing" : "")
              << "\n";
  std::cout << "significant: " << report.significant << "/" << report.reps
            << "\nmean_slope: " << report.mean_slope << "\n";
  return kExitOk;
}

int run_busy_cycle(const Overrides& o) {
  Instance inst = load(o);
  const auto& p = inst.params;
  auto order = cmu_order(p);
  std::vector<std::pair<std::string, PickerFactory>> policies{
      {"priority", [order] { return priority_picker(order); }},
      {"round-robin", [] { return round_robin_picker(); }},
      {"longest-queue", [] { return longest_queue_picker(); }},
  };
  int nseeds = inst.run.reps > 1 ? inst.run.reps : 20;
  std::vector<uint64_t> seeds;
  for (int r = 0; r < nseeds; ++r)
    seeds.push_back(inst.run.seed + static_cast<uint64_t>(r));

  auto check = busy_cycle_equality(p, policies, inst.run.horizon, seeds);
  std::cout << "policies: priority round-robin longest-queue\nseeds: "
            << nseeds << "\nhorizon: " << inst.run.horizon
            << "\nall_equal: " << (check.all_equal ? "yes" : "no") << "\n";
  if (!check.detail.empty()) std::cout << "detail: " << check.detail << "\n";
  long long cycles = 0;
  for (const auto& base : check.baseline)
    cycles += static_cast<long long>(base.cycle_lengths.size());
  std::cout << "observed_cycles: " << cycles << "\n";
  if (!inst.run.out.empty() && !check.baseline.empty()) {
    auto os = open_out(inst.run.out);
    write_cycles_csv(os, check.baseline.front());
    std::cout << "csv: " << inst.run.out << "\n";
  }
  return check.all_equal ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiclass parallel server queue simulator"};
  app.require_subcommand(1);

  Overrides sim_o, reg_o, cap_o, stab_o, demo_o, busy_o;
  std::string learner, reference, ranks;
  std::vector<long long> grid;
  double tol = 1e-9;
  bool strict = false;

  auto* sim = app.add_subcommand("simulate", "simulate one rule");
  add_common(sim, sim_o);

  auto* reg = app.add_subcommand("regret",
                                 "paired cost gap of a learning rule");
  add_common(reg, reg_o);
  reg->add_option("--learner", learner, "learning rule");
  reg->add_option("--reference", reference, "reference rule");
  reg->add_option("--grid", grid, "sample horizons")->delimiter(',');

  auto* cap = app.add_subcommand("capacity", "static split capacity check");
  add_common(cap, cap_o, false);

  auto* stab = app.add_subcommand("stability", "hierarchy and drift verdict");
  add_common(stab, stab_o, false);
  stab->add_option("--order", ranks, "priority ranks, e.g. 1-1,2-1,2-2");
  stab->add_option("--tol", tol, "drift tolerance");
  stab->add_option("--truncation", stab_o.max_states,
                   "stationary solve state budget");
  stab->add_option("--boundary-tol", stab_o.boundary_tol,
                   "stationary tail mass target");
  stab->add_flag("--strict", strict, "fail on an inconclusive verdict");

  auto* demo = app.add_subcommand("demo-instability",
                                  "per replication cost growth fits");
  add_common(demo, demo_o);

  auto* busy = app.add_subcommand("busy-cycle-check",
                                  "regeneration agreement across rules");
  add_common(busy, busy_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_o);
    if (reg->parsed()) return run_regret(reg_o, learner, reference, grid);
    if (cap->parsed()) return run_capacity(cap_o);
    if (stab->parsed()) return run_stability(stab_o, ranks, tol, strict);
    if (demo->parsed()) return run_demo(demo_o);
    if (busy->parsed()) return run_busy_cycle(busy_o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitBadInput;
}
