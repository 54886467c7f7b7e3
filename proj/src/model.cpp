#include "cmusim/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "cmusim/lp.hpp"

namespace cmusim {

std::vector<std::pair<int, int>> SystemParams::edges() const {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < num_queues(); ++i)
    for (int j = 0; j < num_servers(); ++j)
      if (mu[i][j] > 0.0) e.emplace_back(i, j);
  return e;
}

double weight_gap(const SystemParams& p) {
  const int U = p.num_queues(), K = p.num_servers();
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < U; ++i) {
    for (int j = 0; j < K; ++j) {
      if (p.mu[i][j] <= 0.0) continue;
      double w = p.weight(i, j);
      for (int i2 = 0; i2 < U; ++i2)
        if (i2 != i) gap = std::min(gap, std::fabs(w - p.weight(i2, j)));
      for (int j2 = 0; j2 < K; ++j2)
        if (j2 != j) gap = std::min(gap, std::fabs(w - p.weight(i, j2)));
    }
  }
  return gap;
}

ValidationReport validate(const SystemParams& p) {
  ValidationReport rep;
  const int U = p.num_queues(), K = p.num_servers();
  auto err = [&rep](const std::string& m) { rep.errors.push_back(m); };

  if (U < 1) err("lambda: need at least one queue");
  if (p.mu.size() != static_cast<size_t>(U))
    err("mu: expected " + std::to_string(U) + " rows, found " +
        std::to_string(p.mu.size()));
  if (p.cost.size() != static_cast<size_t>(U))
    err("cost: expected " + std::to_string(U) + " entries, found " +
        std::to_string(p.cost.size()));
  if (K < 1) err("mu: need at least one server column");
  for (size_t i = 0; i < p.mu.size(); ++i)
    if (static_cast<int>(p.mu[i].size()) != K)
      err("mu: row " + std::to_string(i + 1) + " has " +
          std::to_string(p.mu[i].size()) + " entries, expected " +
          std::to_string(K));
  if (!rep.errors.empty()) return rep;

  for (int i = 0; i < U; ++i) {
    if (!(p.lambda[i] > 0.0 && p.lambda[i] < 1.0))
      err("lambda[" + std::to_string(i + 1) + "]: must lie in (0,1)");
    if (!(p.cost[i] > 0.0))
      err("cost[" + std::to_string(i + 1) + "]: must be positive");
    bool servable = false;
    for (int j = 0; j < K; ++j) {
      if (p.mu[i][j] < 0.0 || p.mu[i][j] > 1.0)
        err("mu[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) +
            "]: must lie in [0,1]");
      if (p.mu[i][j] > 0.0) servable = true;
    }
    if (!servable)
      err("queue " + std::to_string(i + 1) + ": no server can serve it");
  }

  rep.ok = rep.errors.empty();
  if (rep.ok) {
    rep.weight_gap = weight_gap(p);
    rep.cmu_well_defined = rep.weight_gap > 0.0;
  }
  return rep;
}

CapacityResult capacity_contains(const SystemParams& p, double boundary_tol) {
  const int U = p.num_queues(), K = p.num_servers();
  CapacityResult res;

  // Variables: split[j][i] flattened (K*U of them), then t+ and t-.
  // maximize t+ - t-  subject to
  //   sum_j mu[i][j] * split[j][i] - (t+ - t-) >= lambda[i]   for each queue
  //   sum_i split[j][i] = 1                                   for each server
  const int nv = K * U + 2;
  auto mij = [U](int j, int i) { return j * U + i; };
  std::vector<lp::Row> rows;
  for (int i = 0; i < U; ++i) {
    lp::Row r;
    r.a.assign(nv, 0.0);
    for (int j = 0; j < K; ++j) r.a[mij(j, i)] = p.mu[i][j];
    r.a[K * U] = -1.0;
    r.a[K * U + 1] = 1.0;
    r.rel = lp::Relation::GreaterEq;
    r.b = p.lambda[i];
    rows.push_back(std::move(r));
  }
  for (int j = 0; j < K; ++j) {
    lp::Row r;
    r.a.assign(nv, 0.0);
    for (int i = 0; i < U; ++i) r.a[mij(j, i)] = 1.0;
    r.rel = lp::Relation::Equal;
    r.b = 1.0;
    rows.push_back(std::move(r));
  }
  std::vector<double> obj(nv, 0.0);
  obj[K * U] = 1.0;
  obj[K * U + 1] = -1.0;

  auto sol = lp::maximize(obj, rows);
  if (sol.status != lp::Status::Optimal) {
    res.note = "capacity solve failed: " + lp::to_string(sol.status);
    return res;
  }
  res.margin = sol.objective;
  res.split.assign(K, std::vector<double>(U, 0.0));
  for (int j = 0; j < K; ++j)
    for (int i = 0; i < U; ++i) res.split[j][i] = sol.x[mij(j, i)];
  if (res.margin > boundary_tol) {
    res.inside = true;
  } else if (res.margin > -boundary_tol) {
    res.boundary = true;
    res.note = "arrival vector sits on the capacity boundary";
  }
  return res;
}

namespace {

using nlohmann::json;

std::vector<double> read_vector(const json& j, const std::string& key) {
  if (!j.at(key).is_array())
    throw std::runtime_error(key + ": expected an array");
  std::vector<double> v;
  for (const auto& x : j.at(key)) {
    if (!x.is_number()) throw std::runtime_error(key + ": expected numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

Instance parse_instance(const std::string& json_text,
                        const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }
  Instance ins;
  try {
    ins.params.lambda = read_vector(j, "lambda");
    if (!j.at("mu").is_array()) throw std::runtime_error("mu: expected array");
    for (const auto& row : j.at("mu")) {
      if (!row.is_array())
        throw std::runtime_error("mu: expected an array of rows");
      std::vector<double> r;
      for (const auto& x : row) {
        if (!x.is_number()) throw std::runtime_error("mu: expected numbers");
        r.push_back(x.get<double>());
      }
      ins.params.mu.push_back(std::move(r));
    }
    ins.params.cost = read_vector(j, "cost");

    if (j.contains("U")) {
      auto u = j.at("U").get<long long>();
      if (u != static_cast<long long>(ins.params.lambda.size()))
        throw std::runtime_error("U: does not match the length of lambda");
    }
    if (j.contains("K")) {
      auto k = j.at("K").get<long long>();
      for (const auto& row : ins.params.mu)
        if (k != static_cast<long long>(row.size()))
          throw std::runtime_error("K: does not match the width of mu");
    }

    if (j.contains("scheduler"))
      ins.run.scheduler = j.at("scheduler").get<std::string>();
    if (j.contains("horizon"))
      ins.run.horizon = j.at("horizon").get<long long>();
    if (j.contains("reps")) ins.run.reps = j.at("reps").get<int>();
    if (j.contains("seed")) ins.run.seed = j.at("seed").get<uint64_t>();
    if (j.contains("discount"))
      ins.run.discount = j.at("discount").get<double>();
    if (j.contains("out")) ins.run.out = j.at("out").get<std::string>();
    if (j.contains("initial_state")) {
      for (const auto& x : j.at("initial_state"))
        ins.run.initial_state.push_back(x.get<int>());
    }
    if (j.contains("truncation")) {
      const auto& tj = j.at("truncation");
      if (tj.contains("start_scalar"))
        ins.run.truncation.start_scalar = tj.at("start_scalar").get<int>();
      if (tj.contains("start_joint"))
        ins.run.truncation.start_joint = tj.at("start_joint").get<int>();
      if (tj.contains("boundary_tol"))
        ins.run.truncation.boundary_tol = tj.at("boundary_tol").get<double>();
      if (tj.contains("max_states"))
        ins.run.truncation.max_states = tj.at("max_states").get<long long>();
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }

  auto rep = validate(ins.params);
  if (!rep.ok) {
    std::ostringstream msg;
    msg << origin << ": invalid instance";
    for (const auto& e : rep.errors) msg << "\n  " << e;
    throw std::runtime_error(msg.str());
  }
  return ins;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str(), path);
}

}  // namespace cmusim
