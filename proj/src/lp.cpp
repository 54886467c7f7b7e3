#include "cmusim/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace cmusim::lp {

namespace {

constexpr double kTol = 1e-9;

// Canonical-form tableau. Rows hold [A | b]; the objective row holds reduced
// costs with the running objective value (negated) in its last entry.
struct Tableau {
  int m = 0, n = 0;
  std::vector<std::vector<double>> t;
  std::vector<double> z;
  std::vector<int> basis;

  void pivot(int r, int c) {
    double p = t[r][c];
    for (int j = 0; j <= n; ++j) t[r][j] /= p;
    for (int i = 0; i < m; ++i) {
      if (i == r || t[i][c] == 0.0) continue;
      double f = t[i][c];
      for (int j = 0; j <= n; ++j) t[i][j] -= f * t[r][j];
    }
    if (z[c] != 0.0) {
      double f = z[c];
      for (int j = 0; j <= n; ++j) z[j] -= f * t[r][j];
    }
    basis[r] = c;
  }

  void load_objective(const std::vector<double>& c) {
    z.assign(n + 1, 0.0);
    for (int j = 0; j < n; ++j) z[j] = c[j];
    for (int i = 0; i < m; ++i) {
      double cb = c[basis[i]];
      if (cb == 0.0) continue;
      for (int j = 0; j <= n; ++j) z[j] -= cb * t[i][j];
    }
  }

  // Bland's rule; returns false when the objective is unbounded above.
  bool iterate(const std::vector<char>& allowed) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < n; ++j) {
        if (allowed[j] && z[j] > kTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < m; ++i) {
        if (t[i][enter] <= kTol) continue;
        double ratio = t[i][n] / t[i][enter];
        if (leave < 0 || ratio < best - 1e-12 ||
            (ratio < best + 1e-12 && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

Result maximize(const std::vector<double>& objective,
                const std::vector<Row>& rows) {
  const int n0 = static_cast<int>(objective.size());
  const int m = static_cast<int>(rows.size());

  // Count extra columns: one slack/surplus per inequality, one artificial per
  // >= or == row (after flipping rows so every right-hand side is >= 0).
  std::vector<Row> r = rows;
  for (auto& row : r) {
    if (static_cast<int>(row.a.size()) != n0)
      throw std::invalid_argument("lp: row width mismatch");
    if (row.b < 0.0) {
      for (double& v : row.a) v = -v;
      row.b = -row.b;
      if (row.rel == Relation::LessEq)
        row.rel = Relation::GreaterEq;
      else if (row.rel == Relation::GreaterEq)
        row.rel = Relation::LessEq;
    }
  }
  int n_slack = 0, n_art = 0;
  for (const auto& row : r) {
    if (row.rel != Relation::Equal) ++n_slack;
    if (row.rel != Relation::LessEq) ++n_art;
  }

  Tableau tb;
  tb.m = m;
  tb.n = n0 + n_slack + n_art;
  tb.t.assign(m, std::vector<double>(tb.n + 1, 0.0));
  tb.basis.assign(m, -1);

  int art_begin = n0 + n_slack;
  int slack = n0, art = art_begin;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n0; ++j) tb.t[i][j] = r[i].a[j];
    tb.t[i][tb.n] = r[i].b;
    switch (r[i].rel) {
      case Relation::LessEq:
        tb.t[i][slack] = 1.0;
        tb.basis[i] = slack++;
        break;
      case Relation::GreaterEq:
        tb.t[i][slack++] = -1.0;
        tb.t[i][art] = 1.0;
        tb.basis[i] = art++;
        break;
      case Relation::Equal:
        tb.t[i][art] = 1.0;
        tb.basis[i] = art++;
        break;
    }
  }

  Result res;
  std::vector<char> allowed(tb.n, 1);

  if (n_art > 0) {
    std::vector<double> phase1(tb.n, 0.0);
    for (int j = art_begin; j < tb.n; ++j) phase1[j] = -1.0;
    tb.load_objective(phase1);
    tb.iterate(allowed);
    if (-tb.z[tb.n] < -1e-7) {
      res.status = Status::Infeasible;
      return res;
    }
    // Pivot leftover artificials out of the basis when their row has any
    // usable column; rows that cannot be cleared are redundant.
    for (int i = 0; i < m; ++i) {
      if (tb.basis[i] < art_begin) continue;
      for (int j = 0; j < art_begin; ++j) {
        if (std::fabs(tb.t[i][j]) > kTol) {
          tb.pivot(i, j);
          break;
        }
      }
    }
    for (int j = art_begin; j < tb.n; ++j) allowed[j] = 0;
  }

  std::vector<double> phase2(tb.n, 0.0);
  for (int j = 0; j < n0; ++j) phase2[j] = objective[j];
  tb.load_objective(phase2);
  if (!tb.iterate(allowed)) {
    res.status = Status::Unbounded;
    return res;
  }

  res.status = Status::Optimal;
  res.x.assign(n0, 0.0);
  for (int i = 0; i < m; ++i)
    if (tb.basis[i] < n0) res.x[tb.basis[i]] = tb.t[i][tb.n];
  res.objective = -tb.z[tb.n];
  return res;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "unknown";
}

}  // namespace cmusim::lp
