#pragma once

#include <string>
#include <vector>

namespace cmusim {

// Small dense linear programs (a few dozen variables): maximize c.x subject
// to row constraints over x >= 0. Two-phase primal simplex with Bland's rule.
namespace lp {

enum class Relation { LessEq, GreaterEq, Equal };

struct Row {
  std::vector<double> a;
  Relation rel = Relation::LessEq;
  double b = 0.0;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

Result maximize(const std::vector<double>& objective,
                const std::vector<Row>& rows);

std::string to_string(Status s);

}  // namespace lp
}  // namespace cmusim
