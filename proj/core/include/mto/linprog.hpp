#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mto {

// Dense linear program:
//   minimize    c . x
//   subject to  a_ub x <= b_ub,  a_eq x = b_eq,
//               x_i >= 0 where nonneg[i], otherwise x_i free.
// Desk-scale only (tens to a few hundred variables/rows).
struct LpProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  std::vector<bool> nonneg;  // empty => all nonnegative

  static LpProblem minimize(Eigen::VectorXd cost) {
    LpProblem p;
    p.c = std::move(cost);
    return p;
  }
};

struct LpResult {
  enum class Status { kOptimal, kInfeasible, kUnbounded, kStalled };
  Status status = Status::kStalled;
  double value = 0.0;
  Eigen::VectorXd x;

  bool optimal() const { return status == Status::kOptimal; }
};

// Two-phase primal simplex (Dantzig pricing with Bland fallback).
LpResult solve_lp(const LpProblem& problem);

// Convenience: maximize c.x over a_ub x <= b_ub with free variables.
LpResult maximize_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a_ub,
                     const Eigen::VectorXd& b_ub);

}  // namespace mto
