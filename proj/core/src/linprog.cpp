#include "mto/linprog.hpp"

#include <cmath>
#include <limits>

#include "mto/errors.hpp"

namespace mto {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;

// Tableau simplex on  min c.z  s.t.  M z = r (r >= 0), z >= 0.
// Returns false if the iteration limit was hit.
struct Tableau {
  Eigen::MatrixXd t;       // m x (n+1), last column is rhs
  Eigen::VectorXd cost;    // length n, reduced-cost row maintained separately
  double shift = 0.0;      // objective value of the current basis
  std::vector<int> basis;  // basis[row] = column index
  int enter_limit = 0;     // columns >= enter_limit may never enter the basis

  int rows() const { return static_cast<int>(t.rows()); }
  int cols() const { return static_cast<int>(t.cols()) - 1; }

  void price() {
    // Recompute reduced costs from scratch: d = cost - cost_B . t.
    reduced = cost;
    shift = 0.0;
    for (int i = 0; i < rows(); ++i) {
      double cb = cost[basis[i]];
      if (cb == 0.0) continue;
      reduced -= cb * t.row(i).head(cols()).transpose();
      shift += cb * t(i, cols());
    }
  }

  void pivot(int row, int col) {
    t.row(row) /= t(row, col);
    for (int i = 0; i < rows(); ++i) {
      if (i == row) continue;
      double f = t(i, col);
      if (f != 0.0) t.row(i) -= f * t.row(row);
    }
    double f = reduced[col];
    if (f != 0.0) {
      reduced -= f * t.row(row).head(cols()).transpose();
      shift += f * t(row, cols());
    }
    basis[row] = col;
  }

  // Returns kOptimal or kUnbounded (kStalled on iteration blowup).
  LpResult::Status run() {
    const long max_iter = 2000 + 200L * (rows() + cols());
    const long bland_after = 50L * (rows() + cols());
    for (long iter = 0; iter < max_iter; ++iter) {
      bool bland = iter > bland_after;
      int enter = -1;
      double best = -kCostTol;
      for (int j = 0; j < enter_limit; ++j) {
        if (reduced[j] < best) {
          enter = j;
          if (bland) break;
          best = reduced[j];
        }
      }
      if (enter < 0) return LpResult::Status::kOptimal;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows(); ++i) {
        double a = t(i, enter);
        if (a <= kPivotTol) continue;
        double ratio = t(i, cols()) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && leave >= 0 &&
             basis[i] < basis[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) return LpResult::Status::kUnbounded;
      pivot(leave, enter);
    }
    return LpResult::Status::kStalled;
  }

  Eigen::VectorXd reduced;
};

}  // namespace

LpResult solve_lp(const LpProblem& problem) {
  const int n_orig = static_cast<int>(problem.c.size());
  if (n_orig == 0) throw DimensionError("lp: empty objective");
  const int m_ub = static_cast<int>(problem.b_ub.size());
  const int m_eq = static_cast<int>(problem.b_eq.size());
  if (m_ub > 0 && problem.a_ub.cols() != n_orig)
    throw DimensionError("lp: a_ub column mismatch");
  if (m_eq > 0 && problem.a_eq.cols() != n_orig)
    throw DimensionError("lp: a_eq column mismatch");
  std::vector<bool> nonneg = problem.nonneg;
  if (nonneg.empty()) nonneg.assign(n_orig, true);
  if (static_cast<int>(nonneg.size()) != n_orig)
    throw DimensionError("lp: nonneg flag count mismatch");

  // Column layout: for each original variable one column (nonneg) or a
  // positive/negative pair (free); then one slack per <= row.
  std::vector<int> pos_col(n_orig), neg_col(n_orig, -1);
  int n = 0;
  for (int j = 0; j < n_orig; ++j) {
    pos_col[j] = n++;
    if (!nonneg[j]) neg_col[j] = n++;
  }
  const int slack0 = n;
  n += m_ub;
  const int m = m_ub + m_eq;

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd r(m);
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n_orig; ++j) {
    cost[pos_col[j]] = problem.c[j];
    if (neg_col[j] >= 0) cost[neg_col[j]] = -problem.c[j];
  }
  for (int i = 0; i < m_ub; ++i) {
    for (int j = 0; j < n_orig; ++j) {
      double a = problem.a_ub(i, j);
      M(i, pos_col[j]) = a;
      if (neg_col[j] >= 0) M(i, neg_col[j]) = -a;
    }
    M(i, slack0 + i) = 1.0;
    r[i] = problem.b_ub[i];
  }
  for (int i = 0; i < m_eq; ++i) {
    for (int j = 0; j < n_orig; ++j) {
      double a = problem.a_eq(i, j);
      M(m_ub + i, pos_col[j]) = a;
      if (neg_col[j] >= 0) M(m_ub + i, neg_col[j]) = -a;
    }
    r[m_ub + i] = problem.b_eq[i];
  }
  for (int i = 0; i < m; ++i) {
    if (r[i] < 0.0) {
      M.row(i) = -M.row(i);
      r[i] = -r[i];
    }
  }

  // Phase 1: artificial basis.
  Tableau tab;
  tab.t.resize(m, n + m + 1);
  tab.t.leftCols(n) = M;
  tab.t.middleCols(n, m) = Eigen::MatrixXd::Identity(m, m);
  tab.t.col(n + m) = r;
  tab.cost = Eigen::VectorXd::Zero(n + m);
  tab.cost.tail(m).setOnes();
  tab.basis.resize(m);
  for (int i = 0; i < m; ++i) tab.basis[i] = n + i;
  tab.enter_limit = n;  // artificials never (re-)enter
  tab.price();

  LpResult result;
  auto status = tab.run();
  if (status == LpResult::Status::kStalled) {
    result.status = status;
    return result;
  }
  if (tab.shift > 1e-7) {
    result.status = LpResult::Status::kInfeasible;
    return result;
  }
  // Drive remaining artificials out of the basis where possible.
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n) continue;
    int col = -1;
    for (int j = 0; j < n; ++j) {
      if (std::abs(tab.t(i, j)) > kPivotTol) {
        col = j;
        break;
      }
    }
    if (col >= 0) tab.pivot(i, col);
    // else: redundant row; the artificial stays basic at value ~0.
  }

  // Phase 2: original costs; artificial columns are blocked from entering
  // (a redundant row can keep one basic at value ~0, which is harmless).
  tab.cost = Eigen::VectorXd::Zero(n + m);
  tab.cost.head(n) = cost;
  tab.price();
  status = tab.run();
  result.status = status;
  if (status != LpResult::Status::kOptimal) return result;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n + m);
  for (int i = 0; i < m; ++i) z[tab.basis[i]] = tab.t(i, n + m);
  result.x.resize(n_orig);
  for (int j = 0; j < n_orig; ++j) {
    result.x[j] = z[pos_col[j]];
    if (neg_col[j] >= 0) result.x[j] -= z[neg_col[j]];
  }
  result.value = problem.c.dot(result.x);
  return result;
}

LpResult maximize_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a_ub,
                     const Eigen::VectorXd& b_ub) {
  LpProblem p = LpProblem::minimize(-c);
  p.a_ub = a_ub;
  p.b_ub = b_ub;
  p.nonneg.assign(c.size(), false);
  LpResult r = solve_lp(p);
  r.value = -r.value;
  return r;
}

}  // namespace mto
