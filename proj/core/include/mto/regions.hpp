#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mto/channels.hpp"
#include "mto/pmf.hpp"

namespace mto {

// Linear-inequality description of a rate region: every row means
// a(row) . x <= b(row). Entries are in bits.
struct Polytope {
  std::vector<std::string> vars;
  Eigen::MatrixXd a;  // rows x vars.size()
  Eigen::VectorXd b;

  std::size_t rows() const { return static_cast<std::size_t>(a.rows()); }
  std::size_t dim() const { return vars.size(); }
  void add_row(const Eigen::RowVectorXd& coeff, double bound);
  std::size_t var_index(const std::string& name) const;  // throws AxisError
};

// Exact projection that eliminates `var`: combines every (positive, negative)
// coefficient pair, keeps var-free rows, removes duplicates within 1e-12.
Polytope fourier_motzkin(const Polytope& p, const std::string& var);

// Remove duplicate rows after sup-norm normalization.
Polytope deduplicate(const Polytope& p, double tol = 1e-12);

// Remove rows implied by the remaining ones (LP pruning).
Polytope remove_redundant(const Polytope& p);

// Same region with x_i >= 0 appended for every variable.
Polytope with_nonnegativity(const Polytope& p);

struct PolytopeOptimum {
  bool ok = false;        // false: infeasible or unbounded
  bool unbounded = false;
  double value = 0.0;
  Eigen::VectorXd arg;
};

// max obj . x over the polytope (variables free unless rows bound them).
PolytopeOptimum polytope_max(const Polytope& p, const Eigen::VectorXd& obj);

bool contains_point(const Polytope& p, const Eigen::VectorXd& x, double tol = 1e-9);

// outer >= inner over the nonnegative orthant: every point of
// inner ∩ {x >= 0} satisfies outer's rows (up to tol). Decided by one LP per
// outer row.
bool region_contains(const Polytope& outer, const Polytope& inner, double tol = 1e-9);
bool regions_equal(const Polytope& a, const Polytope& b, double tol = 1e-9);

// Vertices via basic-solution enumeration; meant for dim <= 4 plots.
std::vector<Eigen::VectorXd> vertices(const Polytope& p, double tol = 1e-9);

// One labeled inequality per line, e.g. "R1 + R2 <= 2".
std::string to_text(const Polytope& p);

// ---- rate regions for deterministic many-to-one channels ------------------
//
// All builders need deterministic kernels, a valid auxiliary assignment
// (u_i = g_i(x_i) with the interference variable a function of the u's), and
// a product input law; entropies are evaluated exactly under that law.

// Converse region over R_1..R_K.
Polytope outer_region(const DiscreteChannel& ch, const std::vector<Pmf>& dist,
                      const AuxSpec& aux);

// Achievable region over R_1..R_K.
Polytope inner_region(const DiscreteChannel& ch, const std::vector<Pmf>& dist,
                      const AuxSpec& aux);

// Achievable region built in (R, Omega) coordinates, then projected onto the
// rates by Fourier-Motzkin elimination; equals inner_region up to redundancy.
Polytope inner_region_parametric(const DiscreteChannel& ch,
                                 const std::vector<Pmf>& dist, const AuxSpec& aux);

// H(Y_S | V, U_{S^c}) - H(Y_S | U_S) for S given as user ids (2..K);
// the rate slack attributable to interference alignment for that user set.
double alignment_gain(const DiscreteChannel& ch, const std::vector<Pmf>& dist,
                      const AuxSpec& aux, const std::vector<std::size_t>& users);

struct ResolvableReport {
  std::vector<Polytope> regions;  // inner (= outer) region per grid law
};

// For channels whose auxiliary tuple is recoverable from the interference
// variable: verifies recoverability structurally, then checks inner = outer
// at every law of the grid and returns the common regions. Throws DomainError
// naming the violation otherwise.
ResolvableReport resolvable_capacity(const DiscreteChannel& ch,
                                     const std::vector<std::vector<Pmf>>& dist_grid,
                                     const AuxSpec& aux);

}  // namespace mto
