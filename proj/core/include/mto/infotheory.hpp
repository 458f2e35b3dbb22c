#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "mto/pmf.hpp"

namespace mto {

// All entropies and rates are in bits (log base 2).

// Entropy of a probability vector; entries below 1e-15 contribute zero.
double entropy(const std::vector<double>& probs);
double entropy(const JointPmf& joint);

// H(targets | given); axis sets must be disjoint.
double conditional_entropy(const JointPmf& joint,
                           const std::vector<std::string>& targets,
                           const std::vector<std::string>& given);

// I(a ; b); axis sets must be disjoint.
double mutual_information(const JointPmf& joint,
                          const std::vector<std::string>& a,
                          const std::vector<std::string>& b);

// log2 det of a Hermitian positive definite matrix (Cholesky based).
double log2_det_hpd(const Eigen::MatrixXcd& m);

// Treat-interference-as-noise rate of one vector receiver with unit noise:
//   log2 det(I + sum_all H G H*) - log2 det(I + sum_interf H G H*).
// links = (H, G) pairs; the first entry is the desired link.
double gaussian_tin_rate(
    const std::vector<std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>>& links);

// Per-user TIN rates for a general linear network. h[i][j] is the channel
// from user j to receiver i (size-0 matrix means no link); gamma[j] is the
// input covariance of user j; unit noise at every receiver.
std::vector<double> gaussian_sum_rate(
    const std::vector<std::vector<Eigen::MatrixXcd>>& h,
    const std::vector<Eigen::MatrixXcd>& gamma);

// ---- Extremal entropy-difference inequality oracles ----------------------

struct ExtremalCheck {
  double multi_letter = 0.0;   // H(B over all letters) - H(C over all letters)
  double single_letter = 0.0;  // sum of per-letter H(B)-H(C)
  double slack = 0.0;          // single_letter - multi_letter (>= 0)
};

// T-letter memoryless chain A -> B -> C with one kernel pair for all letters.
// input_law has T axes, each of size p_b_given_a.rows().
ExtremalCheck extremal_gap_check(const JointPmf& input_law,
                                 const Eigen::MatrixXd& p_b_given_a,
                                 const Eigen::MatrixXd& q_c_given_b);

// Parallel version: one kernel pair per carrier, input law jointly over the
// carriers (axis f has size p_b_given_a[f].rows()).
ExtremalCheck extremal_gap_check_parallel(
    const JointPmf& input_law, const std::vector<Eigen::MatrixXd>& p_b_given_a,
    const std::vector<Eigen::MatrixXd>& q_c_given_b);

// max over 0 <= G <= gamma (PSD order) of log2 det(G+n1) - log2 det(G+n2).
// Projected gradient on the congruence-normalized variable; returns the
// best value found together with the maximizer.
struct ExtremalOptimum {
  double value = 0.0;
  Eigen::MatrixXcd maximizer;
  bool converged = true;
};
ExtremalOptimum gaussian_extremal_optimum(const Eigen::MatrixXcd& gamma,
                                          const Eigen::MatrixXcd& n1,
                                          const Eigen::MatrixXcd& n2);

// ---- Finite-constellation mutual information ------------------------------

// Nodes/weights for integrating f against exp(-t^2) on the real line.
struct GaussHermite {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
GaussHermite gauss_hermite(int n);

struct InterferenceTerm {
  std::complex<double> gain;
  std::vector<std::complex<double>> points;
  std::vector<double> weights;
};

enum class MiMethod { kQuadrature, kMonteCarlo };

struct MiOptions {
  MiMethod method = MiMethod::kQuadrature;
  int quad_nodes = 32;          // per real dimension
  std::int64_t mc_samples = 200000;
  std::uint64_t seed = 1;
};

struct MiEstimate {
  double bits = 0.0;
  double std_err = 0.0;  // zero for quadrature
};

// I(X;Y) for Y = direct_gain*X + sum_j gain_j*S_j + Z, Z ~ CN(0, noise_var),
// X drawn from `points` with `weights`, S_j from the interference terms.
MiEstimate constellation_mi(const std::vector<std::complex<double>>& points,
                            const std::vector<double>& weights,
                            std::complex<double> direct_gain,
                            const std::vector<InterferenceTerm>& interference,
                            double noise_var, const MiOptions& opt = {});

}  // namespace mto
