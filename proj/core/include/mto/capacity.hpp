#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mto/channels.hpp"
#include "mto/pmf.hpp"

namespace mto {

struct CapacityOptions {
  double tol = 1e-6;        // optimizer convergence target
  int grid = 0;             // certification grid points per axis; 0 = auto
  int restarts = 8;         // multi-start count (deterministic seeds)
  int line_points = 65;     // per-axis points in coordinate line searches
  int max_rounds = 80;      // coordinate-ascent sweeps per start
  int max_iters = 500;      // projected-gradient iterations per start
  std::uint64_t seed = 1;   // base seed for the restart generators
  bool lower_bound_ok = false;  // accept values outside the noisy regime
  int quad_nodes = 32;      // Gauss-Hermite nodes for constellation terms
};

// Value and maximizer of a sum-rate optimization. Exactly one of `argmax`,
// `gamma`, `weights` is populated, matching the channel family. When the
// regime test fails and `lower_bound_ok` was set, the value is only an
// achievable rate and `lower_bound_only` is set.
struct CapacityResult {
  double bits = 0.0;
  std::vector<Pmf> argmax;                  // discrete inputs
  std::vector<Eigen::MatrixXcd> gamma;      // Gaussian input covariances
  std::vector<std::vector<double>> weights; // constellation weights
  std::vector<double> per_user_bits;
  std::vector<double> per_carrier_bits;     // parallel channels
  std::vector<CapacityResult> carriers;     // parallel per-carrier details
  bool regime_noisy = true;
  double regime_margin = 0.0;
  bool lower_bound_only = false;
  bool grid_certified = false;   // exhaustive product-grid scan confirmed
  double restart_spread = 0.0;   // best minus worst across restarts
  bool converged = true;
  double max_weight_deviation = 0.0;  // constellation: max |w - 1/n|
  std::vector<std::string> notes;
};

// ---- Objective evaluators (public so tests and sweeps can reuse them) -----

// Sum of treat-interference-as-noise rates under a product input law
// (input[0] = user 1). Receiver 1 faces the aggregate interference V.
double discrete_tin_sum_rate(const DiscreteChannel& ch,
                             const std::vector<Pmf>& input);
std::vector<double> discrete_tin_user_rates(const DiscreteChannel& ch,
                                            const std::vector<Pmf>& input);

// H(Y1) + H(Y_2..Y_K | V) for deterministic channels under a product law.
double deterministic_sum_objective(const DiscreteChannel& ch,
                                   const std::vector<Pmf>& input);

// Sum of TIN rates for a Gaussian channel at given input covariances.
double gaussian_channel_sum_rate(const GaussianChannel& ch,
                                 const std::vector<Eigen::MatrixXcd>& gamma);
std::vector<double> gaussian_channel_user_rates(
    const GaussianChannel& ch, const std::vector<Eigen::MatrixXcd>& gamma);

// Sum of TIN rates with constellation inputs at given weight vectors.
double constellation_sum_rate(const GaussianChannel& ch,
                              const std::vector<std::vector<double>>& weights,
                              int quad_nodes = 32);

// ---- Sum-capacity optimizers ----------------------------------------------

// Maximize the TIN sum rate over product pmfs. Requires the degradedness LP
// to pass unless opts.lower_bound_ok; multi-start coordinate ascent, with an
// exhaustive product-grid certification when the total free dimension is
// small (<= 4).
CapacityResult sum_capacity_discrete(const DiscreteChannel& ch,
                                     const CapacityOptions& opts = {});

// Maximize H(Y1) + H(Y_2..Y_K|V) for deterministic channels whose
// interference variable is recoverable from (Y_2..Y_K). Agrees with
// sum_capacity_discrete on such channels.
CapacityResult sum_capacity_deterministic(const DiscreteChannel& ch,
                                          const CapacityOptions& opts = {});

// Maximize the Gaussian TIN sum rate over PSD covariances with per-user
// trace budgets, via projected gradient ascent with multi-restart.
CapacityResult sum_capacity_gaussian(const GaussianChannel& ch,
                                     const CapacityOptions& opts = {});

// Per-carrier optimization; Gaussian carriers with a shared power budget get
// a joint power allocation across carriers. Each carrier must individually
// pass its regime test (or opts.lower_bound_ok must be set).
CapacityResult sum_capacity_parallel(const ParallelChannel& par,
                                     const CapacityOptions& opts = {});

// Maximize the TIN sum rate over constellation weight vectors (scalar
// Gaussian channels with per-user constellations).
CapacityResult sum_capacity_constellation(const GaussianChannel& ch,
                                          const CapacityOptions& opts = {});

// Best two-letter sum rate (per channel use) minus the single-letter optimum
// c1: optimizes over arbitrary per-user two-letter laws by lifting two
// copies of the channel. Nonpositive (up to tolerance) in the noisy regime.
double two_letter_consistency(const DiscreteChannel& ch, double c1,
                              const CapacityOptions& opts = {});

}  // namespace mto
