#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mto/pmf.hpp"

namespace mto {

// Many-to-one interference network: receiver 1 sees every transmitter
// (users 2..K interfere through a combined variable V), while receivers
// 2..K each see only their own transmitter.

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> problems;

  void fail(std::string what) {
    ok = false;
    problems.push_back(std::move(what));
  }
};

// Finite-alphabet channel. Receiver 1 observes y1 = f1(x1, v) with v drawn
// from interference_kernel given (x2,...,xK); receiver i>=2 observes y_i
// from its direct kernel given x_i.
struct DiscreteChannel {
  std::size_t k = 0;
  std::vector<std::vector<std::string>> x_alphabets;  // size k, user 1 first
  std::vector<std::vector<std::string>> y_alphabets;  // size k
  std::vector<std::string> v_alphabet;
  // p(y_i | x_i) for i = 2..K (row x, column y).
  std::vector<Eigen::MatrixXd> direct_kernels;
  // p(v | x_2..x_K); rows enumerate interferer tuples row-major
  // (x_2 slowest, x_K fastest), columns enumerate v.
  Eigen::MatrixXd interference_kernel;
  // y1 = f1[x1][v]; must be injective in v for every fixed x1 so that v is
  // recoverable from (y1, x1).
  std::vector<std::vector<std::size_t>> f1;

  std::vector<std::size_t> interferer_shape() const {
    std::vector<std::size_t> s;
    for (std::size_t i = 1; i < k; ++i) s.push_back(x_alphabets[i].size());
    return s;
  }
};

// Linear vector channel with unit-variance complex noise per antenna.
struct GaussianChannel {
  std::size_t k = 0;
  std::vector<Eigen::Index> tx_antennas;  // M_i
  std::vector<Eigen::Index> rx_antennas;  // N_i
  Eigen::MatrixXcd h11;                   // N_1 x M_1
  std::vector<Eigen::MatrixXcd> direct;   // H_ii (N_i x M_i), i = 2..K
  std::vector<Eigen::MatrixXcd> cross;    // H_1i (N_1 x M_i), i = 2..K
  std::vector<double> power;              // trace budgets P_i, size k
  // Optional finite input constellations (scalar channels only).
  std::vector<std::optional<std::vector<std::complex<double>>>> constellations;
};

// Independent carriers used by the same K users.
struct ParallelChannel {
  std::vector<std::variant<DiscreteChannel, GaussianChannel>> carriers;
  // If set, per-user power budgets shared across Gaussian carriers
  // (otherwise each carrier keeps its own budget).
  std::optional<std::vector<double>> shared_power;
};

// Scalar fast-fading coefficients known to receivers; entries are the
// standard deviations of the fade on each link.
struct FadingChannel {
  std::size_t k = 0;
  double sigma_11 = 1.0;
  std::vector<double> sigma_cross;   // sigma_{1i}, i = 2..K
  std::vector<double> sigma_direct;  // sigma_{ii}, i = 2..K
  std::vector<double> power;         // size k
};

using Channel =
    std::variant<DiscreteChannel, GaussianChannel, ParallelChannel, FadingChannel>;

ValidationReport validate(const DiscreteChannel& ch);
ValidationReport validate(const GaussianChannel& ch);
ValidationReport validate(const ParallelChannel& ch);
ValidationReport validate(const FadingChannel& ch);
ValidationReport validate(const Channel& ch);

// Collision model: every user may idle ("phi"); receiver 1 gets x1 through
// an erasure that fires with the collision probability of the interferer
// activity pattern; receivers i>=2 are noiseless.
// collision_prob: one probability per interferer tuple (row-major over
// users 2..K including "phi"), or empty => deterministic rule
// "erase iff any interferer is active".
DiscreteChannel make_collision(const std::vector<std::vector<std::string>>& x_prime,
                               const std::vector<double>& collision_prob = {});

// Per-user deterministic auxiliaries u_i = g_i(x_i), i = 2..K, such that the
// interference variable is a function of (u_2,...,u_K) alone.
struct AuxSpec {
  std::vector<std::vector<std::size_t>> maps;  // maps[i-2][x_index] = u index
  std::vector<std::vector<std::string>> u_alphabets;

  static AuxSpec identity(const DiscreteChannel& ch);
};

ValidationReport validate_aux(const DiscreteChannel& ch, const AuxSpec& aux);

// Law of V under a product input distribution on the interferers
// (input[0] corresponds to user 2).
Pmf effective_interference(const DiscreteChannel& ch,
                           const std::vector<Pmf>& interferer_inputs);

// True iff every kernel row is a point mass (tolerance 1e-12).
bool is_deterministic(const DiscreteChannel& ch);

// Joint law of (X1..XK, V, Y1..YK [, U2..UK]) under a product input law.
// Axis names: "X1".."XK", "V", "Y1".."YK", "U2".."UK".
JointPmf joint_law(const DiscreteChannel& ch, const std::vector<Pmf>& input,
                   const AuxSpec* aux = nullptr);

// Lift a parallel channel to one product-alphabet channel (all carriers
// discrete) or one block-diagonal vector channel (all carriers Gaussian).
std::variant<DiscreteChannel, GaussianChannel> lift_parallel(const ParallelChannel& par);

}  // namespace mto
