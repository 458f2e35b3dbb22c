#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "mto/channels.hpp"

namespace mto {

// Outcome of a noisy-interference membership test. `margin` is the slack in
// the binding inequality (positive inside the regime); for the LP test it is
// tol - residual. `degrading_map` certifies feasible LP verdicts;
// `witness_mi` certifies violated scalar verdicts.
struct RegimeReport {
  bool noisy = false;
  double margin = 0.0;
  std::string method;
  double residual = 0.0;
  std::optional<Eigen::MatrixXd> degrading_map;  // q(v | y_2..y_K), rows y
  std::optional<double> witness_mi;
  std::optional<std::size_t> witness_user;  // 1-based user id
  bool boundary = false;
  std::vector<std::string> notes;
};

// LP feasibility of a stochastic map q(v|y_2..y_K) reproducing p(v|x_2..x_K)
// through the product of the direct kernels. Feasible iff the minimized
// max-residual is <= tol.
RegimeReport degraded_lp(const DiscreteChannel& ch, double tol = 1e-9);

// Scalar condition: sum_j |h_1j|^2 / |h_jj|^2 <= 1 (j = 2..K).
RegimeReport check_eq1_siso(const std::vector<std::complex<double>>& h_1j,
                            const std::vector<std::complex<double>>& h_jj);

// Single-antenna transmitters, vector receivers: sum of squared-norm ratios
// after normalizing each direct vector (sufficient trace bound).
RegimeReport check_simo(const std::vector<Eigen::VectorXcd>& h_1i,
                        const std::vector<Eigen::VectorXcd>& h_ii);

// Diagonalized multi-antenna links: sum over users and diagonal entries of
// |h_1i^(k)|^2 / |h_ii^(k)|^2 <= 1.
RegimeReport check_mimo_diag(const std::vector<Eigen::VectorXcd>& h_1i_diag,
                             const std::vector<Eigen::VectorXcd>& h_ii_diag);

// Fading statistics: sum_{i>=2} sigma_1i / sigma_ii <= 1 (standard-deviation
// ratios, exactly as stated for the fading family).
RegimeReport check_fading(const std::vector<double>& sigma_1i,
                          const std::vector<double>& sigma_ii);

// General vector-channel test: (a) sum_i lambda_i <= I_{N1} (PSD order,
// 1e-9 tolerance), (b) each cross link factors through the direct link
// (H_1i = D_i H_ii with D_i = H_1i pinv(H_ii)) with lambda_i - D_i D_i*
// PSD up to -1e-9. Empty lambda list => minimal choice lambda_i = D_i D_i*.
RegimeReport check_corollary1(const GaussianChannel& ch,
                              const std::vector<Eigen::MatrixXcd>& lambda = {});

// Non-degradedness certificate for scalar channels outside the regime:
// picks an interferer whose gain ratio exceeds its allotted correlation and
// returns the (positive) conditional mutual information
// I(X; h_1i X + Z_1 | h_ii X + Z_i) with unit-power Gaussian X and noise
// correlation rho_i. Throws DomainError when the channel is not violated or
// the certificate degenerates to zero.
struct WitnessValue {
  std::size_t user = 0;  // 1-based user id (2..K)
  double rho = 0.0;
  double mi_bits = 0.0;
};
WitnessValue nondegraded_witness(const std::vector<std::complex<double>>& h_1j,
                                 const std::vector<std::complex<double>>& h_jj,
                                 std::vector<double> rho = {});

// Closed-form value of the witness information for one interferer.
double witness_mi_bits(std::complex<double> h_cross, std::complex<double> h_direct,
                       double rho);

// Family dispatcher used by the CLI.
RegimeReport check_regime(const Channel& ch, double tol = 1e-9);

}  // namespace mto
