#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "mto/channels.hpp"
#include "mto/rng.hpp"

namespace mto {

// One randomized verification battery: `pass` means every trial held up;
// `worst` is the tightest slack (or largest deviation) seen, and `details`
// explains the first failure.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst = 0.0;
  std::string details;
};

// ---- Canonical toy channels -----------------------------------------------

// K=3, all binary: V = X2 xor X3, receiver 1 sees (X1, V), receivers 2 and 3
// are noiseless. Sum capacity is 3 bits at uniform inputs.
DiscreteChannel toy_xor_channel();

// K=3, all binary: V = (X2, X3) concatenated, so the per-user interference
// components are recoverable from V and the inner/outer regions coincide.
DiscreteChannel toy_concat_channel();

// ---- Random instance generators --------------------------------------------

// Scalar complex link gains h_1j (cross) and h_jj (direct) for j = 2..K.
struct ScalarGains {
  std::vector<std::complex<double>> cross;
  std::vector<std::complex<double>> direct;
};

// Draws gains whose interference-to-direct ratio sum lands away from the
// boundary: half the draws satisfy the scalar noisy condition, half violate it.
ScalarGains random_scalar_gains(SplitMix64& gen, std::size_t k);

// Wraps scalar gains into a single-antenna Gaussian channel (h11 = 1).
GaussianChannel scalar_gaussian_channel(const ScalarGains& gains,
                                        const std::vector<double>& power = {});

// Deterministic K-user channel with per-user alphabet sizes in [2, max_alpha]:
// random deterministic direct maps, a random surjective interference map, and
// receiver-1 outputs (x1, v) scrambled by a per-x1 permutation.
DiscreteChannel random_deterministic_channel(SplitMix64& gen, std::size_t k,
                                             std::size_t max_alpha = 3);

// Strictly positive random product input for a discrete channel.
std::vector<Pmf> random_product_input(SplitMix64& gen, const DiscreteChannel& ch);

// ---- Verification batteries --------------------------------------------------

// Scalar ratio test vs the PSD test with lambda_i = |h_1i|^2/|h_ii|^2 on random
// K in {2,3,4} channels; every violated instance must carry a non-degradedness
// witness above 1e-6 bits.
CheckResult check_scalar_equivalence(std::size_t trials, std::uint64_t seed);

// Entropy-difference inequality for random binary two-letter chains
// A -> B -> C: slack >= -1e-9 for arbitrary joint inputs, equality within
// 1e-10 for i.i.d. inputs.
CheckResult check_chain_inequality(std::size_t trials, std::uint64_t seed);

// Two-carrier single-letter version with equality for separable inputs.
CheckResult check_parallel_inequality(std::size_t trials, std::uint64_t seed);

// inner_region_parametric (Fourier-Motzkin elimination of the Omega variables)
// equals inner_region on the toy channels plus random deterministic K=3
// channels, checked by mutual LP containment.
CheckResult check_fm_inner_equality(std::size_t trials, std::uint64_t seed);

// Two-letter consistency gap of the toy XOR channel (must be <= 1e-6).
CheckResult check_two_letter_xor();

// ---- Full suite ---------------------------------------------------------------

struct VerifySuiteOptions {
  std::uint64_t seed = 1;
  std::size_t equivalence_trials = 200;
  std::size_t chain_trials = 100;
  std::size_t region_trials = 20;
  bool include_two_letter = true;  // the slow item (dense two-letter ascent)
};

std::vector<CheckResult> run_verification_suite(const VerifySuiteOptions& opt = {});

}  // namespace mto
