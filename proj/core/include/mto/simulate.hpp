#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mto/channels.hpp"
#include "mto/pmf.hpp"

namespace mto {

// Random codebook with codeword symbols drawn i.i.d. from an input law;
// regenerated bit-identically from (seed, rate, blocklength, law).
struct Codebook {
  std::size_t user = 0;
  double rate = 0.0;  // bits per channel use
  int blocklength = 0;
  std::uint64_t seed = 0;
  std::size_t num_codewords = 0;           // 2^ceil(T * rate)
  std::vector<std::uint8_t> symbols;       // num_codewords x blocklength

  const std::uint8_t* codeword(std::size_t m) const {
    return symbols.data() + m * static_cast<std::size_t>(blocklength);
  }

  static Codebook draw(std::size_t user, double rate, int blocklength,
                       const Pmf& input, std::uint64_t seed,
                       std::size_t max_codewords);
};

struct TrialConfig {
  std::vector<double> rates;      // one per user
  std::vector<int> blocklengths;  // sweep points
  int trials = 2000;
  double epsilon = 0.5;           // typicality width; see window note below
  std::uint64_t seed = 1;
  std::vector<Pmf> inputs;        // empty => uniform per user
  std::size_t max_codewords = std::size_t{1} << 16;
};

struct TrialRecord {
  int blocklength = 0;
  std::vector<double> rates;
  long trials = 0;
  long errors = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;  // 95% Wilson interval
  double ci_hi = 0.0;
};

// Monte-Carlo block-error estimate at one blocklength. Fresh codebooks and
// messages are drawn each trial; receiver 1 decodes by strong joint
// typicality against its single-letter law with the aggregate interference
// treated as noise, receivers 2..K against their own pair laws. A symbol
// pair (x, y) with count n passes when |n/T - p| <= eps*p + eps/cells and
// cells with p = 0 stay unhit; ambiguous decodes (0 or >= 2 typical
// candidates) count as errors. A trial errs when any receiver errs.
TrialRecord run_tin_trial(const DiscreteChannel& ch, const TrialConfig& cfg,
                          int blocklength);

// Maps run_tin_trial over cfg.blocklengths.
std::vector<TrialRecord> sweep_blocklength(const DiscreteChannel& ch,
                                           const TrialConfig& cfg);

// CSV with header: T, R_1..R_K, trials, errors, p_hat, ci_lo, ci_hi.
void write_trial_csv(std::ostream& os, const std::vector<TrialRecord>& records);

}  // namespace mto
