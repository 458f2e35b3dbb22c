#include "mto/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include "mto/capacity.hpp"
#include "mto/errors.hpp"
#include "mto/infotheory.hpp"
#include "mto/regimes.hpp"
#include "mto/regions.hpp"

namespace mto {
namespace {

std::vector<std::string> index_labels(std::size_t n, const std::string& prefix = "") {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

Eigen::MatrixXd point_mass_kernel(const std::vector<std::size_t>& map,
                                  std::size_t cols) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(Eigen::Index(map.size()),
                                            Eigen::Index(cols));
  for (std::size_t r = 0; r < map.size(); ++r)
    m(Eigen::Index(r), Eigen::Index(map[r])) = 1.0;
  return m;
}

// Receiver-1 output alphabet (x1, v) with f1[x1][v] = x1 * nv + perm[x1][v].
void attach_receiver1(DiscreteChannel& ch,
                      const std::vector<std::vector<std::size_t>>& perms) {
  const std::size_t nx1 = ch.x_alphabets[0].size();
  const std::size_t nv = ch.v_alphabet.size();
  ch.y_alphabets[0] = index_labels(nx1 * nv, "y");
  ch.f1.assign(nx1, std::vector<std::size_t>(nv));
  for (std::size_t a = 0; a < nx1; ++a)
    for (std::size_t v = 0; v < nv; ++v)
      ch.f1[a][v] = a * nv + (perms.empty() ? v : perms[a][v]);
}

DiscreteChannel binary_deterministic_base() {
  DiscreteChannel ch;
  ch.k = 3;
  ch.x_alphabets = {index_labels(2), index_labels(2), index_labels(2)};
  ch.y_alphabets.resize(3);
  ch.y_alphabets[1] = index_labels(2);
  ch.y_alphabets[2] = index_labels(2);
  ch.direct_kernels = {point_mass_kernel({0, 1}, 2), point_mass_kernel({0, 1}, 2)};
  return ch;
}

Eigen::MatrixXd random_stochastic(SplitMix64& gen, std::size_t rows,
                                  std::size_t cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      double w = 0.05 + gen.uniform();
      m(Eigen::Index(r), Eigen::Index(c)) = w;
      total += w;
    }
    for (std::size_t c = 0; c < cols; ++c) m(Eigen::Index(r), Eigen::Index(c)) /= total;
  }
  return m;
}

std::vector<double> random_simplex(SplitMix64& gen, std::size_t n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) {
    v = 0.05 + gen.uniform();
    total += v;
  }
  for (auto& v : p) v /= total;
  return p;
}

JointPmf random_joint(SplitMix64& gen, const std::vector<std::string>& axes,
                      const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t s : shape) n *= s;
  return JointPmf(axes, shape, random_simplex(gen, n));
}

void record_failure(CheckResult& out, const std::string& what) {
  ++out.failures;
  if (out.details.empty()) out.details = what;
}

}  // namespace

DiscreteChannel toy_xor_channel() {
  DiscreteChannel ch = binary_deterministic_base();
  ch.v_alphabet = index_labels(2, "v");
  // V = X2 xor X3; rows enumerate (x2, x3) with x2 slowest.
  ch.interference_kernel = point_mass_kernel({0, 1, 1, 0}, 2);
  attach_receiver1(ch, {});
  return ch;
}

DiscreteChannel toy_concat_channel() {
  DiscreteChannel ch = binary_deterministic_base();
  ch.v_alphabet = index_labels(4, "v");
  // V = (X2, X3): every interferer tuple keeps its own letter.
  ch.interference_kernel = point_mass_kernel({0, 1, 2, 3}, 4);
  attach_receiver1(ch, {});
  return ch;
}

ScalarGains random_scalar_gains(SplitMix64& gen, std::size_t k) {
  if (k < 2) throw DimensionError("random_scalar_gains: need k >= 2");
  const std::size_t m = k - 1;
  // Target ratio sum away from 1 so the verdict is numerically unambiguous.
  const bool inside = (gen() & 1) != 0;
  const double total = inside ? gen.uniform(0.05, 0.95) : gen.uniform(1.05, 3.0);
  std::vector<double> parts = random_simplex(gen, m);

  ScalarGains out;
  constexpr double tau = 2.0 * std::numbers::pi;
  for (std::size_t j = 0; j < m; ++j) {
    const double mag_d = gen.uniform(0.5, 1.5);
    const double mag_c = std::sqrt(parts[j] * total) * mag_d;
    out.direct.push_back(std::polar(mag_d, gen.uniform(0.0, tau)));
    out.cross.push_back(std::polar(mag_c, gen.uniform(0.0, tau)));
  }
  return out;
}

GaussianChannel scalar_gaussian_channel(const ScalarGains& gains,
                                        const std::vector<double>& power) {
  GaussianChannel ch;
  ch.k = gains.direct.size() + 1;
  ch.h11 = Eigen::MatrixXcd::Constant(1, 1, 1.0);
  for (std::size_t j = 0; j < gains.direct.size(); ++j) {
    ch.direct.push_back(Eigen::MatrixXcd::Constant(1, 1, gains.direct[j]));
    ch.cross.push_back(Eigen::MatrixXcd::Constant(1, 1, gains.cross[j]));
  }
  ch.power = power.empty() ? std::vector<double>(ch.k, 1.0) : power;
  ch.tx_antennas.assign(ch.k, 1);
  ch.rx_antennas.assign(ch.k, 1);
  ch.constellations.resize(ch.k);  // slots ready for per-user assignment
  return ch;
}

DiscreteChannel random_deterministic_channel(SplitMix64& gen, std::size_t k,
                                             std::size_t max_alpha) {
  if (k < 2) throw DimensionError("random_deterministic_channel: need k >= 2");
  if (max_alpha < 2)
    throw DimensionError("random_deterministic_channel: need max_alpha >= 2");
  DiscreteChannel ch;
  ch.k = k;
  std::vector<std::size_t> nx(k);
  for (auto& n : nx) n = 2 + gen.below(max_alpha - 1);
  for (std::size_t i = 0; i < k; ++i) ch.x_alphabets.push_back(index_labels(nx[i]));
  ch.y_alphabets.resize(k);

  // Deterministic direct links y_i = g_i(x_i) (not necessarily injective).
  for (std::size_t i = 1; i < k; ++i) {
    std::vector<std::size_t> map(nx[i]);
    for (auto& y : map) y = gen.below(nx[i]);
    ch.y_alphabets[i] = index_labels(nx[i]);
    ch.direct_kernels.push_back(point_mass_kernel(map, nx[i]));
  }

  // Random interference map on interferer tuples, compacted to its image so
  // every letter of V actually occurs.
  std::size_t tuples = 1;
  for (std::size_t i = 1; i < k; ++i) tuples *= nx[i];
  std::vector<std::size_t> raw(tuples);
  for (auto& v : raw) v = gen.below(tuples);
  std::vector<std::size_t> compact(tuples, tuples);
  std::size_t nv = 0;
  std::vector<std::size_t> vmap(tuples);
  for (std::size_t t = 0; t < tuples; ++t) {
    if (compact[raw[t]] == tuples) compact[raw[t]] = nv++;
    vmap[t] = compact[raw[t]];
  }
  ch.v_alphabet = index_labels(nv, "v");
  ch.interference_kernel = point_mass_kernel(vmap, nv);

  std::vector<std::vector<std::size_t>> perms(nx[0]);
  for (auto& perm : perms) {
    perm.resize(nv);
    for (std::size_t v = 0; v < nv; ++v) perm[v] = v;
    for (std::size_t v = nv; v > 1; --v)
      std::swap(perm[v - 1], perm[gen.below(v)]);
  }
  attach_receiver1(ch, perms);
  return ch;
}

std::vector<Pmf> random_product_input(SplitMix64& gen, const DiscreteChannel& ch) {
  std::vector<Pmf> input;
  for (std::size_t i = 0; i < ch.k; ++i) {
    const std::size_t n = ch.x_alphabets[i].size();
    input.emplace_back(index_labels(n), random_simplex(gen, n));
  }
  return input;
}

CheckResult check_scalar_equivalence(std::size_t trials, std::uint64_t seed) {
  CheckResult out;
  out.name = "scalar_regime_equivalence";
  out.trials = trials;
  out.worst = std::numeric_limits<double>::infinity();
  SplitMix64 gen(derive_seed(seed, 101));
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t k = 2 + gen.below(3);
    ScalarGains gains = random_scalar_gains(gen, k);
    RegimeReport eq1 = check_eq1_siso(gains.cross, gains.direct);

    GaussianChannel ch = scalar_gaussian_channel(gains);
    std::vector<Eigen::MatrixXcd> lambda;
    for (std::size_t j = 0; j + 1 < k; ++j)
      lambda.push_back(Eigen::MatrixXcd::Constant(
          1, 1, std::norm(gains.cross[j]) / std::norm(gains.direct[j])));
    RegimeReport psd = check_corollary1(ch, lambda);

    if (eq1.noisy != psd.noisy) {
      std::ostringstream os;
      os << "trial " << t << ": scalar verdict " << eq1.noisy
         << " but PSD verdict " << psd.noisy << " (margin " << eq1.margin << ")";
      record_failure(out, os.str());
      continue;
    }
    if (!eq1.noisy) {
      double mi = 0.0;
      std::string why;
      try {
        mi = nondegraded_witness(gains.cross, gains.direct).mi_bits;
      } catch (const std::exception& e) {
        why = e.what();
      }
      out.worst = std::min(out.worst, mi);
      if (mi <= 1e-6) {
        std::ostringstream os;
        os << "trial " << t << ": witness " << mi << " bits";
        if (!why.empty()) os << " (" << why << ")";
        record_failure(out, os.str());
      }
    }
  }
  out.pass = out.failures == 0;
  return out;
}

namespace {

CheckResult inequality_battery(const std::string& name, std::size_t trials,
                               std::uint64_t seed, bool parallel) {
  CheckResult out;
  out.name = name;
  out.trials = trials;
  out.worst = std::numeric_limits<double>::infinity();
  SplitMix64 gen(derive_seed(seed, parallel ? 103 : 102));
  for (std::size_t t = 0; t < trials; ++t) {
    const Eigen::MatrixXd p1 = random_stochastic(gen, 2, 2);
    const Eigen::MatrixXd q1 = random_stochastic(gen, 2, 2);
    const Eigen::MatrixXd p2 = parallel ? random_stochastic(gen, 2, 2) : p1;
    const Eigen::MatrixXd q2 = parallel ? random_stochastic(gen, 2, 2) : q1;

    const JointPmf joint = random_joint(gen, {"A1", "A2"}, {2, 2});
    const Pmf m1(index_labels(2), random_simplex(gen, 2));
    const Pmf m2(index_labels(2), random_simplex(gen, 2));
    const JointPmf product =
        JointPmf::product({"A1", "A2"}, parallel ? std::vector<Pmf>{m1, m2}
                                                 : std::vector<Pmf>{m1, m1});

    ExtremalCheck correlated, separable;
    if (parallel) {
      correlated = extremal_gap_check_parallel(joint, {p1, p2}, {q1, q2});
      separable = extremal_gap_check_parallel(product, {p1, p2}, {q1, q2});
    } else {
      correlated = extremal_gap_check(joint, p1, q1);
      separable = extremal_gap_check(product, p1, q1);
    }

    out.worst = std::min(out.worst, correlated.slack);
    if (correlated.slack < -1e-9) {
      std::ostringstream os;
      os << "trial " << t << ": slack " << correlated.slack;
      record_failure(out, os.str());
    }
    if (std::abs(separable.slack) > 1e-10) {
      std::ostringstream os;
      os << "trial " << t << ": separable-input slack " << separable.slack
         << " (expected 0)";
      record_failure(out, os.str());
    }
  }
  out.pass = out.failures == 0;
  return out;
}

}  // namespace

CheckResult check_chain_inequality(std::size_t trials, std::uint64_t seed) {
  return inequality_battery("chain_entropy_inequality", trials, seed, false);
}

CheckResult check_parallel_inequality(std::size_t trials, std::uint64_t seed) {
  return inequality_battery("parallel_entropy_inequality", trials, seed, true);
}

CheckResult check_fm_inner_equality(std::size_t trials, std::uint64_t seed) {
  CheckResult out;
  out.name = "parametric_region_equality";
  SplitMix64 gen(derive_seed(seed, 104));

  std::vector<std::pair<std::string, DiscreteChannel>> cases;
  cases.emplace_back("xor", toy_xor_channel());
  cases.emplace_back("concat", toy_concat_channel());
  for (std::size_t t = 0; t < trials; ++t)
    cases.emplace_back("random " + std::to_string(t),
                       random_deterministic_channel(gen, 3));
  out.trials = cases.size();

  for (const auto& [label, ch] : cases) {
    const AuxSpec aux = AuxSpec::identity(ch);
    const std::vector<Pmf> dist = random_product_input(gen, ch);
    try {
      const Polytope inner = inner_region(ch, dist, aux);
      const Polytope param = inner_region_parametric(ch, dist, aux);
      if (!regions_equal(param, inner, 1e-9))
        record_failure(out, label + ": eliminated region differs from direct region");
    } catch (const std::exception& e) {
      record_failure(out, label + ": " + e.what());
    }
  }
  out.pass = out.failures == 0;
  return out;
}

CheckResult check_two_letter_xor() {
  CheckResult out;
  out.name = "two_letter_consistency_xor";
  out.trials = 1;
  const DiscreteChannel ch = toy_xor_channel();
  try {
    const CapacityResult cap = sum_capacity_discrete(ch);
    const double gap = two_letter_consistency(ch, cap.bits);
    out.worst = gap;
    if (gap > 1e-6 || gap < -1e-9) {
      std::ostringstream os;
      os << "two-letter gap " << gap << " bits at value " << cap.bits;
      record_failure(out, os.str());
    }
  } catch (const std::exception& e) {
    record_failure(out, e.what());
  }
  out.pass = out.failures == 0;
  return out;
}

std::vector<CheckResult> run_verification_suite(const VerifySuiteOptions& opt) {
  std::vector<CheckResult> results;
  results.push_back(check_scalar_equivalence(opt.equivalence_trials, opt.seed));
  results.push_back(check_chain_inequality(opt.chain_trials, opt.seed));
  results.push_back(check_parallel_inequality(opt.chain_trials, opt.seed));
  results.push_back(check_fm_inner_equality(opt.region_trials, opt.seed));
  if (opt.include_two_letter) results.push_back(check_two_letter_xor());
  return results;
}

}  // namespace mto
