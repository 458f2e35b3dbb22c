// Acceptance suite: ten self-contained checks, one per command-line index.
// Each run prints exactly one "PASS criterion N: ..." or "FAIL criterion N:
// ..." line with its key metrics and elapsed time, and exits nonzero on
// failure. ctest registers every index as its own test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mto/capacity.hpp"
#include "mto/channels.hpp"
#include "mto/checks.hpp"
#include "mto/infotheory.hpp"
#include "mto/regimes.hpp"
#include "mto/regions.hpp"
#include "mto/rng.hpp"
#include "mto/simulate.hpp"

namespace {

using cd = std::complex<double>;
using mto::Pmf;

struct Outcome {
  bool pass = false;
  std::string metrics;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// ---- 1: scalar ratio test vs PSD test, with witnesses ----------------------

Outcome criterion1() {
  const mto::CheckResult c = mto::check_scalar_equivalence(200, 1);
  Outcome out;
  out.pass = c.pass;
  out.metrics = "200 random scalar channels, verdicts agree, min witness " +
                fmt(c.worst) + " bits";
  if (!c.pass) out.metrics += "; first failure: " + c.details;
  return out;
}

// ---- 2: xor network sum capacity and two-letter consistency ----------------

Outcome criterion2() {
  const mto::DiscreteChannel ch = mto::toy_xor_channel();
  const mto::CapacityResult tin = mto::sum_capacity_discrete(ch);
  const mto::CapacityResult det = mto::sum_capacity_deterministic(ch);
  const double gap = mto::two_letter_consistency(ch, tin.bits);

  const bool ok_tin = std::abs(tin.bits - 3.0) <= 1e-6;
  const bool ok_det = std::abs(det.bits - 3.0) <= 1e-6;
  const bool ok_gap = gap <= 1e-6;
  Outcome out;
  out.pass = ok_tin && ok_det && ok_gap;
  out.metrics = "sum rate " + fmt(tin.bits) + " (tin) / " + fmt(det.bits) +
                " (deterministic), two-letter gap " + fmt(gap);
  return out;
}

// ---- 3: projected gradient vs an exhaustive power grid ---------------------

Outcome criterion3() {
  mto::SplitMix64 gen(1);
  const int grid_n = 200;
  double worst_gap = 0.0;
  int full_power_failures = 0;
  int instances = 0;
  while (instances < 50) {
    const mto::ScalarGains gains = mto::random_scalar_gains(gen, 2);
    if (!mto::check_eq1_siso(gains.cross, gains.direct).noisy) continue;
    ++instances;
    const double p1 = gen.uniform(0.5, 4.0);
    const double p2 = gen.uniform(0.5, 4.0);
    const mto::GaussianChannel ch = mto::scalar_gaussian_channel(gains, {p1, p2});

    double best = -1.0;
    int best_i = -1, best_j = -1;
    std::vector<Eigen::MatrixXcd> gamma(2, Eigen::MatrixXcd::Zero(1, 1));
    for (int i = 0; i < grid_n; ++i) {
      gamma[0](0, 0) = p1 * i / double(grid_n - 1);
      for (int j = 0; j < grid_n; ++j) {
        gamma[1](0, 0) = p2 * j / double(grid_n - 1);
        const std::vector<double> rates =
            mto::gaussian_channel_user_rates(ch, gamma);
        const double total = rates[0] + rates[1];
        if (total > best) {
          best = total;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_i != grid_n - 1 || best_j != grid_n - 1) ++full_power_failures;

    const mto::CapacityResult res = mto::sum_capacity_gaussian(ch);
    worst_gap = std::max(worst_gap, std::abs(res.bits - best));
  }
  Outcome out;
  out.pass = worst_gap <= 1e-4 && full_power_failures == 0;
  out.metrics = "50 noisy scalar pairs, max |ascent - grid| " + fmt(worst_gap) +
                ", grid optimum at full power in " +
                std::to_string(50 - full_power_failures) + "/50";
  return out;
}

// ---- 4: entropy-difference inequality batteries -----------------------------

Outcome criterion4() {
  const mto::CheckResult chain = mto::check_chain_inequality(100, 1);
  const mto::CheckResult par = mto::check_parallel_inequality(100, 1);
  Outcome out;
  out.pass = chain.pass && par.pass;
  out.metrics = "two-letter chains: min slack " + fmt(chain.worst) +
                "; two-carrier: min slack " + fmt(par.worst);
  if (!chain.pass) out.metrics += "; chain failure: " + chain.details;
  if (!par.pass) out.metrics += "; carrier failure: " + par.details;
  return out;
}

// ---- 5: parametric region projection equals the direct build ---------------

Outcome criterion5() {
  const mto::CheckResult c = mto::check_fm_inner_equality(20, 1);
  Outcome out;
  out.pass = c.pass;
  out.metrics = std::to_string(c.trials) +
                " channels, projected = direct region on every one";
  if (!c.pass) out.metrics += "; first failure: " + c.details;
  return out;
}

// ---- 6: resolvable interference closes the inner/outer gap ------------------

Outcome criterion6() {
  const mto::DiscreteChannel ch = mto::toy_concat_channel();
  const mto::AuxSpec aux = mto::AuxSpec::identity(ch);

  // 5 interior points per (binary) user => 125 product laws.
  std::vector<std::vector<Pmf>> grid;
  const int n = 5;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        auto law = [&](int j) {
          const double p = (2.0 * j + 1.0) / (2.0 * n);
          return Pmf(ch.x_alphabets[0], {p, 1.0 - p});
        };
        grid.push_back({law(a), law(b), law(c)});
      }

  int equal_count = 0;
  double max_delta = 0.0;
  for (const auto& dist : grid) {
    const mto::Polytope inner = mto::inner_region(ch, dist, aux);
    const mto::Polytope outer = mto::outer_region(ch, dist, aux);
    if (mto::regions_equal(inner, outer, 1e-9)) ++equal_count;
    for (const std::vector<std::size_t>& users :
         {std::vector<std::size_t>{2}, {3}, {2, 3}})
      max_delta = std::max(
          max_delta, std::abs(mto::alignment_gain(ch, dist, aux, users)));
  }
  bool resolvable_ok = true;
  try {
    (void)mto::resolvable_capacity(ch, grid, aux);
  } catch (const std::exception&) {
    resolvable_ok = false;
  }
  Outcome out;
  out.pass = equal_count == int(grid.size()) && max_delta <= 1e-12 && resolvable_ok;
  out.metrics = "inner = outer on " + std::to_string(equal_count) + "/" +
                std::to_string(grid.size()) + " laws, max |gain| " +
                fmt(max_delta);
  return out;
}

// ---- 7: xor alignment gain and converse maximum -----------------------------

Outcome criterion7() {
  const mto::DiscreteChannel ch = mto::toy_xor_channel();
  const mto::AuxSpec aux = mto::AuxSpec::identity(ch);
  std::vector<Pmf> uniform;
  for (std::size_t i = 0; i < ch.k; ++i)
    uniform.push_back(Pmf::uniform(ch.x_alphabets[i].size()));

  const double delta = mto::alignment_gain(ch, uniform, aux, {2, 3});
  const mto::Polytope outer = mto::outer_region(ch, uniform, aux);
  const mto::PolytopeOptimum best =
      mto::polytope_max(outer, Eigen::VectorXd::Ones(3));

  Outcome out;
  out.pass = std::abs(delta - 1.0) <= 1e-12 && best.ok &&
             std::abs(best.value - 3.0) <= 1e-9;
  out.metrics = "interfering-pair gain " + fmt(delta) +
                " bits, converse sum maximum " + fmt(best.value);
  return out;
}

// ---- 8: cross-carrier correlation cannot beat separable inputs --------------

mto::DiscreteChannel toy_and_channel() {
  // Same binary three-user shape as the xor network, but V = X2 and X3.
  mto::DiscreteChannel ch = mto::toy_xor_channel();
  Eigen::MatrixXd kern = Eigen::MatrixXd::Zero(4, 2);
  kern(0, 0) = kern(1, 0) = kern(2, 0) = 1.0;  // any zero input => v = 0
  kern(3, 1) = 1.0;
  ch.interference_kernel = kern;
  return ch;
}

// Enumerates pmfs with entries i/denom summing to 1 (compositions).
void compositions(std::size_t dims, int denom,
                  std::vector<std::vector<double>>& out) {
  std::vector<int> parts(dims, 0);
  std::vector<double> probs(dims);
  // Iterate all placements recursively (dims is small).
  auto rec = [&](auto&& self, std::size_t at, int left) -> void {
    if (at + 1 == dims) {
      parts[at] = left;
      for (std::size_t i = 0; i < dims; ++i)
        probs[i] = double(parts[i]) / double(denom);
      out.push_back(probs);
      return;
    }
    for (int take = 0; take <= left; ++take) {
      parts[at] = take;
      self(self, at + 1, left - take);
    }
  };
  rec(rec, 0, denom);
}

Outcome criterion8() {
  mto::ParallelChannel par;
  par.carriers.push_back(mto::toy_xor_channel());
  par.carriers.push_back(toy_and_channel());

  const mto::CapacityResult separable = mto::sum_capacity_parallel(par);

  // Lift to one channel over per-user letter pairs, then search arbitrary
  // joint-across-carrier laws: a dense composition grid plus the lifted
  // optimizer's own multi-start ascent.
  const auto lifted_var = mto::lift_parallel(par);
  const mto::DiscreteChannel& lifted =
      std::get<mto::DiscreteChannel>(lifted_var);

  std::vector<std::vector<double>> weights;
  compositions(4, 6, weights);  // 84 laws per user
  std::vector<Pmf> dist(3, Pmf::uniform(4));
  double grid_best = -1.0;
  for (const auto& w1 : weights) {
    dist[0] = Pmf(lifted.x_alphabets[0], w1);
    for (const auto& w2 : weights) {
      dist[1] = Pmf(lifted.x_alphabets[1], w2);
      for (const auto& w3 : weights) {
        dist[2] = Pmf(lifted.x_alphabets[2], w3);
        grid_best = std::max(grid_best, mto::discrete_tin_sum_rate(lifted, dist));
      }
    }
  }

  mto::CapacityOptions opts;
  opts.restarts = 6;
  const mto::CapacityResult ascent = mto::sum_capacity_discrete(lifted, opts);
  const double correlated = std::max(grid_best, ascent.bits);

  Outcome out;
  out.pass = correlated <= separable.bits + 1e-6;
  out.metrics = "separable " + fmt(separable.bits) + ", correlated grid " +
                fmt(grid_best) + ", correlated ascent " + fmt(ascent.bits);
  return out;
}

// ---- 9: decoding error trends across blocklengths ---------------------------

Outcome criterion9() {
  const mto::DiscreteChannel ch = mto::toy_xor_channel();

  mto::TrialConfig under;
  under.rates = {0.9, 0.9, 0.9};  // 90% of each single-user capacity
  under.blocklengths = {6, 10, 14};
  under.trials = 2000;
  under.seed = 1;
  const std::vector<mto::TrialRecord> sweep = mto::sweep_blocklength(ch, under);

  mto::TrialConfig over;
  over.rates = {1.1, 1.1, 1.1};
  over.trials = 2000;
  over.seed = 1;
  const mto::TrialRecord hot = mto::run_tin_trial(ch, over, 14);

  const bool decreasing =
      sweep[0].p_hat > sweep[1].p_hat && sweep[1].p_hat > sweep[2].p_hat;
  Outcome out;
  out.pass = decreasing && hot.p_hat >= 0.5;
  out.metrics = "90% load p_hat " + fmt(sweep[0].p_hat) + " > " +
                fmt(sweep[1].p_hat) + " > " + fmt(sweep[2].p_hat) +
                " over T=6,10,14; 110% load p_hat " + fmt(hot.p_hat) +
                " at T=14";
  return out;
}

// ---- 10: constellation weight optimum and integration cross-check -----------

Outcome criterion10() {
  mto::ScalarGains gains;
  gains.cross = {cd(0.8, 0.0)};
  gains.direct = {cd(1.0, 0.0)};
  mto::GaussianChannel ch = mto::scalar_gaussian_channel(gains);
  const std::vector<cd> bpsk{{1.0, 0.0}, {-1.0, 0.0}};
  ch.constellations[0] = bpsk;
  ch.constellations[1] = bpsk;

  const mto::CapacityResult res = mto::sum_capacity_constellation(ch);
  const std::vector<std::vector<double>> uniform{{0.5, 0.5}, {0.5, 0.5}};
  const double at_uniform = mto::constellation_sum_rate(ch, uniform);

  // Receiver-1 information, quadrature vs sampling.
  mto::InterferenceTerm interf;
  interf.gain = cd(0.8, 0.0);
  interf.points = bpsk;
  interf.weights = {0.5, 0.5};
  mto::MiOptions quad;
  quad.quad_nodes = 48;
  const double via_quad =
      mto::constellation_mi(bpsk, {0.5, 0.5}, 1.0, {interf}, 1.0, quad).bits;
  mto::MiOptions mc;
  mc.method = mto::MiMethod::kMonteCarlo;
  mc.mc_samples = 8000000;
  mc.seed = 1;
  const double via_mc =
      mto::constellation_mi(bpsk, {0.5, 0.5}, 1.0, {interf}, 1.0, mc).bits;

  const double integration_gap = std::abs(via_quad - via_mc);
  Outcome out;
  out.pass = res.bits >= at_uniform - 1e-9 && integration_gap <= 1e-3;
  out.metrics = "optimized " + fmt(res.bits) + " >= uniform " +
                fmt(at_uniform) + "; quadrature " + fmt(via_quad) +
                " vs sampled " + fmt(via_mc) + " (gap " +
                fmt(integration_gap) + ")";
  return out;
}

struct Criterion {
  int index;
  Outcome (*run)();
  double budget_seconds;  // 0 = no limit
};

const Criterion kCriteria[] = {
    {1, criterion1, 5.0},  {2, criterion2, 60.0}, {3, criterion3, 30.0},
    {4, criterion4, 10.0}, {5, criterion5, 10.0}, {6, criterion6, 5.0},
    {7, criterion7, 0.0},  {8, criterion8, 60.0}, {9, criterion9, 180.0},
    {10, criterion10, 0.0},
};

int run_one(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = c.run();
  } catch (const std::exception& e) {
    out.pass = false;
    out.metrics = std::string("unexpected exception: ") + e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  bool in_budget = c.budget_seconds <= 0.0 || elapsed <= c.budget_seconds;
  std::ostringstream line;
  line << (out.pass && in_budget ? "PASS" : "FAIL") << " criterion " << c.index
       << ": " << out.metrics;
  line.precision(2);
  line << std::fixed << " [" << elapsed << " s";
  if (c.budget_seconds > 0.0) line << " / " << c.budget_seconds << " s budget";
  if (!in_budget) line << ", budget exceeded";
  line << "]";
  std::cout << line.str() << std::endl;
  return out.pass && in_budget ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    const int want = std::atoi(argv[1]);
    for (const Criterion& c : kCriteria)
      if (c.index == want) return run_one(c);
    std::cerr << "unknown criterion index: " << argv[1] << "\n";
    return 2;
  }
  int failures = 0;
  for (const Criterion& c : kCriteria) failures += run_one(c);
  return failures == 0 ? 0 : 1;
}
