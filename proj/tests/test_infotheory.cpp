#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "mto/errors.hpp"
#include "mto/infotheory.hpp"
#include "mto/rng.hpp"

using namespace mto;

namespace {

double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

JointPmf bsc_joint(double px, double flip) {
  // (X, Y) for X ~ Bern(px applied to "1") through a symmetric flip channel.
  const double p0 = 1.0 - px, p1 = px;
  return JointPmf({"X", "Y"}, {2, 2},
                  {p0 * (1 - flip), p0 * flip, p1 * flip, p1 * (1 - flip)});
}

}  // namespace

TEST_CASE("entropy spot values") {
  CHECK(entropy(std::vector<double>{0.5, 0.5}) == doctest::Approx(1.0));
  CHECK(entropy(std::vector<double>{0.26, 0.74}) ==
        doctest::Approx(h2(0.26)).epsilon(1e-12));
  CHECK(entropy(std::vector<double>{1.0, 0.0}) == doctest::Approx(0.0));
  CHECK(entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}) ==
        doctest::Approx(2.0));
}

TEST_CASE("symmetric binary channel information") {
  const JointPmf joint = bsc_joint(0.5, 0.1);
  const double mi = mutual_information(joint, {"X"}, {"Y"});
  CHECK(mi == doctest::Approx(1.0 - h2(0.1)).epsilon(1e-12));
  CHECK(mi == doctest::Approx(0.531004406410719).epsilon(1e-12));
  CHECK(mutual_information(joint, {"Y"}, {"X"}) == doctest::Approx(mi));
}

TEST_CASE("chain rule on a random joint") {
  SplitMix64 gen(7);
  std::vector<double> probs(12);
  double total = 0.0;
  for (auto& p : probs) {
    p = gen.uniform();
    total += p;
  }
  for (auto& p : probs) p /= total;
  const JointPmf joint({"A", "B"}, {3, 4}, probs);
  const double lhs = entropy(joint);
  const double rhs = entropy(joint.marginal({"A"})) +
                     conditional_entropy(joint, {"B"}, {"A"});
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  CHECK(mutual_information(joint, {"A"}, {"B"}) >= -1e-12);
  CHECK_THROWS_AS(conditional_entropy(joint, {"A"}, {"A"}), AxisError);
}

TEST_CASE("log det of Hermitian positive definite matrices") {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  CHECK(log2_det_hpd(d) == doctest::Approx(3.0).epsilon(1e-12));

  Eigen::MatrixXcd m(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = 3.0;
  m(0, 1) = std::complex<double>(0.5, 0.25);
  m(1, 0) = std::conj(m(0, 1));
  // det = 6 - |0.5 + 0.25i|^2 = 6 - 0.3125.
  CHECK(log2_det_hpd(m) == doctest::Approx(std::log2(6.0 - 0.3125)).epsilon(1e-12));
}

TEST_CASE("interference-as-noise rate, scalar forms") {
  using M = Eigen::MatrixXcd;
  const M one = M::Constant(1, 1, 1.0);
  auto scalar = [](double v) { return M::Constant(1, 1, v); };

  // No interference: log2(1 + P).
  CHECK(gaussian_tin_rate({{one, scalar(3.0)}}) ==
        doctest::Approx(2.0).epsilon(1e-12));

  // One interferer with |h|^2 = 0.36 at unit power.
  const double expect = std::log2(2.36 / 1.36);
  CHECK(gaussian_tin_rate({{one, scalar(1.0)}, {scalar(0.6), scalar(1.0)}}) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("network rates for a two user scalar example") {
  using M = Eigen::MatrixXcd;
  auto scalar = [](std::complex<double> v) { return M::Constant(1, 1, v); };
  // Receiver 1 hears both users; receiver 2 only its own.
  std::vector<std::vector<M>> h(2, std::vector<M>(2));
  h[0][0] = scalar(1.0);
  h[0][1] = scalar(0.6);
  h[1][1] = scalar(1.0);
  h[1][0] = M();  // absent link
  const std::vector<M> gamma{scalar(1.0), scalar(1.0)};
  const auto rates = gaussian_sum_rate(h, gamma);
  REQUIRE(rates.size() == 2);
  CHECK(rates[0] == doctest::Approx(std::log2(2.36 / 1.36)).epsilon(1e-12));
  CHECK(rates[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rates[0] + rates[1] == doctest::Approx(1.795).epsilon(1e-3));
}

TEST_CASE("entropy difference inequality oracles") {
  SplitMix64 gen(11);
  auto stochastic = [&](std::size_t n) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      double total = 0.0;
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        m(r, c) = 0.05 + gen.uniform();
        total += m(r, c);
      }
      m.row(r) /= total;
    }
    return m;
  };
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd p = stochastic(2), q = stochastic(2);
    std::vector<double> probs(4);
    double total = 0.0;
    for (auto& v : probs) {
      v = gen.uniform();
      total += v;
    }
    for (auto& v : probs) v /= total;
    const JointPmf law({"A1", "A2"}, {2, 2}, probs);
    const ExtremalCheck chk = extremal_gap_check(law, p, q);
    CHECK(chk.slack >= -1e-9);
    CHECK(chk.single_letter - chk.multi_letter == doctest::Approx(chk.slack));

    // Independent identical letters make both sides equal.
    const double u = gen.uniform(0.1, 0.9);
    const Pmf m({"0", "1"}, {u, 1 - u});
    const ExtremalCheck eq = extremal_gap_check(
        JointPmf::product({"A1", "A2"}, {m, m}), p, q);
    CHECK(std::abs(eq.slack) <= 1e-10);
  }
}

TEST_CASE("covariance interval maximization, scalar") {
  using M = Eigen::MatrixXcd;
  const M gamma = M::Constant(1, 1, 1.0);
  const M n1 = M::Constant(1, 1, 1.0);
  const M n2 = M::Constant(1, 1, 2.0);
  // log2((g+1)/(g+2)) increases in g; the best g is the full interval end.
  const ExtremalOptimum opt = gaussian_extremal_optimum(gamma, n1, n2);
  CHECK(opt.value == doctest::Approx(std::log2(2.0 / 3.0)).epsilon(1e-6));
  CHECK(std::abs(opt.maximizer(0, 0) - 1.0) < 1e-4);

  // Swapped noises: decreasing, so the best g is zero.
  const ExtremalOptimum opt2 = gaussian_extremal_optimum(gamma, n2, n1);
  CHECK(opt2.value == doctest::Approx(std::log2(2.0 / 1.0)).epsilon(1e-6));
}

TEST_CASE("hermite rule integrates gaussian moments") {
  const GaussHermite gh = gauss_hermite(24);
  double mass = 0.0, second = 0.0;
  for (Eigen::Index i = 0; i < gh.nodes.size(); ++i) {
    mass += gh.weights[i];
    second += gh.weights[i] * gh.nodes[i] * gh.nodes[i];
  }
  const double root_pi = std::sqrt(std::numbers::pi);
  CHECK(mass == doctest::Approx(root_pi).epsilon(1e-12));
  CHECK(second == doctest::Approx(root_pi / 2.0).epsilon(1e-10));
}

TEST_CASE("constellation information, binary antipodal") {
  const std::vector<std::complex<double>> bpsk{{1.0, 0.0}, {-1.0, 0.0}};
  const std::vector<double> w{0.5, 0.5};

  // Zero gain carries nothing.
  MiOptions opt;
  const MiEstimate zero = constellation_mi(bpsk, w, 0.0, {}, 1.0, opt);
  CHECK(std::abs(zero.bits) < 1e-9);

  // Strong direct link approaches 1 bit.
  const MiEstimate strong = constellation_mi(bpsk, w, 8.0, {}, 1.0, opt);
  CHECK(strong.bits > 0.999);
  CHECK(strong.bits <= 1.0 + 1e-9);

  // Quadrature and sampling agree.
  const MiEstimate quad = constellation_mi(bpsk, w, 1.3, {}, 1.0, opt);
  MiOptions mc;
  mc.method = MiMethod::kMonteCarlo;
  mc.mc_samples = 400000;
  mc.seed = 5;
  const MiEstimate samp = constellation_mi(bpsk, w, 1.3, {}, 1.0, mc);
  CHECK(std::abs(quad.bits - samp.bits) <= 3.0 * samp.std_err + 1e-4);

  // Interference lowers the rate.
  InterferenceTerm interf;
  interf.gain = 0.8;
  interf.points = bpsk;
  interf.weights = w;
  const MiEstimate with_i = constellation_mi(bpsk, w, 1.3, {interf}, 1.0, opt);
  CHECK(with_i.bits < quad.bits);
  CHECK(with_i.bits > 0.0);
}
