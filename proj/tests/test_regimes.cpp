#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "mto/channels.hpp"
#include "mto/checks.hpp"
#include "mto/errors.hpp"
#include "mto/regimes.hpp"
#include "mto/rng.hpp"

using namespace mto;

namespace {

using cd = std::complex<double>;

// K=2 channel where receiver 2 sees X2 through `front` and the interference
// variable is the direct output pushed through `back` (so `back` itself is a
// feasible degrading map and the LP must report residual zero).
DiscreteChannel cascade_channel(const Eigen::MatrixXd& front,
                                const Eigen::MatrixXd& back) {
  DiscreteChannel ch;
  ch.k = 2;
  const auto idx_labels = [](std::size_t n, const char* prefix) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i)
      out.push_back(prefix + std::to_string(i));
    return out;
  };
  const std::size_t nx = std::size_t(front.rows());
  const std::size_t ny = std::size_t(front.cols());
  const std::size_t nv = std::size_t(back.cols());
  ch.x_alphabets = {idx_labels(2, "a"), idx_labels(nx, "x")};
  ch.v_alphabet = idx_labels(nv, "v");
  ch.y_alphabets = {idx_labels(2 * nv, "y"), idx_labels(ny, "b")};
  ch.direct_kernels = {front};
  ch.interference_kernel = front * back;
  ch.f1.assign(2, std::vector<std::size_t>(nv));
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t v = 0; v < nv; ++v) ch.f1[a][v] = a * nv + v;
  return ch;
}

Eigen::MatrixXd random_stochastic(SplitMix64& gen, Eigen::Index rows,
                                  Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    double total = 0.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = 0.1 + gen.uniform();
      total += m(r, c);
    }
    m.row(r) /= total;
  }
  return m;
}

}  // namespace

TEST_CASE("degradedness LP accepts cascades and rejects reversals") {
  SplitMix64 gen(3);
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd front = random_stochastic(gen, 3, 3);
    const Eigen::MatrixXd back = random_stochastic(gen, 3, 3);
    const DiscreteChannel ch = cascade_channel(front, back);
    REQUIRE(validate(ch).ok);
    const RegimeReport rep = degraded_lp(ch);
    CHECK(rep.noisy);
    CHECK(rep.residual <= 1e-9);
    REQUIRE(rep.degrading_map.has_value());
    // The certificate must reproduce p(v|x) exactly: rows of the map are
    // distributions and direct * map == interference.
    const Eigen::MatrixXd& q = *rep.degrading_map;
    const Eigen::MatrixXd reproduced = ch.direct_kernels[0] * q;
    CHECK((reproduced - ch.interference_kernel).cwiseAbs().maxCoeff() <= 1e-7);
  }

  // Reversed roles: V is the clean variable, Y2 the degraded one. No
  // stochastic map recovers the clean letter from the mixed one.
  Eigen::MatrixXd mixing(2, 2);
  mixing << 0.7, 0.3, 0.4, 0.6;
  DiscreteChannel reversed =
      cascade_channel(mixing, Eigen::MatrixXd::Identity(2, 2));
  reversed.interference_kernel = Eigen::MatrixXd::Identity(2, 2);
  REQUIRE(validate(reversed).ok);
  const RegimeReport rep = degraded_lp(reversed);
  CHECK_FALSE(rep.noisy);
  CHECK(rep.residual > 1e-6);
}

TEST_CASE("degradedness LP residual shrinks under post-composition") {
  // Making V itself noisier (composing the interference kernel with a
  // stochastic map) can only help feasibility.
  Eigen::MatrixXd mixing(2, 2);
  mixing << 0.8, 0.2, 0.25, 0.75;
  DiscreteChannel hard =
      cascade_channel(mixing, Eigen::MatrixXd::Identity(2, 2));
  hard.interference_kernel = Eigen::MatrixXd::Identity(2, 2);
  const double hard_residual = degraded_lp(hard).residual;
  CHECK(hard_residual > 1e-6);

  DiscreteChannel easier = hard;
  easier.interference_kernel = easier.interference_kernel * mixing;
  const double easier_residual = degraded_lp(easier).residual;
  CHECK(easier_residual <= hard_residual + 1e-12);
  CHECK(degraded_lp(easier).noisy);
}

TEST_CASE("scalar ratio condition") {
  const std::vector<cd> direct{cd(1.0, 0.0), cd(1.0, 0.0)};

  SUBCASE("inside") {
    const RegimeReport rep =
        check_eq1_siso({cd(0.6, 0.0), cd(0.5, 0.0)}, direct);
    CHECK(rep.noisy);
    CHECK(rep.margin == doctest::Approx(1.0 - 0.36 - 0.25).epsilon(1e-12));
    CHECK_FALSE(rep.boundary);
  }
  SUBCASE("outside") {
    const RegimeReport rep =
        check_eq1_siso({cd(0.9, 0.0), cd(0.8, 0.0)}, direct);
    CHECK_FALSE(rep.noisy);
    CHECK(rep.margin < 0.0);
  }
  SUBCASE("boundary and phases") {
    // |0.6+0.0i|^2 + |0.0+0.8i|^2 = 1 exactly; phases are immaterial.
    const RegimeReport rep =
        check_eq1_siso({cd(0.6, 0.0), cd(0.0, 0.8)}, direct);
    CHECK(rep.noisy);
    CHECK(rep.boundary);
    CHECK(rep.margin == doctest::Approx(0.0));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(check_eq1_siso({cd(0.5, 0.0)}, direct), DimensionError);
  }
}

TEST_CASE("vector receiver ratio condition") {
  Eigen::VectorXcd cross(2), own(2);
  cross << cd(0.3, 0.0), cd(0.4, 0.0);
  own << cd(1.0, 0.0), cd(0.0, 0.0);
  // ||cross||^2 / ||own||^2 = 0.25.
  const RegimeReport rep = check_simo({cross}, {own});
  CHECK(rep.noisy);
  CHECK(rep.margin == doctest::Approx(0.75).epsilon(1e-12));

  // Diagonalized per-antenna version sums entrywise ratios.
  Eigen::VectorXcd d1(2), d2(2);
  d1 << cd(0.5, 0.0), cd(0.5, 0.0);
  d2 << cd(1.0, 0.0), cd(1.0, 0.0);
  const RegimeReport diag = check_mimo_diag({d1}, {d2});
  CHECK(diag.noisy);
  CHECK(diag.margin == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fading statistics condition") {
  const RegimeReport ok = check_fading({0.3, 0.4}, {1.0, 1.0});
  CHECK(ok.noisy);
  CHECK(ok.margin == doctest::Approx(0.3).epsilon(1e-12));

  // Ratio sum 1.5 fails even though the squared ratios would sum to 1.25/4.
  const RegimeReport bad = check_fading({0.9, 0.6}, {1.0, 1.0});
  CHECK_FALSE(bad.noisy);
  CHECK(bad.margin == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("vector channel factorization test") {
  GaussianChannel g;
  g.k = 2;
  g.tx_antennas = {1, 2};
  g.rx_antennas = {2, 2};
  g.h11 = Eigen::MatrixXcd::Identity(2, 1);
  Eigen::MatrixXcd own(2, 2);
  own << cd(1.0, 0.0), cd(0.0, 0.0), cd(0.0, 0.0), cd(1.0, 0.0);
  g.direct = {own};
  g.cross = {0.5 * own};
  g.power = {1.0, 1.0};
  g.constellations.assign(2, std::nullopt);

  SUBCASE("minimal multipliers accepted") {
    const RegimeReport rep = check_corollary1(g);
    CHECK(rep.noisy);
    // D = 0.5 I, D D* = 0.25 I; slack of I - 0.25 I is 0.75.
    CHECK(rep.margin == doctest::Approx(0.75).epsilon(1e-9));
  }
  SUBCASE("explicit multiplier below the factor is rejected") {
    const std::vector<Eigen::MatrixXcd> lam{
        Eigen::MatrixXcd::Identity(2, 2) * 0.1};
    const RegimeReport rep = check_corollary1(g, lam);
    CHECK_FALSE(rep.noisy);
  }
  SUBCASE("cross link outside the direct row space is rejected") {
    GaussianChannel h = g;
    h.direct = {Eigen::MatrixXcd::Zero(2, 2)};
    h.direct[0](0, 0) = 1.0;  // rank one
    const RegimeReport rep = check_corollary1(h);
    CHECK_FALSE(rep.noisy);
  }
  SUBCASE("budget exceeded") {
    GaussianChannel h = g;
    h.cross = {1.5 * own};  // D D* = 2.25 I > I
    const RegimeReport rep = check_corollary1(h);
    CHECK_FALSE(rep.noisy);
    CHECK(rep.margin < 0.0);
  }
}

TEST_CASE("scalar test and factorization test agree on random instances") {
  SplitMix64 gen(2024);
  for (int t = 0; t < 40; ++t) {
    const std::size_t k = 2 + gen.below(3);
    const ScalarGains gains = random_scalar_gains(gen, k);
    const RegimeReport scalar = check_eq1_siso(gains.cross, gains.direct);

    const GaussianChannel g = scalar_gaussian_channel(gains);
    std::vector<Eigen::MatrixXcd> lambda;
    for (std::size_t j = 0; j + 1 < k; ++j)
      lambda.push_back(Eigen::MatrixXcd::Constant(
          1, 1, std::norm(gains.cross[j]) / std::norm(gains.direct[j])));
    const RegimeReport psd = check_corollary1(g, lambda);
    CHECK(scalar.noisy == psd.noisy);
  }
}

TEST_CASE("non-degradedness witness closed form") {
  // h_c = 1.2, h_d = 1, rho = 0:
  // I = log2(((|h_c|^2+1)(|h_d|^2+1) - |h_c conj(h_d)|^2) / (|h_d|^2+1)).
  const double mi = witness_mi_bits(cd(1.2, 0.0), cd(1.0, 0.0), 0.0);
  const double expect = std::log2((2.44 * 2.0 - 1.44) / 2.0);
  CHECK(mi == doctest::Approx(expect).epsilon(1e-12));
  CHECK(mi == doctest::Approx(std::log2(1.72)).epsilon(1e-12));

  const WitnessValue w =
      nondegraded_witness({cd(1.2, 0.0)}, {cd(1.0, 0.0)});
  CHECK(w.user == 2);
  CHECK(w.mi_bits > 1e-6);

  // Inside or exactly on the boundary there is nothing to certify.
  CHECK_THROWS_AS(nondegraded_witness({cd(0.5, 0.0)}, {cd(1.0, 0.0)}),
                  DomainError);
  CHECK_THROWS_AS(nondegraded_witness({cd(1.0, 0.0)}, {cd(1.0, 0.0)}),
                  DomainError);
}

TEST_CASE("witness matches a sampled conditional information") {
  // Monte-Carlo oracle for I(X; h_c X + Z1 | h_d X + Z2) with X ~ CN(0,1)
  // and correlated unit noises. All three variables are jointly Gaussian, so
  // the information equals the log-ratio of conditional variances:
  //   I = log2( Var(U|W) / Var(U|W,X) ) with U = h_c X + Z1, W = h_d X + Z2.
  // We estimate both conditional variances by linear regression on samples.
  const cd h_c(1.1, 0.4);
  const cd h_d(0.9, -0.2);
  const double rho = 0.35;
  const double closed = witness_mi_bits(h_c, h_d, rho);

  std::mt19937_64 eng(12345);
  std::normal_distribution<double> n01(0.0, std::sqrt(0.5));
  const int samples = 200000;
  // Accumulate second moments of (U, W).
  double uu = 0.0, ww = 0.0;
  cd uw(0.0, 0.0);
  for (int s = 0; s < samples; ++s) {
    const cd x(n01(eng), n01(eng));
    const cd z1(n01(eng), n01(eng));
    cd z2 = rho * z1 + std::sqrt(1.0 - rho * rho) * cd(n01(eng), n01(eng));
    const cd u = h_c * x + z1;
    const cd w = h_d * x + z2;
    uu += std::norm(u);
    ww += std::norm(w);
    uw += u * std::conj(w);
  }
  uu /= samples;
  ww /= samples;
  uw /= double(samples);
  // Conditional variance of U given W, and given (W, X) the residual noise
  // variance 1 - rho^2 (the Z1 part not explained by Z2).
  const double var_u_given_w = uu - std::norm(uw) / ww;
  const double sampled = std::log2(var_u_given_w / (1.0 - rho * rho));
  // Second-moment estimates at 2e5 samples keep ~1% relative accuracy.
  CHECK(sampled == doctest::Approx(closed).epsilon(0.04));
}

TEST_CASE("witness positive for every phase when the ratio exceeds rho") {
  for (int t = 0; t < 32; ++t) {
    const double theta = 2.0 * 3.14159265358979312 * t / 32.0;
    const cd h_c = std::polar(0.8, theta);
    const cd h_d(1.0, 0.0);
    const double mi = witness_mi_bits(h_c, h_d, 0.5);
    CHECK(mi > 0.0);
  }
}

TEST_CASE("family dispatcher") {
  SUBCASE("scalar gaussian violated attaches a witness") {
    ScalarGains gains;
    gains.cross = {cd(1.2, 0.0)};
    gains.direct = {cd(1.0, 0.0)};
    const Channel ch = scalar_gaussian_channel(gains);
    const RegimeReport rep = check_regime(ch);
    CHECK_FALSE(rep.noisy);
    REQUIRE(rep.witness_mi.has_value());
    // The dispatcher picks the half-budget correlation: for one interferer
    // that is always rho = 1/sqrt(2), whatever the ratio.
    const double expected =
        witness_mi_bits(cd(1.2, 0.0), cd(1.0, 0.0), 1.0 / std::sqrt(2.0));
    CHECK(expected > 1e-6);
    CHECK(*rep.witness_mi == doctest::Approx(expected).epsilon(1e-12));
    CHECK(rep.witness_user.has_value());
  }
  SUBCASE("discrete uses the LP") {
    const Channel ch = toy_xor_channel();
    const RegimeReport rep = check_regime(ch);
    CHECK(rep.method.find("lp") != std::string::npos);
  }
  SUBCASE("fading uses the statistics test") {
    FadingChannel f;
    f.k = 3;
    f.sigma_11 = 1.0;
    f.sigma_cross = {0.3, 0.3};
    f.sigma_direct = {1.0, 1.0};
    f.power = {1.0, 1.0, 1.0};
    const RegimeReport rep = check_regime(Channel(f));
    CHECK(rep.noisy);
    CHECK(rep.margin == doctest::Approx(0.4).epsilon(1e-12));
  }
  SUBCASE("parallel reports the weakest carrier") {
    ScalarGains inside, outside;
    inside.cross = {cd(0.5, 0.0)};
    inside.direct = {cd(1.0, 0.0)};
    outside.cross = {cd(1.2, 0.0)};
    outside.direct = {cd(1.0, 0.0)};
    ParallelChannel par;
    par.carriers.push_back(scalar_gaussian_channel(inside));
    par.carriers.push_back(scalar_gaussian_channel(outside));
    const RegimeReport rep = check_regime(Channel(par));
    CHECK_FALSE(rep.noisy);
    CHECK(rep.margin < 0.0);
    bool mentions_carrier = false;
    for (const auto& note : rep.notes)
      if (note.find("carrier") != std::string::npos) mentions_carrier = true;
    CHECK(mentions_carrier);
  }
}
