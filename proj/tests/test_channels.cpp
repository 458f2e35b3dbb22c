#include <doctest.h>

#include <cmath>
#include <variant>
#include <vector>

#include "mto/channels.hpp"
#include "mto/checks.hpp"
#include "mto/errors.hpp"
#include "mto/infotheory.hpp"

using namespace mto;

TEST_CASE("toy xor channel validates and is deterministic") {
  const DiscreteChannel ch = toy_xor_channel();
  const ValidationReport rep = validate(ch);
  CHECK(rep.ok);
  CHECK(rep.problems.empty());
  CHECK(ch.k == 3);
  CHECK(ch.y_alphabets[0].size() == 4);
  CHECK(is_deterministic(ch));
}

TEST_CASE("validation catches structural problems") {
  DiscreteChannel ch = toy_xor_channel();

  SUBCASE("kernel row not a distribution") {
    ch.direct_kernels[0](0, 0) = 0.7;
    CHECK_FALSE(validate(ch).ok);
  }
  SUBCASE("negative kernel entry") {
    ch.interference_kernel(0, 0) = -0.25;
    CHECK_FALSE(validate(ch).ok);
  }
  SUBCASE("receiver map must stay injective in the interference letter") {
    ch.f1[0][0] = ch.f1[0][1];
    CHECK_FALSE(validate(ch).ok);
  }
  SUBCASE("receiver map index out of range") {
    ch.f1[1][1] = ch.y_alphabets[0].size();
    CHECK_FALSE(validate(ch).ok);
  }
  SUBCASE("interference kernel shaped for the wrong tuple count") {
    ch.interference_kernel = Eigen::MatrixXd::Identity(3, 3);
    CHECK_FALSE(validate(ch).ok);
  }
}

TEST_CASE("collision construction") {
  const std::vector<std::vector<std::string>> x_prime{
      {"a", "b", "c"}, {"0"}, {"0"}};

  SUBCASE("deterministic rule: erase iff any interferer is active") {
    const DiscreteChannel ch = make_collision(x_prime);
    CHECK(ch.k == 3);
    // Every alphabet gains the idle letter.
    CHECK(ch.x_alphabets[0].size() == 4);
    CHECK(ch.x_alphabets[1].size() == 2);
    CHECK(ch.v_alphabet.size() == 2);
    CHECK(ch.y_alphabets[0].size() == 5);  // user-1 letters plus erasure
    CHECK(validate(ch).ok);
    CHECK(is_deterministic(ch));
    // Row for (idle, idle) keeps the symbol; any active interferer erases.
    const Eigen::MatrixXd& kern = ch.interference_kernel;
    int clean_rows = 0;
    for (Eigen::Index r = 0; r < kern.rows(); ++r)
      if (kern(r, 0) == 1.0) ++clean_rows;
    CHECK(clean_rows == 1);
  }

  SUBCASE("constant erasure probability") {
    const std::vector<double> q(4, 0.25);  // 2x2 interferer tuples
    const DiscreteChannel ch = make_collision(x_prime, q);
    CHECK(validate(ch).ok);
    CHECK_FALSE(is_deterministic(ch));
    for (Eigen::Index r = 0; r < ch.interference_kernel.rows(); ++r) {
      CHECK(ch.interference_kernel(r, 1) == doctest::Approx(0.25));
    }
  }

  SUBCASE("rejects malformed inputs") {
    CHECK_THROWS_AS(make_collision({}), DimensionError);
    CHECK_THROWS_AS(make_collision(x_prime, {0.5}), DimensionError);
    CHECK_THROWS_AS(make_collision(x_prime, {0.1, 0.2, 0.3, 1.5}),
                    InvalidDistribution);
  }
}

TEST_CASE("effective interference law") {
  const DiscreteChannel ch = toy_xor_channel();
  const Pmf u2({"0", "1"}, {0.5, 0.5});
  const Pmf u3({"0", "1"}, {0.5, 0.5});
  const Pmf v = effective_interference(ch, {u2, u3});
  CHECK(v.probs()[0] == doctest::Approx(0.5));
  CHECK(v.probs()[1] == doctest::Approx(0.5));

  // Skewed marginals: P(v=1) = p(1-q else) for the parity of independent bits.
  const Pmf s2({"0", "1"}, {0.9, 0.1});
  const Pmf s3({"0", "1"}, {0.7, 0.3});
  const Pmf vs = effective_interference(ch, {s2, s3});
  CHECK(vs.probs()[1] == doctest::Approx(0.9 * 0.3 + 0.1 * 0.7));

  CHECK_THROWS_AS(effective_interference(ch, {u2}), DimensionError);
}

TEST_CASE("joint law entropies at uniform inputs") {
  const DiscreteChannel ch = toy_xor_channel();
  std::vector<Pmf> input;
  for (std::size_t i = 0; i < ch.k; ++i)
    input.push_back(Pmf::uniform(ch.x_alphabets[i].size()));
  const JointPmf law = joint_law(ch, input);

  CHECK(entropy(law.marginal({"Y1"})) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(mutual_information(law, {"X1"}, {"Y1"}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mutual_information(law, {"V"}, {"Y1"}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // Given the parity, one bit of (X2, X3) remains.
  CHECK(conditional_entropy(law, {"Y2", "Y3"}, {"V"}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // Receivers 2 and 3 are noiseless copies.
  CHECK(conditional_entropy(law, {"Y2"}, {"X2"}) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("auxiliary maps") {
  const DiscreteChannel ch = toy_xor_channel();

  const AuxSpec id = AuxSpec::identity(ch);
  REQUIRE(id.maps.size() == 2);
  CHECK(id.maps[0] == std::vector<std::size_t>{0, 1});
  CHECK(validate_aux(ch, id).ok);

  // Collapsing user 2 destroys the parity: V is no longer a function of
  // (U2, U3), so the spec must be rejected.
  AuxSpec collapsed = id;
  collapsed.maps[0] = {0, 0};
  collapsed.u_alphabets[0] = {"u0"};
  CHECK_FALSE(validate_aux(ch, collapsed).ok);

  // Joint law with auxiliaries exposes the U axes.
  std::vector<Pmf> input;
  for (std::size_t i = 0; i < ch.k; ++i)
    input.push_back(Pmf::uniform(ch.x_alphabets[i].size()));
  const JointPmf law = joint_law(ch, input, &id);
  CHECK(law.has_axis("U2"));
  CHECK(law.has_axis("U3"));
  CHECK(conditional_entropy(law, {"U2"}, {"X2"}) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(conditional_entropy(law, {"V"}, {"U2", "U3"}) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("lifting parallel discrete carriers") {
  ParallelChannel par;
  par.carriers.push_back(toy_xor_channel());
  par.carriers.push_back(toy_xor_channel());
  const auto lifted = lift_parallel(par);
  REQUIRE(std::holds_alternative<DiscreteChannel>(lifted));
  const DiscreteChannel& ch = std::get<DiscreteChannel>(lifted);
  CHECK(ch.k == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(ch.x_alphabets[i].size() == 4);  // 2 x 2 product letters
  }
  CHECK(ch.v_alphabet.size() == 4);
  CHECK(ch.y_alphabets[0].size() == 16);
  CHECK(validate(ch).ok);
  CHECK(is_deterministic(ch));
}

TEST_CASE("lifting parallel gaussian carriers") {
  auto scalar_carrier = [](double cross) {
    GaussianChannel g;
    g.k = 2;
    g.tx_antennas = {1, 1};
    g.rx_antennas = {1, 1};
    g.h11 = Eigen::MatrixXcd::Constant(1, 1, 1.0);
    g.direct = {Eigen::MatrixXcd::Constant(1, 1, 1.0)};
    g.cross = {Eigen::MatrixXcd::Constant(1, 1, cross)};
    g.power = {1.0, 1.0};
    g.constellations.assign(2, std::nullopt);
    return g;
  };
  ParallelChannel par;
  par.carriers.push_back(scalar_carrier(0.5));
  par.carriers.push_back(scalar_carrier(0.3));
  par.shared_power = std::vector<double>{2.0, 2.0};

  const auto lifted = lift_parallel(par);
  REQUIRE(std::holds_alternative<GaussianChannel>(lifted));
  const GaussianChannel& g = std::get<GaussianChannel>(lifted);
  CHECK(g.k == 2);
  CHECK(g.h11.rows() == 2);
  CHECK(g.h11.cols() == 2);
  CHECK(g.h11(0, 0) == std::complex<double>(1.0, 0.0));
  CHECK(g.h11(0, 1) == std::complex<double>(0.0, 0.0));
  CHECK(g.cross[0](0, 0) == std::complex<double>(0.5, 0.0));
  CHECK(g.cross[0](1, 1) == std::complex<double>(0.3, 0.0));
  CHECK(g.power[0] == doctest::Approx(2.0));
  CHECK(validate(g).ok);
}

TEST_CASE("gaussian validation") {
  GaussianChannel g;
  g.k = 2;
  g.tx_antennas = {1, 1};
  g.rx_antennas = {1, 1};
  g.h11 = Eigen::MatrixXcd::Constant(1, 1, 1.0);
  g.direct = {Eigen::MatrixXcd::Constant(1, 1, 1.0)};
  g.cross = {Eigen::MatrixXcd::Constant(1, 1, 0.5)};
  g.power = {1.0, 1.0};
  g.constellations.assign(2, std::nullopt);
  CHECK(validate(g).ok);

  SUBCASE("negative power budget") {
    g.power[1] = -0.5;
    CHECK_FALSE(validate(g).ok);
  }
  SUBCASE("mismatched cross-link shape") {
    g.cross[0] = Eigen::MatrixXcd::Constant(2, 1, 0.5);
    CHECK_FALSE(validate(g).ok);
  }
  SUBCASE("constellation on a vector input") {
    g.tx_antennas = {1, 2};
    g.direct = {Eigen::MatrixXcd::Constant(1, 2, 1.0)};
    g.cross = {Eigen::MatrixXcd::Constant(1, 2, 0.5)};
    g.constellations[1] = std::vector<std::complex<double>>{{1.0, 0.0}};
    CHECK_FALSE(validate(g).ok);
  }
}
