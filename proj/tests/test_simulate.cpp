#include <doctest.h>

#include <sstream>
#include <vector>

#include "mto/channels.hpp"
#include "mto/checks.hpp"
#include "mto/errors.hpp"
#include "mto/simulate.hpp"

using namespace mto;

TEST_CASE("codebooks are reproducible and sized by rate") {
  const Pmf input = Pmf::uniform(2);
  const Codebook a = Codebook::draw(0, 0.9, 10, input, 7, 1 << 16);
  const Codebook b = Codebook::draw(0, 0.9, 10, input, 7, 1 << 16);
  CHECK(a.num_codewords == 512);  // 2^ceil(9)
  CHECK(a.symbols == b.symbols);

  const Codebook c = Codebook::draw(0, 0.9, 10, input, 8, 1 << 16);
  CHECK(c.symbols != a.symbols);

  CHECK_THROWS_AS(Codebook::draw(0, 2.0, 10, input, 7, 16), ConfigError);
}

TEST_CASE("zero rates almost never err at long blocklength") {
  // One codeword per user: the trial errs only when the lone transmission
  // itself lands outside the typical window, which dies out with T.
  const DiscreteChannel ch = toy_xor_channel();
  TrialConfig cfg;
  cfg.rates = {0.0, 0.0, 0.0};
  cfg.trials = 50;
  cfg.seed = 3;
  const TrialRecord rec = run_tin_trial(ch, cfg, 64);
  CHECK(rec.p_hat <= 0.05);
  CHECK(rec.ci_lo <= rec.p_hat);
}

TEST_CASE("well inside capacity the error rate is small at modest length") {
  const DiscreteChannel ch = toy_xor_channel();
  TrialConfig cfg;
  cfg.rates = {0.5, 0.5, 0.5};
  cfg.trials = 200;
  cfg.seed = 11;
  const TrialRecord rec = run_tin_trial(ch, cfg, 14);
  CHECK(rec.p_hat < 0.5);
  CHECK(rec.ci_lo <= rec.p_hat);
  CHECK(rec.ci_hi >= rec.p_hat);
  CHECK(rec.trials == 200);
}

TEST_CASE("overloaded rates collapse") {
  // Receiver 1 sees only the interference letter: its message never gets
  // through, so any positive rate for user 1 fails almost always.
  DiscreteChannel ch = toy_xor_channel();
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t v = 0; v < 2; ++v) ch.f1[a][v] = v;
  ch.y_alphabets[0] = {"y0", "y1"};
  // Injectivity in v still holds (f1 ignores x1 but maps v one-to-one).
  REQUIRE(validate(ch).ok);
  TrialConfig cfg;
  cfg.rates = {1.0, 0.0, 0.0};
  cfg.trials = 100;
  cfg.seed = 5;
  const TrialRecord rec = run_tin_trial(ch, cfg, 12);
  CHECK(rec.p_hat > 0.9);
}

TEST_CASE("trials are deterministic in the seed") {
  const DiscreteChannel ch = toy_xor_channel();
  TrialConfig cfg;
  cfg.rates = {0.8, 0.8, 0.8};
  cfg.trials = 120;
  cfg.seed = 42;
  cfg.blocklengths = {8, 12};
  const auto first = sweep_blocklength(ch, cfg);
  const auto second = sweep_blocklength(ch, cfg);
  REQUIRE(first.size() == 2);
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].errors == second[i].errors);
    CHECK(first[i].p_hat == second[i].p_hat);
  }

  TrialConfig other = cfg;
  other.seed = 43;
  const auto third = sweep_blocklength(ch, other);
  bool any_difference = false;
  for (std::size_t i = 0; i < first.size(); ++i)
    if (first[i].errors != third[i].errors) any_difference = true;
  CHECK(any_difference);
}

TEST_CASE("configuration validation") {
  const DiscreteChannel ch = toy_xor_channel();
  TrialConfig cfg;
  cfg.rates = {0.5, 0.5, 0.5};

  SUBCASE("trial count must be positive") {
    cfg.trials = 0;
    CHECK_THROWS_AS(run_tin_trial(ch, cfg, 8), ConfigError);
  }
  SUBCASE("typicality width must be positive") {
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(run_tin_trial(ch, cfg, 8), ConfigError);
  }
  SUBCASE("rate vector must match the user count") {
    cfg.rates = {0.5};
    CHECK_THROWS_AS(run_tin_trial(ch, cfg, 8), DimensionError);
  }
  SUBCASE("codebook size cap") {
    cfg.rates = {3.0, 0.5, 0.5};
    cfg.max_codewords = 1 << 8;
    CHECK_THROWS_AS(run_tin_trial(ch, cfg, 10), ConfigError);
  }
}

TEST_CASE("csv rendering") {
  TrialRecord rec;
  rec.blocklength = 10;
  rec.rates = {0.9, 0.9, 0.9};
  rec.trials = 100;
  rec.errors = 25;
  rec.p_hat = 0.25;
  rec.ci_lo = 0.17;
  rec.ci_hi = 0.34;
  std::ostringstream os;
  write_trial_csv(os, {rec});
  const std::string text = os.str();
  CHECK(text.find("T,") == 0);
  CHECK(text.find("R_1") != std::string::npos);
  CHECK(text.find("\n10,") != std::string::npos);
  CHECK(text.find("0.25") != std::string::npos);
}

TEST_CASE("wilson interval sanity") {
  const DiscreteChannel ch = toy_xor_channel();
  TrialConfig cfg;
  cfg.rates = {0.9, 0.9, 0.9};
  cfg.trials = 400;
  cfg.seed = 9;
  const TrialRecord rec = run_tin_trial(ch, cfg, 8);
  CHECK(rec.ci_lo >= 0.0);
  CHECK(rec.ci_hi <= 1.0);
  CHECK(rec.ci_lo < rec.ci_hi);
  CHECK(rec.p_hat >= rec.ci_lo);
  CHECK(rec.p_hat <= rec.ci_hi);
}
