#include <doctest.h>

#include <cmath>
#include <vector>

#include "mto/linprog.hpp"
#include "mto/rng.hpp"

using namespace mto;

namespace {

Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> data) {
  Eigen::MatrixXd m(Eigen::Index(data.size()), Eigen::Index(data.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : data) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

Eigen::VectorXd vec(std::initializer_list<double> data) {
  Eigen::VectorXd v(Eigen::Index(data.size()));
  Eigen::Index i = 0;
  for (double x : data) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("two variable maximization") {
  // max 3x + 2y subject to x+y <= 4, x <= 2, y <= 3 (free variables).
  const LpResult sol = maximize_lp(vec({3.0, 2.0}),
                                   rows({{1, 1}, {1, 0}, {0, 1}}),
                                   vec({4.0, 2.0, 3.0}));
  REQUIRE(sol.optimal());
  CHECK(sol.value == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(sol.x[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(sol.x[1] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("unbounded and infeasible detection") {
  const LpResult unb = maximize_lp(vec({1.0, 0.0}), rows({{0, 1}}), vec({1.0}));
  CHECK(unb.status == LpResult::Status::kUnbounded);

  // x <= -1 and -x <= -2 cannot both hold.
  const LpResult inf = maximize_lp(vec({1.0}), rows({{1}, {-1}}), vec({-1.0, -2.0}));
  CHECK(inf.status == LpResult::Status::kInfeasible);
}

TEST_CASE("equality constraints with sign restriction") {
  // min 2x + y subject to x + y = 1, x,y >= 0 -> (0,1) with value 1.
  LpProblem lp;  // default sign restriction: all variables nonnegative
  lp.c = vec({2.0, 1.0});
  lp.a_eq = rows({{1, 1}});
  lp.b_eq = vec({1.0});
  const LpResult sol = solve_lp(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.x[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(sol.x[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("duplicate rows are harmless") {
  const LpResult sol = maximize_lp(vec({1.0, 1.0}),
                                   rows({{1, 0}, {1, 0}, {0, 1}, {0, 1}}),
                                   vec({1.0, 1.0, 2.0, 2.0}));
  REQUIRE(sol.optimal());
  CHECK(sol.value == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("random bounded problems match vertex enumeration") {
  SplitMix64 gen(20240817);
  for (int trial = 0; trial < 40; ++trial) {
    // Box [0, 10]^2 plus three random cuts that keep the origin feasible.
    std::vector<Eigen::Vector2d> normals;
    std::vector<double> bounds;
    auto add = [&](double ax, double ay, double b) {
      normals.emplace_back(ax, ay);
      bounds.push_back(b);
    };
    add(1, 0, 10);
    add(0, 1, 10);
    add(-1, 0, 0);
    add(0, -1, 0);
    for (int j = 0; j < 3; ++j)
      add(gen.uniform(-1.0, 1.0), gen.uniform(-1.0, 1.0), gen.uniform(0.5, 8.0));
    const Eigen::Vector2d c(gen.uniform(-1.0, 1.0), gen.uniform(-1.0, 1.0));

    Eigen::MatrixXd a(Eigen::Index(normals.size()), 2);
    Eigen::VectorXd b(Eigen::Index(normals.size()));
    for (std::size_t r = 0; r < normals.size(); ++r) {
      a.row(Eigen::Index(r)) = normals[r].transpose();
      b[Eigen::Index(r)] = bounds[r];
    }

    // Oracle: evaluate the objective at every feasible pairwise intersection.
    double best = -1e300;
    for (std::size_t i = 0; i < normals.size(); ++i) {
      for (std::size_t j = i + 1; j < normals.size(); ++j) {
        Eigen::Matrix2d m;
        m.row(0) = normals[i].transpose();
        m.row(1) = normals[j].transpose();
        if (std::abs(m.determinant()) < 1e-9) continue;
        const Eigen::Vector2d x = m.inverse() * Eigen::Vector2d(bounds[i], bounds[j]);
        bool ok = true;
        for (std::size_t r = 0; r < normals.size(); ++r)
          ok = ok && normals[r].dot(x) <= bounds[r] + 1e-9;
        if (ok) best = std::max(best, c.dot(x));
      }
    }
    REQUIRE(best > -1e299);  // origin keeps the region nonempty

    const LpResult sol = maximize_lp(c, a, b);
    REQUIRE(sol.optimal());
    CHECK(sol.value == doctest::Approx(best).epsilon(1e-7));
  }
}
