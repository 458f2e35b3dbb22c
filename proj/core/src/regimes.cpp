#include "mto/regimes.hpp"

#include <cmath>

#include "mto/errors.hpp"
#include "mto/linprog.hpp"

namespace mto {

namespace {

constexpr double kPsdTol = 1e-9;

double min_eigenvalue(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
  return es.eigenvalues().minCoeff();
}

RegimeReport ratio_report(std::string method, double total) {
  RegimeReport rep;
  rep.method = std::move(method);
  rep.margin = 1.0 - total;
  rep.noisy = rep.margin >= -kPsdTol;
  rep.boundary = std::abs(rep.margin) <= kPsdTol;
  if (rep.boundary) rep.notes.push_back("boundary case: condition met with equality");
  return rep;
}

}  // namespace

RegimeReport degraded_lp(const DiscreteChannel& ch, double tol) {
  ValidationReport val = validate(ch);
  if (!val.ok)
    throw InvalidDistribution("degraded_lp: invalid channel: " + val.problems.front());

  // Product law over (y_2..y_K) given (x_2..x_K).
  auto x_shape = ch.interferer_shape();
  std::vector<std::size_t> y_shape;
  for (std::size_t i = 1; i < ch.k; ++i) y_shape.push_back(ch.y_alphabets[i].size());
  std::size_t nx = 1, ny = 1;
  for (std::size_t s : x_shape) nx *= s;
  for (std::size_t s : y_shape) ny *= s;
  const std::size_t nv = ch.v_alphabet.size();

  Eigen::MatrixXd w(nx, ny);
  for (std::size_t xr = 0; xr < nx; ++xr) {
    auto x = mixed_radix_unflatten(xr, x_shape);
    for (std::size_t yr = 0; yr < ny; ++yr) {
      auto y = mixed_radix_unflatten(yr, y_shape);
      double p = 1.0;
      for (std::size_t j = 0; j < x.size(); ++j)
        p *= ch.direct_kernels[j](Eigen::Index(x[j]), Eigen::Index(y[j]));
      w(Eigen::Index(xr), Eigen::Index(yr)) = p;
    }
  }

  // Variables: q(v|y) laid out v-major (q_{v,y} at v*ny + y), then t.
  const std::size_t nq = nv * ny;
  const Eigen::Index n = Eigen::Index(nq + 1);
  LpProblem lp;
  lp.c = Eigen::VectorXd::Zero(n);
  lp.c[Eigen::Index(nq)] = 1.0;  // minimize t
  lp.a_eq = Eigen::MatrixXd::Zero(Eigen::Index(ny), n);
  lp.b_eq = Eigen::VectorXd::Ones(Eigen::Index(ny));
  for (std::size_t y = 0; y < ny; ++y)
    for (std::size_t v = 0; v < nv; ++v)
      lp.a_eq(Eigen::Index(y), Eigen::Index(v * ny + y)) = 1.0;
  lp.a_ub = Eigen::MatrixXd::Zero(Eigen::Index(2 * nv * nx), n);
  lp.b_ub = Eigen::VectorXd::Zero(Eigen::Index(2 * nv * nx));
  Eigen::Index row = 0;
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t x = 0; x < nx; ++x) {
      double target = ch.interference_kernel(Eigen::Index(x), Eigen::Index(v));
      //  sum_y w(x,y) q(v|y) - target <= t   and   >= -t
      for (std::size_t y = 0; y < ny; ++y) {
        double a = w(Eigen::Index(x), Eigen::Index(y));
        lp.a_ub(row, Eigen::Index(v * ny + y)) = a;
        lp.a_ub(row + 1, Eigen::Index(v * ny + y)) = -a;
      }
      lp.a_ub(row, Eigen::Index(nq)) = -1.0;
      lp.a_ub(row + 1, Eigen::Index(nq)) = -1.0;
      lp.b_ub[row] = target;
      lp.b_ub[row + 1] = -target;
      row += 2;
    }
  }

  LpResult sol = solve_lp(lp);
  if (!sol.optimal())
    throw DomainError("degraded_lp: LP solver failed (status " +
                      std::to_string(int(sol.status)) + ")");

  RegimeReport rep;
  rep.method = "degraded_lp";
  rep.residual = sol.value;
  rep.margin = tol - sol.value;
  rep.noisy = sol.value <= tol;
  if (rep.noisy) {
    Eigen::MatrixXd q(static_cast<Eigen::Index>(ny), static_cast<Eigen::Index>(nv));
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t v = 0; v < nv; ++v)
        q(Eigen::Index(y), Eigen::Index(v)) =
            std::max(0.0, sol.x[Eigen::Index(v * ny + y)]);
    rep.degrading_map = std::move(q);
  }
  return rep;
}

RegimeReport check_eq1_siso(const std::vector<std::complex<double>>& h_1j,
                            const std::vector<std::complex<double>>& h_jj) {
  if (h_1j.size() != h_jj.size())
    throw DimensionError("eq1: cross/direct gain count mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < h_1j.size(); ++j) {
    double d = std::norm(h_jj[j]);
    if (d <= 0.0) throw DomainError("eq1: zero direct gain for interferer " +
                                    std::to_string(j + 2));
    total += std::norm(h_1j[j]) / d;
  }
  return ratio_report("eq1_siso", total);
}

RegimeReport check_simo(const std::vector<Eigen::VectorXcd>& h_1i,
                        const std::vector<Eigen::VectorXcd>& h_ii) {
  if (h_1i.size() != h_ii.size())
    throw DimensionError("simo: cross/direct vector count mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < h_1i.size(); ++j) {
    double d = h_ii[j].squaredNorm();
    if (d <= 0.0) throw DomainError("simo: zero direct vector for interferer " +
                                    std::to_string(j + 2));
    total += h_1i[j].squaredNorm() / d;
  }
  RegimeReport rep = ratio_report("simo_norm_ratio", total);
  rep.notes.push_back("sufficient trace bound; exact test is the PSD check");
  return rep;
}

RegimeReport check_mimo_diag(const std::vector<Eigen::VectorXcd>& h_1i_diag,
                             const std::vector<Eigen::VectorXcd>& h_ii_diag) {
  if (h_1i_diag.size() != h_ii_diag.size())
    throw DimensionError("mimo_diag: cross/direct list count mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < h_1i_diag.size(); ++j) {
    if (h_1i_diag[j].size() != h_ii_diag[j].size())
      throw DimensionError("mimo_diag: diagonal length mismatch for interferer " +
                           std::to_string(j + 2));
    for (Eigen::Index k = 0; k < h_ii_diag[j].size(); ++k) {
      double d = std::norm(h_ii_diag[j][k]);
      if (d <= 0.0)
        throw DomainError("mimo_diag: zero diagonal entry for interferer " +
                          std::to_string(j + 2));
      total += std::norm(h_1i_diag[j][k]) / d;
    }
  }
  return ratio_report("mimo_diag_ratio", total);
}

RegimeReport check_fading(const std::vector<double>& sigma_1i,
                          const std::vector<double>& sigma_ii) {
  if (sigma_1i.size() != sigma_ii.size())
    throw DimensionError("fading: sigma list size mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < sigma_1i.size(); ++j) {
    if (!(sigma_ii[j] > 0.0))
      throw DomainError("fading: nonpositive direct deviation for interferer " +
                        std::to_string(j + 2));
    if (!(sigma_1i[j] >= 0.0))
      throw DomainError("fading: negative cross deviation");
    total += sigma_1i[j] / sigma_ii[j];
  }
  RegimeReport rep = ratio_report("fading_sigma_ratio", total);
  rep.notes.push_back(
      "condition uses standard-deviation (not variance) ratios over interferers 2..K, as stated");
  return rep;
}

RegimeReport check_corollary1(const GaussianChannel& ch,
                              const std::vector<Eigen::MatrixXcd>& lambda) {
  ValidationReport val = validate(ch);
  if (!val.ok)
    throw InvalidDistribution("corollary1: invalid channel: " + val.problems.front());
  const bool explicit_lambda = !lambda.empty();
  if (explicit_lambda && lambda.size() != ch.k - 1)
    throw DimensionError("corollary1: need one lambda per interferer");

  RegimeReport rep;
  rep.method = "corollary1_psd";
  const Eigen::Index n1 = ch.rx_antennas[0];
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(n1, n1);
  double min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < ch.k; ++i) {
    const Eigen::MatrixXcd& cross = ch.cross[i - 1];
    const Eigen::MatrixXcd& direct = ch.direct[i - 1];
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(direct);
    Eigen::MatrixXcd d = cross * cod.pseudoInverse();
    double scale = std::max(1.0, cross.cwiseAbs().maxCoeff());
    double res = (cross - d * direct).cwiseAbs().maxCoeff();
    if (res > kPsdTol * scale) {
      rep.noisy = false;
      rep.margin = -res;
      rep.residual = res;
      rep.notes.push_back("cross link of user " + std::to_string(i + 1) +
                          " does not factor through its direct link");
      return rep;
    }
    Eigen::MatrixXcd minimal = d * d.adjoint();
    if (explicit_lambda) {
      const Eigen::MatrixXcd& li = lambda[i - 1];
      if (li.rows() != n1 || li.cols() != n1)
        throw DimensionError("corollary1: lambda size must be N1 x N1");
      double slack = min_eigenvalue(li - minimal);
      min_slack = std::min(min_slack, slack);
      if (slack < -kPsdTol) {
        rep.notes.push_back("lambda for user " + std::to_string(i + 1) +
                            " does not dominate the minimal degrading noise");
      }
      total += li;
    } else {
      total += minimal;
    }
  }
  double budget_slack =
      min_eigenvalue(Eigen::MatrixXcd::Identity(n1, n1) - total);
  rep.margin = explicit_lambda ? std::min(budget_slack, min_slack) : budget_slack;
  rep.noisy = rep.margin >= -kPsdTol;
  rep.boundary = std::abs(budget_slack) <= kPsdTol;
  if (rep.boundary)
    rep.notes.push_back("boundary case: PSD budget met with equality (non-strict test)");
  return rep;
}

double witness_mi_bits(std::complex<double> h_cross, std::complex<double> h_direct,
                       double rho) {
  // U = h_cross X + Z1, W = h_direct X + Z2 with unit-power Gaussian X and
  // unit-variance noises of correlation rho; returns I(X; U | W).
  const double uu = std::norm(h_cross) + 1.0;
  const double ww = std::norm(h_direct) + 1.0;
  const std::complex<double> uw = h_cross * std::conj(h_direct) + rho;
  const double denom = ww * (1.0 - rho * rho);
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log2((uu * ww - std::norm(uw)) / denom);
}

WitnessValue nondegraded_witness(const std::vector<std::complex<double>>& h_1j,
                                 const std::vector<std::complex<double>>& h_jj,
                                 std::vector<double> rho) {
  if (h_1j.size() != h_jj.size())
    throw DimensionError("witness: cross/direct gain count mismatch");
  std::vector<double> ratio(h_1j.size());
  double total = 0.0;
  for (std::size_t j = 0; j < h_1j.size(); ++j) {
    double d = std::abs(h_jj[j]);
    if (d <= 0.0) throw DomainError("witness: zero direct gain");
    ratio[j] = std::abs(h_1j[j]) / d;
    total += ratio[j] * ratio[j];
  }
  if (total <= 1.0)
    throw DomainError("witness: channel satisfies the noisy condition; nothing to certify");
  if (rho.empty()) {
    // Proportional allocation at half the correlation budget: every ratio
    // strictly exceeds its rho (so each interferer certifies) and no rho
    // reaches 1 (which would make the information diverge).
    rho.resize(ratio.size());
    for (std::size_t j = 0; j < ratio.size(); ++j)
      rho[j] = ratio[j] / std::sqrt(2.0 * total);
  }
  if (rho.size() != h_1j.size())
    throw DimensionError("witness: correlation count mismatch");
  double rho_sq = 0.0;
  for (double r : rho) rho_sq += r * r;
  if (rho_sq > 1.0 + 1e-12)
    throw InvalidDistribution("witness: correlation budget sum rho^2 <= 1 violated");

  WitnessValue best;
  bool found = false;
  for (std::size_t j = 0; j < ratio.size(); ++j) {
    if (ratio[j] <= std::abs(rho[j])) continue;  // not a certificate
    double mi = witness_mi_bits(h_1j[j], h_jj[j], rho[j]);
    if (!found || mi > best.mi_bits) {
      best.user = j + 2;
      best.rho = rho[j];
      best.mi_bits = mi;
      found = true;
    }
  }
  if (!found || best.mi_bits <= 1e-9)
    throw DomainError("witness: certificate degenerates (boundary correlation)");
  return best;
}

RegimeReport check_regime(const Channel& ch, double tol) {
  if (const auto* d = std::get_if<DiscreteChannel>(&ch)) return degraded_lp(*d, tol);
  if (const auto* g = std::get_if<GaussianChannel>(&ch)) {
    RegimeReport rep = check_corollary1(*g);
    bool scalar = true;
    for (std::size_t i = 0; i < g->k; ++i)
      scalar = scalar && g->tx_antennas[i] == 1 && g->rx_antennas[i] == 1;
    if (scalar && !rep.noisy) {
      std::vector<std::complex<double>> cross, direct;
      for (std::size_t i = 1; i < g->k; ++i) {
        cross.push_back(g->cross[i - 1](0, 0));
        direct.push_back(g->direct[i - 1](0, 0));
      }
      try {
        WitnessValue w = nondegraded_witness(cross, direct);
        rep.witness_mi = w.mi_bits;
        rep.witness_user = w.user;
      } catch (const DomainError&) {
        // Boundary: no strict certificate; the margin already tells the story.
      }
    }
    return rep;
  }
  if (const auto* f = std::get_if<FadingChannel>(&ch)) {
    ValidationReport val = validate(*f);
    if (!val.ok)
      throw InvalidDistribution("fading: invalid channel: " + val.problems.front());
    return check_fading(f->sigma_cross, f->sigma_direct);
  }
  const auto& par = std::get<ParallelChannel>(ch);
  ValidationReport val = validate(par);
  if (!val.ok)
    throw InvalidDistribution("parallel: invalid channel: " + val.problems.front());
  RegimeReport rep;
  rep.method = "per_carrier";
  rep.noisy = true;
  rep.margin = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < par.carriers.size(); ++f) {
    RegimeReport sub = std::visit(
        [&](const auto& c) { return check_regime(Channel(c), tol); },
        par.carriers[f]);
    rep.margin = std::min(rep.margin, sub.margin);
    if (!sub.noisy) {
      rep.noisy = false;
      rep.notes.push_back("carrier " + std::to_string(f + 1) +
                          " fails its regime check");
    }
    rep.boundary = rep.boundary || sub.boundary;
  }
  return rep;
}

}  // namespace mto
