#include "mto/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mto/errors.hpp"
#include "mto/parallel.hpp"
#include "mto/rng.hpp"

namespace mto {

namespace {

constexpr double kLog2e = 1.4426950408889634074;  // 1/ln 2
constexpr double kPi = 3.14159265358979323846;

void check_disjoint(const std::vector<std::string>& a,
                    const std::vector<std::string>& b) {
  for (const auto& x : a)
    for (const auto& y : b)
      if (x == y) throw AxisError("axis sets must be disjoint: '" + x + "'");
}

std::vector<std::string> concat(std::vector<std::string> a,
                                const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void check_stochastic(const Eigen::MatrixXd& k, const char* what) {
  for (Eigen::Index r = 0; r < k.rows(); ++r) {
    double mass = 0.0;
    for (Eigen::Index c = 0; c < k.cols(); ++c) {
      if (!(k(r, c) >= 0.0))
        throw InvalidDistribution(std::string(what) + ": negative kernel entry");
      mass += k(r, c);
    }
    if (std::abs(mass - 1.0) > 1e-12)
      throw InvalidDistribution(std::string(what) + ": kernel row mass not 1");
  }
}

}  // namespace

double entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 1e-15) h -= p * std::log2(p);
  }
  return h;
}

double entropy(const JointPmf& joint) { return entropy(joint.probs()); }

double conditional_entropy(const JointPmf& joint,
                           const std::vector<std::string>& targets,
                           const std::vector<std::string>& given) {
  check_disjoint(targets, given);
  double h_joint = entropy(joint.marginal(concat(targets, given)));
  if (given.empty()) return h_joint;
  return h_joint - entropy(joint.marginal(given));
}

double mutual_information(const JointPmf& joint,
                          const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
  check_disjoint(a, b);
  return entropy(joint.marginal(a)) + entropy(joint.marginal(b)) -
         entropy(joint.marginal(concat(a, b)));
}

double log2_det_hpd(const Eigen::MatrixXcd& m) {
  Eigen::LLT<Eigen::MatrixXcd> llt(m);
  if (llt.info() != Eigen::Success)
    throw DomainError("log2_det: matrix is not positive definite");
  double ld = 0.0;
  const Eigen::MatrixXcd& packed = llt.matrixLLT();  // diagonal of L
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    ld += std::log(std::real(packed(i, i)));
  return 2.0 * ld * kLog2e;
}

double gaussian_tin_rate(
    const std::vector<std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>>& links) {
  if (links.empty()) throw DimensionError("tin rate: no links");
  const Eigen::Index n = links.front().first.rows();
  Eigen::MatrixXcd interf = Eigen::MatrixXcd::Identity(n, n);
  for (std::size_t k = 1; k < links.size(); ++k) {
    const auto& [h, g] = links[k];
    if (h.rows() != n) throw DimensionError("tin rate: receiver dim mismatch");
    interf += h * g * h.adjoint();
  }
  const auto& [hd, gd] = links.front();
  Eigen::MatrixXcd total = interf + hd * gd * hd.adjoint();
  return log2_det_hpd(total) - log2_det_hpd(interf);
}

std::vector<double> gaussian_sum_rate(
    const std::vector<std::vector<Eigen::MatrixXcd>>& h,
    const std::vector<Eigen::MatrixXcd>& gamma) {
  const std::size_t k = h.size();
  if (gamma.size() != k) throw DimensionError("sum rate: gamma count mismatch");
  std::vector<double> rates(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (h[i].size() != k) throw DimensionError("sum rate: ragged channel matrix");
    std::vector<std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>> links;
    if (h[i][i].size() == 0)
      throw DimensionError("sum rate: missing direct link");
    links.emplace_back(h[i][i], gamma[i]);
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i || h[i][j].size() == 0) continue;
      links.emplace_back(h[i][j], gamma[j]);
    }
    rates[i] = gaussian_tin_rate(links);
  }
  return rates;
}

ExtremalCheck extremal_gap_check_parallel(
    const JointPmf& input_law, const std::vector<Eigen::MatrixXd>& p_b_given_a,
    const std::vector<Eigen::MatrixXd>& q_c_given_b) {
  const std::size_t f = input_law.axes().size();
  if (p_b_given_a.size() != f || q_c_given_b.size() != f)
    throw DimensionError("extremal check: kernel count must match axis count");
  std::vector<std::size_t> b_shape(f), c_shape(f);
  for (std::size_t t = 0; t < f; ++t) {
    check_stochastic(p_b_given_a[t], "extremal check p(b|a)");
    check_stochastic(q_c_given_b[t], "extremal check q(c|b)");
    if (static_cast<std::size_t>(p_b_given_a[t].rows()) != input_law.shape()[t])
      throw DimensionError("extremal check: input alphabet mismatch");
    if (q_c_given_b[t].rows() != p_b_given_a[t].cols())
      throw DimensionError("extremal check: intermediate alphabet mismatch");
    b_shape[t] = p_b_given_a[t].cols();
    c_shape[t] = q_c_given_b[t].cols();
  }

  // Push the joint input law through the per-letter kernels.
  auto push = [&](const std::vector<double>& src,
                  const std::vector<std::size_t>& src_shape,
                  const std::vector<std::size_t>& dst_shape,
                  const std::vector<Eigen::MatrixXd>& kernels) {
    std::size_t dst_total = 1;
    for (std::size_t s : dst_shape) dst_total *= s;
    std::vector<double> dst(dst_total, 0.0);
    auto dst_strides = mixed_radix_strides(dst_shape);
    for (std::size_t flat = 0; flat < src.size(); ++flat) {
      if (src[flat] == 0.0) continue;
      auto idx = mixed_radix_unflatten(flat, src_shape);
      // Enumerate destination tuples with the product of kernel rows.
      std::vector<std::size_t> out(dst_shape.size(), 0);
      for (;;) {
        double p = src[flat];
        std::size_t d = 0;
        for (std::size_t t = 0; t < dst_shape.size(); ++t) {
          p *= kernels[t](idx[t], out[t]);
          d += out[t] * dst_strides[t];
        }
        if (p != 0.0) dst[d] += p;
        std::size_t t = dst_shape.size();
        while (t-- > 0) {
          if (++out[t] < dst_shape[t]) break;
          out[t] = 0;
          if (t == 0) goto done;
        }
      }
    done:;
    }
    return dst;
  };

  std::vector<double> pb =
      push(input_law.probs(), input_law.shape(), b_shape, p_b_given_a);
  std::vector<double> pc = push(pb, b_shape, c_shape, q_c_given_b);

  ExtremalCheck out;
  out.multi_letter = entropy(pb) - entropy(pc);
  // Per-letter marginals.
  auto marginal_entropy = [](const std::vector<double>& p,
                             const std::vector<std::size_t>& shape,
                             std::size_t axis) {
    auto strides = mixed_radix_strides(shape);
    std::vector<double> m(shape[axis], 0.0);
    for (std::size_t flat = 0; flat < p.size(); ++flat)
      m[(flat / strides[axis]) % shape[axis]] += p[flat];
    return entropy(m);
  };
  out.single_letter = 0.0;
  for (std::size_t t = 0; t < f; ++t)
    out.single_letter +=
        marginal_entropy(pb, b_shape, t) - marginal_entropy(pc, c_shape, t);
  out.slack = out.single_letter - out.multi_letter;
  return out;
}

ExtremalCheck extremal_gap_check(const JointPmf& input_law,
                                 const Eigen::MatrixXd& p_b_given_a,
                                 const Eigen::MatrixXd& q_c_given_b) {
  const std::size_t t = input_law.axes().size();
  return extremal_gap_check_parallel(
      input_law, std::vector<Eigen::MatrixXd>(t, p_b_given_a),
      std::vector<Eigen::MatrixXd>(t, q_c_given_b));
}

ExtremalOptimum gaussian_extremal_optimum(const Eigen::MatrixXcd& gamma,
                                          const Eigen::MatrixXcd& n1,
                                          const Eigen::MatrixXcd& n2) {
  const Eigen::Index n = gamma.rows();
  if (gamma.cols() != n || n1.rows() != n || n2.rows() != n)
    throw DimensionError("extremal optimum: square matrices of equal size");

  // Parametrize G = R* S R with gamma = R* R and 0 <= S <= I; the box
  // constraint becomes an eigenvalue clamp on S.
  Eigen::LLT<Eigen::MatrixXcd> llt(
      gamma + 1e-12 * Eigen::MatrixXcd::Identity(n, n));
  if (llt.info() != Eigen::Success)
    throw DomainError("extremal optimum: gamma must be PSD");
  Eigen::MatrixXcd r = llt.matrixU();  // gamma ≈ r.adjoint() * r

  auto value_of = [&](const Eigen::MatrixXcd& s) {
    Eigen::MatrixXcd g = r.adjoint() * s * r;
    return log2_det_hpd(g + n1) - log2_det_hpd(g + n2);
  };
  auto clamp01 = [&](const Eigen::MatrixXcd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        0.5 * (s + s.adjoint()));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
    return Eigen::MatrixXcd(es.eigenvectors() * ev.asDiagonal() *
                            es.eigenvectors().adjoint());
  };

  ExtremalOptimum best;
  best.value = -std::numeric_limits<double>::infinity();
  for (int start = 0; start < 3; ++start) {
    Eigen::MatrixXcd s;
    if (start == 0)
      s = Eigen::MatrixXcd::Identity(n, n);
    else if (start == 1)
      s = Eigen::MatrixXcd::Zero(n, n);
    else
      s = 0.5 * Eigen::MatrixXcd::Identity(n, n);
    double val = value_of(s);
    double step = 0.5;
    for (int it = 0; it < 400; ++it) {
      Eigen::MatrixXcd g = r.adjoint() * s * r;
      Eigen::MatrixXcd grad_g = kLog2e * ((g + n1).inverse() - (g + n2).inverse());
      Eigen::MatrixXcd grad_s = r * grad_g * r.adjoint();
      bool improved = false;
      while (step > 1e-12) {
        Eigen::MatrixXcd cand = clamp01(s + step * grad_s);
        double cand_val = value_of(cand);
        if (cand_val > val + 1e-14) {
          s = cand;
          val = cand_val;
          improved = true;
          step *= 1.3;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    if (val > best.value) {
      best.value = val;
      best.maximizer = r.adjoint() * s * r;
    }
  }
  return best;
}

GaussHermite gauss_hermite(int n) {
  if (n < 1) throw ConfigError("gauss-hermite: need at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  GaussHermite gh;
  gh.nodes = es.eigenvalues();
  gh.weights.resize(n);
  const double sqrt_pi = std::sqrt(kPi);
  for (int k = 0; k < n; ++k) {
    double v0 = es.eigenvectors()(0, k);
    gh.weights[k] = sqrt_pi * v0 * v0;
  }
  return gh;
}

namespace {

// Flattened mixture description: atom means and probabilities, grouped by
// desired symbol. Used by both MI estimators.
struct MixtureAtoms {
  std::vector<std::complex<double>> mean;  // per (x, interference combo)
  std::vector<double> prob;                // joint probability of the combo
  std::vector<int> x_of;                   // desired-symbol index per atom
  std::vector<double> px;                  // marginal of the desired symbol
};

MixtureAtoms build_atoms(const std::vector<std::complex<double>>& points,
                         const std::vector<double>& weights,
                         std::complex<double> direct_gain,
                         const std::vector<InterferenceTerm>& interference) {
  if (points.empty() || points.size() != weights.size())
    throw InvalidDistribution("constellation: point/weight mismatch");
  double mass = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidDistribution("constellation: negative weight");
    mass += w;
  }
  if (std::abs(mass - 1.0) > 1e-9)
    throw InvalidDistribution("constellation: weights must sum to 1");
  for (const auto& term : interference) {
    if (term.points.empty() || term.points.size() != term.weights.size())
      throw InvalidDistribution("constellation: bad interference term");
  }

  MixtureAtoms atoms;
  atoms.px = weights;
  std::size_t combos = 1;
  for (const auto& term : interference) combos *= term.points.size();
  atoms.mean.reserve(points.size() * combos);
  for (std::size_t xi = 0; xi < points.size(); ++xi) {
    std::vector<std::size_t> idx(interference.size(), 0);
    for (;;) {
      std::complex<double> mu = direct_gain * points[xi];
      double p = 1.0;
      for (std::size_t j = 0; j < interference.size(); ++j) {
        mu += interference[j].gain * interference[j].points[idx[j]];
        p *= interference[j].weights[idx[j]];
      }
      atoms.mean.push_back(mu);
      atoms.prob.push_back(p);
      atoms.x_of.push_back(static_cast<int>(xi));
      std::size_t j = interference.size();
      bool done = interference.empty();
      while (j-- > 0) {
        if (++idx[j] < interference[j].points.size()) break;
        idx[j] = 0;
        if (j == 0) done = true;
      }
      if (done) break;
    }
  }
  return atoms;
}

// log2 of the Gaussian mixture density at y: conditional on symbol x when
// x >= 0 (weights are the interference-combo probabilities), marginal over
// all atoms when x < 0. Stable log-sum-exp.
double log2_mixture(const MixtureAtoms& atoms, double noise_var,
                    std::complex<double> y, int x) {
  double best = -std::numeric_limits<double>::infinity();
  thread_local std::vector<double> expo;
  thread_local std::vector<double> coef;
  expo.clear();
  coef.clear();
  for (std::size_t a = 0; a < atoms.mean.size(); ++a) {
    if (x >= 0 && atoms.x_of[a] != x) continue;
    double w = atoms.prob[a] * (x >= 0 ? 1.0 : atoms.px[atoms.x_of[a]]);
    if (w <= 0.0) continue;
    double e = -std::norm(y - atoms.mean[a]) / noise_var;
    expo.push_back(e);
    coef.push_back(w);
    best = std::max(best, e);
  }
  if (expo.empty()) return -std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (std::size_t a = 0; a < expo.size(); ++a)
    s += coef[a] * std::exp(expo[a] - best);
  return (best + std::log(s) - std::log(kPi * noise_var)) * kLog2e;
}

}  // namespace

MiEstimate constellation_mi(const std::vector<std::complex<double>>& points,
                            const std::vector<double>& weights,
                            std::complex<double> direct_gain,
                            const std::vector<InterferenceTerm>& interference,
                            double noise_var, const MiOptions& opt) {
  if (!(noise_var > 0.0)) throw InvalidDistribution("constellation: noise_var must be > 0");
  MixtureAtoms atoms = build_atoms(points, weights, direct_gain, interference);

  MiEstimate est;
  const double sigma = std::sqrt(noise_var);
  if (opt.method == MiMethod::kQuadrature) {
    GaussHermite gh = gauss_hermite(opt.quad_nodes);
    const double inv_pi = 1.0 / kPi;
    double mi = 0.0;
    for (std::size_t a = 0; a < atoms.mean.size(); ++a) {
      int x = atoms.x_of[a];
      double w_atom = atoms.prob[a] * atoms.px[x];
      if (w_atom <= 0.0) continue;
      double acc = 0.0;
      for (int ka = 0; ka < opt.quad_nodes; ++ka) {
        for (int kb = 0; kb < opt.quad_nodes; ++kb) {
          std::complex<double> y =
              atoms.mean[a] +
              sigma * std::complex<double>(gh.nodes[ka], gh.nodes[kb]);
          double val = log2_mixture(atoms, noise_var, y, x) -
                       log2_mixture(atoms, noise_var, y, -1);
          acc += gh.weights[ka] * gh.weights[kb] * val;
        }
      }
      mi += w_atom * acc * inv_pi;
    }
    est.bits = mi;
    est.std_err = 0.0;
    return est;
  }

  // Monte Carlo with a fixed chunk decomposition for thread-invariance.
  const std::size_t chunks = 64;
  const std::int64_t per_chunk = (opt.mc_samples + chunks - 1) / chunks;
  std::vector<double> sum(chunks, 0.0), sumsq(chunks, 0.0);
  std::vector<std::int64_t> count(chunks, 0);
  // Cumulative atom distribution for sampling.
  std::vector<double> cdf(atoms.mean.size());
  double acc = 0.0;
  for (std::size_t a = 0; a < atoms.mean.size(); ++a) {
    acc += atoms.prob[a] * atoms.px[atoms.x_of[a]];
    cdf[a] = acc;
  }
  parallel_chunks(chunks, [&](std::size_t c) {
    SplitMix64 rng(derive_seed(opt.seed, c));
    double s = 0.0, s2 = 0.0;
    for (std::int64_t i = 0; i < per_chunk; ++i) {
      double u = rng.uniform() * acc;
      std::size_t a =
          std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
      if (a >= cdf.size()) a = cdf.size() - 1;
      std::complex<double> z(rng.normal() * sigma / std::sqrt(2.0),
                             rng.normal() * sigma / std::sqrt(2.0));
      std::complex<double> y = atoms.mean[a] + z;
      int x = atoms.x_of[a];
      double val = log2_mixture(atoms, noise_var, y, x) -
                   log2_mixture(atoms, noise_var, y, -1);
      s += val;
      s2 += val * val;
    }
    sum[c] = s;
    sumsq[c] = s2;
    count[c] = per_chunk;
  });
  double s = 0.0, s2 = 0.0;
  std::int64_t n = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    s += sum[c];
    s2 += sumsq[c];
    n += count[c];
  }
  est.bits = s / double(n);
  double var = std::max(0.0, s2 / double(n) - est.bits * est.bits);
  est.std_err = std::sqrt(var / double(n));
  return est;
}

}  // namespace mto
