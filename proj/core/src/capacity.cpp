#include "mto/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "mto/errors.hpp"
#include "mto/infotheory.hpp"
#include "mto/parallel.hpp"
#include "mto/regimes.hpp"
#include "mto/rng.hpp"

namespace mto {

namespace {

constexpr double kLn2 = 0.69314718055994530941723212145818;

using Dists = std::vector<std::vector<double>>;
using Objective = std::function<double(const Dists&)>;

std::string joined(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

void require_valid(const ValidationReport& rep) {
  if (!rep.ok) throw DimensionError("invalid channel: " + joined(rep.problems));
}

// ---- maximization over a product of probability simplices ----------------
//
// The TIN sum rate couples the users through receiver 1, so the objective is
// generally non-concave over the product law. We use multi-start coordinate
// ascent (dense per-user grids plus pairwise mass-transfer refinement) and,
// when the total free dimension is at most 4, an exhaustive product-grid
// scan that certifies the result.

struct AscentOptions {
  int restarts = 8;
  int max_rounds = 80;
  int line_points = 65;
  std::uint64_t seed = 1;
};

struct AscentResult {
  double value = -std::numeric_limits<double>::infinity();
  Dists arg;
  double spread = 0.0;
  bool converged = true;
};

Dists uniform_start(const std::vector<std::size_t>& sizes) {
  Dists d;
  d.reserve(sizes.size());
  for (std::size_t m : sizes)
    d.emplace_back(m, 1.0 / static_cast<double>(m));
  return d;
}

Dists random_start(const std::vector<std::size_t>& sizes, SplitMix64& gen) {
  Dists d;
  d.reserve(sizes.size());
  for (std::size_t m : sizes) {
    std::vector<double> p(m);
    double total = 0.0;
    for (double& v : p) {
      v = -std::log(std::max(gen.uniform(), 1e-300));
      total += v;
    }
    for (double& v : p) v /= total;
    d.push_back(std::move(p));
  }
  return d;
}

// Visits every point of the simplex grid {c/steps : c in N^m, sum c = steps}.
void for_each_simplex_point(std::size_t m, int steps,
                            const std::function<void(const std::vector<double>&)>& fn) {
  if (m == 0) return;
  std::vector<int> c(m, 0);
  std::vector<double> p(m, 0.0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
    if (pos + 1 == m) {
      c[pos] = left;
      for (std::size_t j = 0; j < m; ++j)
        p[j] = static_cast<double>(c[j]) / static_cast<double>(steps);
      fn(p);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      c[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, steps);
}

std::size_t simplex_point_count(std::size_t m, int steps) {
  // C(steps + m - 1, m - 1)
  double count = 1.0;
  for (std::size_t j = 1; j < m; ++j)
    count *= static_cast<double>(steps + j) / static_cast<double>(j);
  return static_cast<std::size_t>(count + 0.5);
}

int coordinate_grid_steps(std::size_t m, int line_points) {
  if (m <= 2) return std::max(2, line_points - 1);
  if (m == 3) return 44;  // ~1e3 points
  if (m == 4) return 16;
  if (m == 5) return 10;
  return 0;  // rely on refinement only
}

// Pattern search: shift probability mass between coordinate pairs while it
// improves, shrinking the shift geometrically.
double refine_user(const Objective& f, Dists& d, std::size_t u, double best) {
  std::vector<double>& p = d[u];
  const std::size_t m = p.size();
  if (m < 2) return best;
  for (double delta = 0.25; delta >= 1e-9; delta *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          if (a == b || p[b] < delta) continue;
          p[a] += delta;
          p[b] -= delta;
          const double v = f(d);
          if (v > best + 1e-13) {
            best = v;
            improved = true;
          } else {
            p[a] -= delta;
            p[b] += delta;
          }
        }
      }
    }
  }
  return best;
}

double update_user(const Objective& f, Dists& d, std::size_t u, double best,
                   int line_points) {
  std::vector<double>& p = d[u];
  const std::size_t m = p.size();
  if (m < 2) return best;
  const int steps = coordinate_grid_steps(m, line_points);
  if (steps > 0) {
    std::vector<double> incumbent = p;
    double grid_val = best;
    for_each_simplex_point(m, steps, [&](const std::vector<double>& cand) {
      p = cand;
      const double v = f(d);
      if (v > grid_val) {
        grid_val = v;
        incumbent = cand;
      }
    });
    p = incumbent;
    best = std::max(best, grid_val);
  }
  return refine_user(f, d, u, best);
}

AscentResult ascend_from(const Objective& f, Dists start, const AscentOptions& opt) {
  AscentResult out;
  out.arg = std::move(start);
  out.value = f(out.arg);
  out.converged = false;
  for (int round = 0; round < opt.max_rounds; ++round) {
    const double before = out.value;
    for (std::size_t u = 0; u < out.arg.size(); ++u)
      out.value = update_user(f, out.arg, u, out.value, opt.line_points);
    if (out.value - before < 1e-11 * std::max(1.0, std::abs(out.value))) {
      out.converged = true;
      break;
    }
  }
  return out;
}

AscentResult maximize_over_simplices(const std::vector<std::size_t>& sizes,
                                     const Objective& f, const AscentOptions& opt,
                                     const std::vector<Dists>& extra_starts = {}) {
  const std::size_t extras = extra_starts.size();
  const std::size_t total = extras + 1 + static_cast<std::size_t>(std::max(0, opt.restarts - 1));
  std::vector<AscentResult> results(total);
  parallel_chunks(total, [&](std::size_t r) {
    Dists start;
    if (r < extras) {
      start = extra_starts[r];
    } else if (r == extras) {
      start = uniform_start(sizes);
    } else {
      SplitMix64 gen(derive_seed(opt.seed, r));
      start = random_start(sizes, gen);
    }
    results[r] = ascend_from(f, std::move(start), opt);
  });
  std::size_t best = 0;
  double lo = results[0].value, hi = results[0].value;
  for (std::size_t r = 1; r < total; ++r) {
    lo = std::min(lo, results[r].value);
    hi = std::max(hi, results[r].value);
    if (results[r].value > results[best].value) best = r;
  }
  AscentResult out = std::move(results[best]);
  out.spread = hi - lo;
  return out;
}

std::size_t free_dimension(const std::vector<std::size_t>& sizes) {
  std::size_t dims = 0;
  for (std::size_t m : sizes) dims += m - 1;
  return dims;
}

// Exhaustive scan over a product of per-user simplex grids. Only attempted
// when the total free dimension is at most 4; per-user resolutions are
// chosen so each user contributes about axis_points^(m_u - 1) points.
struct GridScan {
  bool ran = false;
  double value = -std::numeric_limits<double>::infinity();
  Dists arg;
  int axis_points = 0;
};

GridScan product_grid_scan(const std::vector<std::size_t>& sizes, const Objective& f,
                           int requested_axis_points) {
  GridScan scan;
  const std::size_t dims = free_dimension(sizes);
  if (dims == 0 || dims > 4) return scan;
  const int g = requested_axis_points > 1 ? requested_axis_points
                                          : (dims <= 3 ? 101 : 41);
  scan.axis_points = g;

  std::vector<std::vector<std::vector<double>>> points(sizes.size());
  for (std::size_t u = 0; u < sizes.size(); ++u) {
    const std::size_t m = sizes[u];
    if (m == 1) {
      points[u] = {{1.0}};
      continue;
    }
    double budget = 1.0;
    for (std::size_t j = 1; j < m; ++j) budget *= static_cast<double>(g);
    int steps = g - 1;
    while (simplex_point_count(m, steps + 1) <= static_cast<std::size_t>(budget))
      ++steps;
    points[u].reserve(simplex_point_count(m, steps));
    for_each_simplex_point(m, steps, [&](const std::vector<double>& p) {
      points[u].push_back(p);
    });
  }

  Dists d = uniform_start(sizes);
  std::function<void(std::size_t)> rec = [&](std::size_t u) {
    if (u == sizes.size()) {
      const double v = f(d);
      if (v > scan.value) {
        scan.value = v;
        scan.arg = d;
      }
      return;
    }
    for (const auto& p : points[u]) {
      d[u] = p;
      rec(u + 1);
    }
  };
  rec(0);
  scan.ran = true;
  return scan;
}

// ---- fast evaluators for discrete channels --------------------------------

struct DiscreteEval {
  const DiscreteChannel* ch;
  std::size_t k, nv, nx1, ny1, n_tuples;
  std::vector<std::size_t> ishape;
  // digits[t * (k-1) + u] = letter of interferer u (user u+2) in tuple t.
  std::vector<std::size_t> digits;
  // Entropy of each direct-kernel row, users 2..K.
  std::vector<std::vector<double>> row_entropy;
  // Deterministic structure (only filled when want_deterministic).
  bool deterministic_ready = false;
  std::vector<std::vector<std::size_t>> ymap;  // ymap[u][x] for users 2..K
  std::vector<std::size_t> vmap;               // v index per tuple
  std::vector<std::size_t> ytuple;             // joint y index per tuple
  std::size_t ny_prod = 1;

  // scratch buffers (one evaluator per thread of use; ascent calls are
  // single-threaded per restart, so plain members are fine)
  mutable std::vector<double> qv, py1, py, joint_yv;

  DiscreteEval(const DiscreteChannel& c, bool want_deterministic) : ch(&c) {
    k = c.k;
    nv = c.v_alphabet.size();
    nx1 = c.x_alphabets[0].size();
    ny1 = c.y_alphabets[0].size();
    ishape = c.interferer_shape();
    n_tuples = 1;
    for (std::size_t s : ishape) n_tuples *= s;
    digits.resize(n_tuples * (k - 1));
    for (std::size_t t = 0; t < n_tuples; ++t) {
      auto idx = mixed_radix_unflatten(t, ishape);
      for (std::size_t u = 0; u + 1 < k; ++u) digits[t * (k - 1) + u] = idx[u];
    }
    row_entropy.resize(k - 1);
    for (std::size_t u = 0; u + 1 < k; ++u) {
      const Eigen::MatrixXd& ker = c.direct_kernels[u];
      row_entropy[u].resize(ker.rows());
      for (Eigen::Index r = 0; r < ker.rows(); ++r) {
        double h = 0.0;
        for (Eigen::Index cidx = 0; cidx < ker.cols(); ++cidx) {
          const double p = ker(r, cidx);
          if (p > 1e-15) h -= p * std::log2(p);
        }
        row_entropy[u][r] = h;
      }
    }
    qv.resize(nv);
    py1.resize(ny1);
    std::size_t max_ny = 0;
    for (std::size_t u = 1; u < k; ++u)
      max_ny = std::max(max_ny, c.y_alphabets[u].size());
    py.resize(max_ny);

    if (want_deterministic) {
      if (!is_deterministic(c))
        throw DomainError("channel kernels are not deterministic");
      ymap.resize(k - 1);
      for (std::size_t u = 0; u + 1 < k; ++u) {
        const Eigen::MatrixXd& ker = c.direct_kernels[u];
        ymap[u].resize(ker.rows());
        for (Eigen::Index r = 0; r < ker.rows(); ++r) {
          Eigen::Index best = 0;
          ker.row(r).maxCoeff(&best);
          ymap[u][r] = static_cast<std::size_t>(best);
        }
      }
      vmap.resize(n_tuples);
      ytuple.resize(n_tuples);
      std::vector<std::size_t> yshape;
      for (std::size_t u = 1; u < k; ++u) yshape.push_back(c.y_alphabets[u].size());
      ny_prod = 1;
      for (std::size_t s : yshape) ny_prod *= s;
      auto ystrides = mixed_radix_strides(yshape);
      for (std::size_t t = 0; t < n_tuples; ++t) {
        Eigen::Index best = 0;
        ch->interference_kernel.row(static_cast<Eigen::Index>(t)).maxCoeff(&best);
        vmap[t] = static_cast<std::size_t>(best);
        std::size_t flat = 0;
        for (std::size_t u = 0; u + 1 < k; ++u)
          flat += ymap[u][digits[t * (k - 1) + u]] * ystrides[u];
        ytuple[t] = flat;
      }
      joint_yv.resize(ny_prod * nv);
      deterministic_ready = true;
    }
  }

  // True iff the interference variable is recoverable from (Y_2..Y_K);
  // on failure names a colliding output tuple. Requires deterministic setup.
  bool v_recoverable(std::string* why) const {
    std::vector<long> seen(ny_prod, -1);
    for (std::size_t t = 0; t < n_tuples; ++t) {
      long& slot = seen[ytuple[t]];
      if (slot < 0) {
        slot = static_cast<long>(vmap[t]);
      } else if (slot != static_cast<long>(vmap[t])) {
        if (why) {
          std::ostringstream os;
          os << "interference variable is not recoverable from the outputs: "
                "output tuple #"
             << ytuple[t] << " maps to both v=" << slot << " and v=" << vmap[t];
          *why = os.str();
        }
        return false;
      }
    }
    return true;
  }

  void interference_law(const Dists& d) const {
    std::fill(qv.begin(), qv.end(), 0.0);
    for (std::size_t t = 0; t < n_tuples; ++t) {
      double pr = 1.0;
      for (std::size_t u = 0; u + 1 < k; ++u) pr *= d[u + 1][digits[t * (k - 1) + u]];
      if (pr <= 0.0) continue;
      const auto row = ch->interference_kernel.row(static_cast<Eigen::Index>(t));
      for (std::size_t v = 0; v < nv; ++v) qv[v] += pr * row(static_cast<Eigen::Index>(v));
    }
  }

  static double vec_entropy(const std::vector<double>& p, std::size_t n) {
    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (p[i] > 1e-15) h -= p[i] * std::log2(p[i]);
    return h;
  }

  double receiver1_entropy(const Dists& d) const {
    std::fill(py1.begin(), py1.end(), 0.0);
    for (std::size_t x = 0; x < nx1; ++x) {
      const double px = d[0][x];
      if (px <= 0.0) continue;
      for (std::size_t v = 0; v < nv; ++v) py1[ch->f1[x][v]] += px * qv[v];
    }
    return vec_entropy(py1, ny1);
  }

  double direct_rate(const Dists& d, std::size_t u) const {
    const Eigen::MatrixXd& ker = ch->direct_kernels[u];
    const std::size_t ny = static_cast<std::size_t>(ker.cols());
    std::fill(py.begin(), py.begin() + ny, 0.0);
    double hylx = 0.0;
    for (Eigen::Index x = 0; x < ker.rows(); ++x) {
      const double px = d[u + 1][static_cast<std::size_t>(x)];
      if (px <= 0.0) continue;
      hylx += px * row_entropy[u][static_cast<std::size_t>(x)];
      for (std::size_t y = 0; y < ny; ++y) py[y] += px * ker(x, static_cast<Eigen::Index>(y));
    }
    return vec_entropy(py, ny) - hylx;
  }

  // Receiver-1 rate: H(Y1) - H(V), using that V is recoverable from (Y1,X1)
  // and independent of X1 under a product law.
  double tin_sum(const Dists& d) const {
    interference_law(d);
    double total = receiver1_entropy(d) - vec_entropy(qv, nv);
    for (std::size_t u = 0; u + 1 < k; ++u) total += direct_rate(d, u);
    return total;
  }

  std::vector<double> tin_user(const Dists& d) const {
    interference_law(d);
    std::vector<double> rates(k);
    rates[0] = receiver1_entropy(d) - vec_entropy(qv, nv);
    for (std::size_t u = 0; u + 1 < k; ++u) rates[u + 1] = direct_rate(d, u);
    return rates;
  }

  // H(Y1) + H(Y_2..Y_K | V) for deterministic channels.
  double det_objective(const Dists& d) const {
    interference_law(d);
    const double hy1 = receiver1_entropy(d);
    std::fill(joint_yv.begin(), joint_yv.end(), 0.0);
    for (std::size_t t = 0; t < n_tuples; ++t) {
      double pr = 1.0;
      for (std::size_t u = 0; u + 1 < k; ++u) pr *= d[u + 1][digits[t * (k - 1) + u]];
      if (pr <= 0.0) continue;
      joint_yv[ytuple[t] * nv + vmap[t]] += pr;
    }
    const double h_yv = vec_entropy(joint_yv, ny_prod * nv);
    return hy1 + h_yv - vec_entropy(qv, nv);
  }
};

std::vector<Pmf> to_pmfs(const DiscreteChannel& ch, const Dists& d) {
  std::vector<Pmf> out;
  out.reserve(d.size());
  for (std::size_t u = 0; u < d.size(); ++u) {
    std::vector<double> p = d[u];
    double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= total;
    out.emplace_back(ch.x_alphabets[u], std::move(p));
  }
  return out;
}

std::vector<std::size_t> input_sizes(const DiscreteChannel& ch) {
  std::vector<std::size_t> sizes;
  sizes.reserve(ch.k);
  for (const auto& a : ch.x_alphabets) sizes.push_back(a.size());
  return sizes;
}

void run_discrete_optimizer(const DiscreteChannel& ch, const Objective& f,
                            const CapacityOptions& opts, CapacityResult& out,
                            const std::vector<Dists>& extra_starts,
                            Dists* arg_out) {
  const auto sizes = input_sizes(ch);
  AscentOptions aopt;
  aopt.restarts = opts.restarts;
  aopt.max_rounds = opts.max_rounds;
  aopt.line_points = opts.line_points;
  aopt.seed = opts.seed;
  AscentResult best = maximize_over_simplices(sizes, f, aopt, extra_starts);

  GridScan scan = product_grid_scan(sizes, f, opts.grid);
  if (scan.ran) {
    out.grid_certified = true;
    std::ostringstream os;
    os << "grid certificate: exhaustive scan (" << scan.axis_points
       << " points per axis) best " << scan.value;
    out.notes.push_back(os.str());
    if (scan.value > best.value) {
      AscentResult refined = ascend_from(f, scan.arg, aopt);
      if (refined.value > best.value) {
        best.value = refined.value;
        best.arg = std::move(refined.arg);
        best.converged = refined.converged;
      }
    }
  }

  out.bits = best.value;
  out.restart_spread = best.spread;
  out.converged = best.converged;
  if (arg_out) *arg_out = best.arg;
  out.argmax = to_pmfs(ch, best.arg);
}

// ---- Gaussian projected-gradient optimizer ---------------------------------

using CovSet = std::vector<std::vector<Eigen::MatrixXcd>>;  // [user][carrier]

struct GaussianEval {
  // links[f][i][j]: channel from user j to receiver i on carrier f
  // (size-0 = absent).
  std::vector<std::vector<std::vector<Eigen::MatrixXcd>>> links;
  std::vector<std::vector<Eigen::Index>> tx;  // [f][user]
  std::size_t k = 0, carriers = 0;

  void add_carrier(const GaussianChannel& c) {
    k = c.k;
    std::vector<std::vector<Eigen::MatrixXcd>> h(
        k, std::vector<Eigen::MatrixXcd>(k));
    h[0][0] = c.h11;
    std::vector<Eigen::Index> dims(k);
    dims[0] = c.h11.cols();
    for (std::size_t j = 1; j < k; ++j) {
      h[0][j] = c.cross[j - 1];
      h[j][j] = c.direct[j - 1];
      dims[j] = c.direct[j - 1].cols();
    }
    links.push_back(std::move(h));
    tx.push_back(std::move(dims));
    ++carriers;
  }

  std::vector<Eigen::MatrixXcd> carrier_covs(const CovSet& g, std::size_t f) const {
    std::vector<Eigen::MatrixXcd> covs(k);
    for (std::size_t u = 0; u < k; ++u) covs[u] = g[u][f];
    return covs;
  }

  double total(const CovSet& g) const {
    double s = 0.0;
    for (std::size_t f = 0; f < carriers; ++f) {
      const auto rates = gaussian_sum_rate(links[f], carrier_covs(g, f));
      for (double r : rates) s += r;
    }
    return s;
  }

  std::vector<double> per_carrier(const CovSet& g) const {
    std::vector<double> out(carriers, 0.0);
    for (std::size_t f = 0; f < carriers; ++f) {
      const auto rates = gaussian_sum_rate(links[f], carrier_covs(g, f));
      for (double r : rates) out[f] += r;
    }
    return out;
  }

  std::vector<double> per_user(const CovSet& g) const {
    std::vector<double> out(k, 0.0);
    for (std::size_t f = 0; f < carriers; ++f) {
      const auto rates = gaussian_sum_rate(links[f], carrier_covs(g, f));
      for (std::size_t u = 0; u < k; ++u) out[u] += rates[u];
    }
    return out;
  }

  CovSet gradient(const CovSet& g) const {
    CovSet grad(k, std::vector<Eigen::MatrixXcd>(carriers));
    for (std::size_t f = 0; f < carriers; ++f) {
      const auto& h = links[f];
      const Eigen::Index n1 = h[0][0].rows();
      Eigen::MatrixXcd a1 = Eigen::MatrixXcd::Identity(n1, n1);
      Eigen::MatrixXcd b1 = Eigen::MatrixXcd::Identity(n1, n1);
      for (std::size_t j = 0; j < k; ++j) {
        if (h[0][j].size() == 0) continue;
        const Eigen::MatrixXcd add = h[0][j] * g[j][f] * h[0][j].adjoint();
        a1 += add;
        if (j > 0) b1 += add;
      }
      const Eigen::MatrixXcd a1i = a1.inverse();
      const Eigen::MatrixXcd b1i = b1.inverse();
      grad[0][f] = h[0][0].adjoint() * a1i * h[0][0] / kLn2;
      for (std::size_t j = 1; j < k; ++j) {
        const Eigen::Index nj = h[j][j].rows();
        Eigen::MatrixXcd aj = Eigen::MatrixXcd::Identity(nj, nj) +
                              h[j][j] * g[j][f] * h[j][j].adjoint();
        Eigen::MatrixXcd gj =
            h[j][j].adjoint() * aj.inverse() * h[j][j] / kLn2;
        if (h[0][j].size() != 0)
          gj += h[0][j].adjoint() * (a1i - b1i) * h[0][j] / kLn2;
        grad[j][f] = 0.5 * (gj + gj.adjoint().eval());
      }
      grad[0][f] = 0.5 * (grad[0][f] + grad[0][f].adjoint().eval());
    }
    return grad;
  }
};

// Euclidean projection of one user's carrier blocks onto
// {each block PSD, total trace <= budget}.
void project_user(std::vector<Eigen::MatrixXcd>& blocks, double budget) {
  std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>> eig;
  eig.reserve(blocks.size());
  std::vector<double> lam;
  for (auto& b : blocks) {
    b = 0.5 * (b + b.adjoint().eval());
    eig.emplace_back(b);
    const auto& ev = eig.back().eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) lam.push_back(std::max(ev(i), 0.0));
  }
  double total = std::accumulate(lam.begin(), lam.end(), 0.0);
  double theta = 0.0;
  if (total > budget) {
    std::vector<double> sorted = lam;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double prefix = 0.0;
    for (std::size_t t = 0; t < sorted.size(); ++t) {
      prefix += sorted[t];
      const double cand = (prefix - budget) / static_cast<double>(t + 1);
      const double next = (t + 1 < sorted.size()) ? sorted[t + 1] : -1.0;
      if (cand >= 0.0 && cand >= next) {
        theta = cand;
        break;
      }
    }
  }
  std::size_t at = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& es = eig[b];
    Eigen::VectorXd vals = es.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i)
      vals(i) = std::max(lam[at++] - theta, 0.0);
    blocks[b] = es.eigenvectors() * vals.asDiagonal().toDenseMatrix().cast<std::complex<double>>() *
                es.eigenvectors().adjoint();
    blocks[b] = 0.5 * (blocks[b] + blocks[b].adjoint().eval());
  }
}

void project_all(CovSet& g, const std::vector<double>& budgets) {
  for (std::size_t u = 0; u < g.size(); ++u) project_user(g[u], budgets[u]);
}

struct PsdAscent {
  double value = -std::numeric_limits<double>::infinity();
  CovSet g;
  bool converged = true;
};

PsdAscent psd_ascend(const GaussianEval& eval, const std::vector<double>& budgets,
                     CovSet start, int max_iters) {
  PsdAscent out;
  project_all(start, budgets);
  out.g = std::move(start);
  out.value = eval.total(out.g);
  out.converged = false;
  double step = 1.0;
  int stall = 0;
  for (int iter = 0; iter < max_iters; ++iter) {
    const CovSet grad = eval.gradient(out.g);
    double gnorm = 0.0;
    for (const auto& per_user : grad)
      for (const auto& m : per_user) gnorm += m.squaredNorm();
    gnorm = std::sqrt(gnorm);
    if (gnorm < 1e-14) {
      out.converged = true;
      break;
    }
    if (iter == 0) {
      double budget_scale = 0.0;
      for (double b : budgets) budget_scale = std::max(budget_scale, b);
      step = std::max(budget_scale, 1.0) / gnorm;
    }
    bool improved = false;
    double eta = step;
    for (int bt = 0; bt < 40; ++bt) {
      CovSet cand = out.g;
      for (std::size_t u = 0; u < cand.size(); ++u)
        for (std::size_t f = 0; f < cand[u].size(); ++f)
          cand[u][f] += eta * grad[u][f];
      project_all(cand, budgets);
      const double fc = eval.total(cand);
      if (fc > out.value + 1e-15) {
        const double gain = fc - out.value;
        out.g = std::move(cand);
        out.value = fc;
        improved = true;
        stall = (gain < 1e-12 * std::max(1.0, std::abs(fc))) ? stall + 1 : 0;
        break;
      }
      eta *= 0.5;
    }
    if (!improved) {
      out.converged = true;  // no ascent step improves: projected stationary
      break;
    }
    step = eta * 2.0;
    if (stall >= 5) {
      out.converged = true;
      break;
    }
  }
  return out;
}

struct GaussianRun {
  double value = 0.0;
  CovSet g;
  double spread = 0.0;
  bool converged = true;
};

GaussianRun optimize_gaussian(const GaussianEval& eval,
                              const std::vector<double>& budgets,
                              const CapacityOptions& opts) {
  const std::size_t k = eval.k;
  const std::size_t carriers = eval.carriers;
  const std::size_t total = 2 + static_cast<std::size_t>(std::max(1, opts.restarts - 1));
  std::vector<PsdAscent> results(total);
  parallel_chunks(total, [&](std::size_t r) {
    CovSet start(k, std::vector<Eigen::MatrixXcd>(carriers));
    if (r <= 1) {
      const double scale = (r == 0) ? 1.0 : 0.5;  // full- and half-power white
      for (std::size_t u = 0; u < k; ++u)
        for (std::size_t f = 0; f < carriers; ++f) {
          const Eigen::Index m = eval.tx[f][u];
          const double tr = scale * budgets[u] / static_cast<double>(carriers);
          start[u][f] = (tr / static_cast<double>(m)) *
                        Eigen::MatrixXcd::Identity(m, m);
        }
    } else {
      SplitMix64 gen(derive_seed(opts.seed, r));
      for (std::size_t u = 0; u < k; ++u) {
        double trace_sum = 0.0;
        for (std::size_t f = 0; f < carriers; ++f) {
          const Eigen::Index m = eval.tx[f][u];
          Eigen::MatrixXcd a(m, m);
          for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j)
              a(i, j) = std::complex<double>(gen.normal(), gen.normal());
          start[u][f] = a * a.adjoint();
          trace_sum += start[u][f].trace().real();
        }
        const double scale = budgets[u] / std::max(trace_sum, 1e-12);
        for (std::size_t f = 0; f < carriers; ++f) start[u][f] *= scale;
      }
    }
    results[r] = psd_ascend(eval, budgets, std::move(start), opts.max_iters);
  });
  std::size_t best = 0;
  double lo = results[0].value, hi = results[0].value;
  for (std::size_t r = 1; r < total; ++r) {
    lo = std::min(lo, results[r].value);
    hi = std::max(hi, results[r].value);
    if (results[r].value > results[best].value) best = r;
  }
  GaussianRun run;
  run.value = results[best].value;
  run.g = std::move(results[best].g);
  run.converged = results[best].converged;
  run.spread = hi - lo;
  return run;
}

void apply_regime(const RegimeReport& regime, const CapacityOptions& opts,
                  CapacityResult& out, const std::string& what) {
  out.regime_noisy = regime.noisy;
  out.regime_margin = regime.margin;
  if (regime.noisy) return;
  if (!opts.lower_bound_ok) {
    std::ostringstream os;
    os << what << " (method " << regime.method << ", margin " << regime.margin
       << "); enable the lower-bound option to get the achievable rate anyway";
    throw DomainError(os.str());
  }
  out.lower_bound_only = true;
  out.notes.push_back(
      "outside the noisy-interference regime: value is an achievable rate, "
      "not certified sum-capacity");
}

}  // namespace

// ---- public evaluators -----------------------------------------------------

double discrete_tin_sum_rate(const DiscreteChannel& ch,
                             const std::vector<Pmf>& input) {
  DiscreteEval eval(ch, false);
  Dists d;
  for (const auto& p : input) d.push_back(p.probs());
  return eval.tin_sum(d);
}

std::vector<double> discrete_tin_user_rates(const DiscreteChannel& ch,
                                            const std::vector<Pmf>& input) {
  DiscreteEval eval(ch, false);
  Dists d;
  for (const auto& p : input) d.push_back(p.probs());
  return eval.tin_user(d);
}

double deterministic_sum_objective(const DiscreteChannel& ch,
                                   const std::vector<Pmf>& input) {
  DiscreteEval eval(ch, true);
  Dists d;
  for (const auto& p : input) d.push_back(p.probs());
  return eval.det_objective(d);
}

double gaussian_channel_sum_rate(const GaussianChannel& ch,
                                 const std::vector<Eigen::MatrixXcd>& gamma) {
  GaussianEval eval;
  eval.add_carrier(ch);
  CovSet g(ch.k, std::vector<Eigen::MatrixXcd>(1));
  for (std::size_t u = 0; u < ch.k; ++u) g[u][0] = gamma[u];
  return eval.total(g);
}

std::vector<double> gaussian_channel_user_rates(
    const GaussianChannel& ch, const std::vector<Eigen::MatrixXcd>& gamma) {
  GaussianEval eval;
  eval.add_carrier(ch);
  CovSet g(ch.k, std::vector<Eigen::MatrixXcd>(1));
  for (std::size_t u = 0; u < ch.k; ++u) g[u][0] = gamma[u];
  return eval.per_user(g);
}

namespace {

struct ConstellationEval {
  const GaussianChannel* ch;
  std::size_t k;
  MiOptions mi;

  explicit ConstellationEval(const GaussianChannel& c, int quad_nodes) : ch(&c) {
    k = c.k;
    mi.method = MiMethod::kQuadrature;
    mi.quad_nodes = quad_nodes;
  }

  const std::vector<std::complex<double>>& points(std::size_t u) const {
    return *ch->constellations[u];
  }

  double user_rate(const Dists& w, std::size_t u) const {
    if (u == 0) {
      std::vector<InterferenceTerm> terms;
      terms.reserve(k - 1);
      for (std::size_t j = 1; j < k; ++j)
        terms.push_back({ch->cross[j - 1](0, 0), points(j), w[j]});
      return constellation_mi(points(0), w[0], ch->h11(0, 0), terms, 1.0, mi).bits;
    }
    return constellation_mi(points(u), w[u], ch->direct[u - 1](0, 0), {}, 1.0, mi)
        .bits;
  }

  double sum(const Dists& w) const {
    double s = 0.0;
    for (std::size_t u = 0; u < k; ++u) s += user_rate(w, u);
    return s;
  }
};

void require_scalar_constellations(const GaussianChannel& ch) {
  if (ch.constellations.size() != ch.k)
    throw DimensionError("constellation list must cover every user");
  for (std::size_t u = 0; u < ch.k; ++u) {
    if (ch.tx_antennas[u] != 1 || ch.rx_antennas[u] != 1)
      throw DimensionError(
          "constellation optimization needs scalar (single-antenna) links");
    if (!ch.constellations[u] || ch.constellations[u]->empty())
      throw DimensionError("user " + std::to_string(u + 1) +
                           " has no constellation");
  }
}

}  // namespace

double constellation_sum_rate(const GaussianChannel& ch,
                              const std::vector<std::vector<double>>& weights,
                              int quad_nodes) {
  ConstellationEval eval(ch, quad_nodes);
  return eval.sum(weights);
}

// ---- sum-capacity entry points ---------------------------------------------

CapacityResult sum_capacity_discrete(const DiscreteChannel& ch,
                                     const CapacityOptions& opts) {
  require_valid(validate(ch));
  CapacityResult out;
  apply_regime(degraded_lp(ch), opts, out,
               "discrete channel fails the degradedness LP");
  DiscreteEval eval(ch, false);
  Objective f = [&](const Dists& d) { return eval.tin_sum(d); };
  Dists arg;
  run_discrete_optimizer(ch, f, opts, out, {}, &arg);
  out.per_user_bits = eval.tin_user(arg);
  return out;
}

CapacityResult sum_capacity_deterministic(const DiscreteChannel& ch,
                                          const CapacityOptions& opts) {
  require_valid(validate(ch));
  DiscreteEval eval(ch, true);  // throws DomainError when not deterministic
  std::string why;
  if (!eval.v_recoverable(&why)) throw DomainError(why);
  CapacityResult out;
  // Recoverability of V from the outputs supplies the degrading map, so the
  // channel is in the noisy regime by construction; record the LP margin.
  RegimeReport regime = degraded_lp(ch);
  apply_regime(regime, opts, out, "deterministic channel fails the degradedness LP");
  Objective f = [&](const Dists& d) { return eval.det_objective(d); };
  Dists arg;
  run_discrete_optimizer(ch, f, opts, out, {}, &arg);
  out.per_user_bits = eval.tin_user(arg);
  return out;
}

CapacityResult sum_capacity_gaussian(const GaussianChannel& ch,
                                     const CapacityOptions& opts) {
  require_valid(validate(ch));
  CapacityResult out;
  apply_regime(check_corollary1(ch), opts, out,
               "Gaussian channel fails the degradedness test");
  GaussianEval eval;
  eval.add_carrier(ch);
  GaussianRun run = optimize_gaussian(eval, ch.power, opts);
  out.bits = run.value;
  out.restart_spread = run.spread;
  out.converged = run.converged;
  if (!run.converged)
    out.notes.push_back("optimizer hit the iteration cap; value is best-found");
  out.gamma.resize(ch.k);
  for (std::size_t u = 0; u < ch.k; ++u) out.gamma[u] = run.g[u][0];
  out.per_user_bits = eval.per_user(run.g);
  return out;
}

CapacityResult sum_capacity_parallel(const ParallelChannel& par,
                                     const CapacityOptions& opts) {
  require_valid(validate(par));
  CapacityResult out;
  double min_margin = std::numeric_limits<double>::infinity();
  bool all_gaussian = true;
  for (std::size_t f = 0; f < par.carriers.size(); ++f) {
    RegimeReport regime;
    if (const auto* dc = std::get_if<DiscreteChannel>(&par.carriers[f])) {
      regime = degraded_lp(*dc);
      all_gaussian = false;
    } else {
      regime = check_corollary1(std::get<GaussianChannel>(par.carriers[f]));
    }
    min_margin = std::min(min_margin, regime.margin);
    if (!regime.noisy) {
      std::ostringstream os;
      os << "carrier " << (f + 1) << " fails its regime test";
      apply_regime(regime, opts, out, os.str());
      out.notes.push_back(os.str());
    }
  }
  out.regime_noisy = !out.lower_bound_only;
  out.regime_margin = min_margin;

  CapacityOptions sub = opts;
  sub.lower_bound_ok = true;  // per-carrier regimes already enforced above

  if (all_gaussian && par.shared_power) {
    GaussianEval eval;
    for (const auto& carrier : par.carriers)
      eval.add_carrier(std::get<GaussianChannel>(carrier));
    GaussianRun run = optimize_gaussian(eval, *par.shared_power, opts);
    out.bits = run.value;
    out.restart_spread = run.spread;
    out.converged = run.converged;
    out.per_carrier_bits = eval.per_carrier(run.g);
    out.per_user_bits = eval.per_user(run.g);
    out.carriers.resize(eval.carriers);
    for (std::size_t f = 0; f < eval.carriers; ++f) {
      out.carriers[f].bits = out.per_carrier_bits[f];
      out.carriers[f].gamma.resize(eval.k);
      for (std::size_t u = 0; u < eval.k; ++u)
        out.carriers[f].gamma[u] = run.g[u][f];
    }
    out.notes.push_back("joint power allocation across carriers");
    return out;
  }

  out.bits = 0.0;
  for (std::size_t f = 0; f < par.carriers.size(); ++f) {
    sub.seed = derive_seed(opts.seed, f);
    CapacityResult piece;
    if (const auto* dc = std::get_if<DiscreteChannel>(&par.carriers[f]))
      piece = sum_capacity_discrete(*dc, sub);
    else
      piece = sum_capacity_gaussian(std::get<GaussianChannel>(par.carriers[f]), sub);
    out.bits += piece.bits;
    out.per_carrier_bits.push_back(piece.bits);
    out.restart_spread = std::max(out.restart_spread, piece.restart_spread);
    out.converged = out.converged && piece.converged;
    out.grid_certified = (f == 0 ? piece.grid_certified
                                 : out.grid_certified && piece.grid_certified);
    out.carriers.push_back(std::move(piece));
  }
  if (out.per_user_bits.empty() && !out.carriers.empty()) {
    out.per_user_bits.assign(out.carriers[0].per_user_bits.size(), 0.0);
    for (const auto& piece : out.carriers)
      for (std::size_t u = 0; u < piece.per_user_bits.size(); ++u)
        out.per_user_bits[u] += piece.per_user_bits[u];
  }
  return out;
}

CapacityResult sum_capacity_constellation(const GaussianChannel& ch,
                                          const CapacityOptions& opts) {
  require_valid(validate(ch));
  require_scalar_constellations(ch);
  CapacityResult out;
  apply_regime(check_corollary1(ch), opts, out,
               "Gaussian channel fails the degradedness test");

  ConstellationEval eval(ch, opts.quad_nodes);
  std::vector<std::size_t> sizes;
  for (std::size_t u = 0; u < ch.k; ++u) sizes.push_back(eval.points(u).size());
  Objective f = [&](const Dists& w) { return eval.sum(w); };

  AscentOptions aopt;
  aopt.restarts = opts.restarts;
  aopt.max_rounds = opts.max_rounds;
  aopt.line_points = opts.line_points;
  aopt.seed = opts.seed;
  AscentResult best = maximize_over_simplices(sizes, f, aopt);

  GridScan scan = product_grid_scan(sizes, f, opts.grid > 1 ? opts.grid : 41);
  if (scan.ran) {
    out.grid_certified = true;
    if (scan.value > best.value) {
      AscentResult refined = ascend_from(f, scan.arg, aopt);
      if (refined.value > best.value) {
        best.value = refined.value;
        best.arg = std::move(refined.arg);
        best.converged = refined.converged;
      }
    }
  }

  out.bits = best.value;
  out.restart_spread = best.spread;
  out.converged = best.converged;
  out.weights = best.arg;
  out.per_user_bits.resize(ch.k);
  for (std::size_t u = 0; u < ch.k; ++u)
    out.per_user_bits[u] = eval.user_rate(best.arg, u);
  double dev = 0.0;
  for (std::size_t u = 0; u < ch.k; ++u) {
    const double uni = 1.0 / static_cast<double>(sizes[u]);
    for (double w : best.arg[u]) dev = std::max(dev, std::abs(w - uni));
  }
  out.max_weight_deviation = dev;
  std::ostringstream os;
  os << "best-found weights deviate from uniform by at most " << dev;
  out.notes.push_back(os.str());
  return out;
}

double two_letter_consistency(const DiscreteChannel& ch, double c1,
                              const CapacityOptions& opts) {
  require_valid(validate(ch));
  ParallelChannel two;
  two.carriers = {ch, ch};
  auto lifted_var = lift_parallel(two);
  const DiscreteChannel& lifted = std::get<DiscreteChannel>(lifted_var);
  DiscreteEval eval(lifted, false);
  Objective f = [&](const Dists& d) { return eval.tin_sum(d); };

  // Start one ascent from the product extension of the single-letter
  // optimum, which already achieves 2*c1.
  CapacityOptions single_opts = opts;
  single_opts.lower_bound_ok = true;
  CapacityResult single = sum_capacity_discrete(ch, single_opts);
  Dists iid;
  for (std::size_t u = 0; u < ch.k; ++u) {
    const auto& p = single.argmax[u].probs();
    std::vector<double> q(p.size() * p.size());
    for (std::size_t a = 0; a < p.size(); ++a)
      for (std::size_t b = 0; b < p.size(); ++b) q[a * p.size() + b] = p[a] * p[b];
    iid.push_back(std::move(q));
  }

  AscentOptions aopt;
  aopt.restarts = opts.restarts;
  aopt.max_rounds = opts.max_rounds;
  aopt.line_points = opts.line_points;
  aopt.seed = opts.seed;
  AscentResult best = maximize_over_simplices(input_sizes(lifted), f, aopt, {iid});
  return 0.5 * best.value - c1;
}

}  // namespace mto
