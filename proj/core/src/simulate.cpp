#include "mto/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mto/errors.hpp"
#include "mto/parallel.hpp"
#include "mto/rng.hpp"

namespace mto {

namespace {

constexpr int kChunks = 64;  // fixed decomposition => thread-count invariant

bool is_uniform_binary(const Pmf& p) {
  return p.size() == 2 && std::abs(p[0] - 0.5) < 1e-12;
}

// Per-receiver single-letter pair law with precomputed count windows.
struct PairLaw {
  std::size_t nx = 0, ny = 0;
  std::vector<int> lo, hi;  // per (x, y) cell

  PairLaw() = default;
  PairLaw(const std::vector<double>& p, std::size_t nx_, std::size_t ny_, int t,
          double eps)
      : nx(nx_), ny(ny_), lo(nx_ * ny_, 0), hi(nx_ * ny_, 0) {
    const double cells = static_cast<double>(nx * ny);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] < 1e-15) continue;  // zero-probability cells must stay unhit
      const double w = eps * p[i] + eps / cells;
      lo[i] = std::max(0, static_cast<int>(std::ceil(t * (p[i] - w) - 1e-9)));
      hi[i] = std::min(t, static_cast<int>(std::floor(t * (p[i] + w) + 1e-9)));
    }
  }

  bool typical(const std::uint8_t* x, const std::uint8_t* y, int t,
               std::vector<int>& counts) const {
    std::fill(counts.begin(), counts.begin() + static_cast<long>(nx * ny), 0);
    for (int s = 0; s < t; ++s) ++counts[x[s] * ny + y[s]];
    for (std::size_t i = 0; i < nx * ny; ++i)
      if (counts[i] < lo[i] || counts[i] > hi[i]) return false;
    return true;
  }
};

struct SimContext {
  const DiscreteChannel* ch = nullptr;
  std::size_t k = 0, nv = 0;
  int t = 0;
  std::vector<double> rates;
  std::vector<Pmf> inputs;
  std::uint64_t seed = 0;
  std::size_t max_codewords = 0;
  std::vector<PairLaw> laws;                   // index 0 = receiver 1
  std::vector<std::vector<double>> direct_cdf; // users 2..K, rows concatenated
  std::vector<double> interference_cdf;        // per interferer tuple
  std::vector<std::size_t> istrides;
};

std::size_t sample_cdf(const double* row, std::size_t n, double u) {
  for (std::size_t j = 0; j + 1 < n; ++j)
    if (u <= row[j]) return j;
  return n - 1;
}

SimContext build_context(const DiscreteChannel& ch, const TrialConfig& cfg, int t) {
  auto rep = validate(ch);
  if (!rep.ok) throw DimensionError("invalid channel: " + rep.problems.front());
  if (cfg.rates.size() != ch.k)
    throw DimensionError("need one rate per user");
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (t < 1) throw ConfigError("blocklength must be >= 1");
  for (const auto& alphabet : ch.x_alphabets)
    if (alphabet.size() > 255)
      throw ConfigError("alphabets above 255 letters are not supported");
  for (const auto& alphabet : ch.y_alphabets)
    if (alphabet.size() > 255)
      throw ConfigError("alphabets above 255 letters are not supported");

  SimContext c;
  c.ch = &ch;
  c.k = ch.k;
  c.nv = ch.v_alphabet.size();
  c.t = t;
  c.rates = cfg.rates;
  c.seed = cfg.seed;
  c.max_codewords = cfg.max_codewords;
  if (cfg.inputs.empty()) {
    for (std::size_t u = 0; u < ch.k; ++u)
      c.inputs.push_back(Pmf::uniform(ch.x_alphabets[u].size()));
  } else {
    if (cfg.inputs.size() != ch.k)
      throw DimensionError("need one input law per user");
    for (std::size_t u = 0; u < ch.k; ++u)
      if (cfg.inputs[u].size() != ch.x_alphabets[u].size())
        throw DimensionError("input law size mismatch for user " +
                             std::to_string(u + 1));
    c.inputs = cfg.inputs;
  }

  // Receiver-1 pair law under the product inputs.
  std::vector<Pmf> interferers(c.inputs.begin() + 1, c.inputs.end());
  const Pmf qv = effective_interference(ch, interferers);
  const std::size_t nx1 = ch.x_alphabets[0].size();
  const std::size_t ny1 = ch.y_alphabets[0].size();
  std::vector<double> law1(nx1 * ny1, 0.0);
  for (std::size_t x = 0; x < nx1; ++x)
    for (std::size_t v = 0; v < c.nv; ++v)
      law1[x * ny1 + ch.f1[x][v]] += c.inputs[0][x] * qv[v];
  c.laws.emplace_back(law1, nx1, ny1, t, cfg.epsilon);

  for (std::size_t u = 1; u < ch.k; ++u) {
    const Eigen::MatrixXd& ker = ch.direct_kernels[u - 1];
    const std::size_t nx = static_cast<std::size_t>(ker.rows());
    const std::size_t ny = static_cast<std::size_t>(ker.cols());
    std::vector<double> law(nx * ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y)
        law[x * ny + y] = c.inputs[u][x] * ker(static_cast<Eigen::Index>(x),
                                               static_cast<Eigen::Index>(y));
    c.laws.emplace_back(law, nx, ny, t, cfg.epsilon);

    std::vector<double> cdf(nx * ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      double acc = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        acc += ker(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
        cdf[x * ny + y] = acc;
      }
    }
    c.direct_cdf.push_back(std::move(cdf));
  }

  const auto ishape = ch.interferer_shape();
  c.istrides = mixed_radix_strides(ishape);
  const std::size_t n_tuples =
      static_cast<std::size_t>(ch.interference_kernel.rows());
  c.interference_cdf.assign(n_tuples * c.nv, 0.0);
  for (std::size_t r = 0; r < n_tuples; ++r) {
    double acc = 0.0;
    for (std::size_t v = 0; v < c.nv; ++v) {
      acc += ch.interference_kernel(static_cast<Eigen::Index>(r),
                                    static_cast<Eigen::Index>(v));
      c.interference_cdf[r * c.nv + v] = acc;
    }
  }
  return c;
}

struct TrialScratch {
  std::vector<Codebook> books;
  std::vector<std::size_t> messages;
  std::vector<std::vector<std::uint8_t>> x;  // transmitted symbols per user
  std::vector<std::vector<std::uint8_t>> y;  // received symbols per receiver
  std::vector<int> counts;
};

// Decode one receiver: exactly one typical candidate and it is the true one.
bool decode_ok(const PairLaw& law, const Codebook& book, std::size_t truth,
               const std::vector<std::uint8_t>& y, int t,
               std::vector<int>& counts) {
  std::size_t hits = 0, found = 0;
  for (std::size_t m = 0; m < book.num_codewords; ++m) {
    if (law.typical(book.codeword(m), y.data(), t, counts)) {
      if (++hits > 1) return false;  // ambiguity counts as an error
      found = m;
    }
  }
  return hits == 1 && found == truth;
}

bool run_single_trial(const SimContext& c, std::uint64_t trial_seed,
                      TrialScratch& s) {
  SplitMix64 gen(trial_seed);
  for (std::size_t u = 0; u < c.k; ++u) {
    s.books[u] = Codebook::draw(u + 1, c.rates[u], c.t, c.inputs[u],
                                derive_seed(trial_seed, u + 1), c.max_codewords);
    s.messages[u] = gen.below(s.books[u].num_codewords);
    const std::uint8_t* cw = s.books[u].codeword(s.messages[u]);
    std::copy(cw, cw + c.t, s.x[u].begin());
  }
  const std::size_t m1 = c.k - 1;
  for (int step = 0; step < c.t; ++step) {
    std::size_t tuple = 0;
    for (std::size_t j = 0; j < m1; ++j)
      tuple += static_cast<std::size_t>(s.x[j + 1][static_cast<std::size_t>(step)]) *
               c.istrides[j];
    const std::size_t v = sample_cdf(
        c.interference_cdf.data() + tuple * c.nv, c.nv, gen.uniform());
    s.y[0][static_cast<std::size_t>(step)] = static_cast<std::uint8_t>(
        c.ch->f1[s.x[0][static_cast<std::size_t>(step)]][v]);
    for (std::size_t u = 1; u < c.k; ++u) {
      const std::size_t ny = c.laws[u].ny;
      const std::size_t x = s.x[u][static_cast<std::size_t>(step)];
      s.y[u][static_cast<std::size_t>(step)] = static_cast<std::uint8_t>(
          sample_cdf(c.direct_cdf[u - 1].data() + x * ny, ny, gen.uniform()));
    }
  }
  for (std::size_t u = 0; u < c.k; ++u)
    if (!decode_ok(c.laws[u], s.books[u], s.messages[u], s.y[u], c.t, s.counts))
      return false;
  return true;
}

}  // namespace

Codebook Codebook::draw(std::size_t user, double rate, int blocklength,
                        const Pmf& input, std::uint64_t seed,
                        std::size_t max_codewords) {
  if (rate < 0.0) throw ConfigError("rates must be nonnegative");
  if (blocklength < 1) throw ConfigError("blocklength must be >= 1");
  Codebook book;
  book.user = user;
  book.rate = rate;
  book.blocklength = blocklength;
  book.seed = seed;
  const double exact = rate * static_cast<double>(blocklength);
  const int exponent = std::max(0, static_cast<int>(std::ceil(exact - 1e-9)));
  if (exponent >= 62)
    throw ConfigError("codebook of 2^" + std::to_string(exponent) +
                      " codewords exceeds any sane cap");
  book.num_codewords = std::size_t{1} << exponent;
  if (book.num_codewords > max_codewords)
    throw ConfigError("codebook for user " + std::to_string(user) + " needs " +
                      std::to_string(book.num_codewords) +
                      " codewords, above the cap of " +
                      std::to_string(max_codewords));
  const std::size_t t = static_cast<std::size_t>(blocklength);
  book.symbols.resize(book.num_codewords * t);
  SplitMix64 gen(seed);
  if (is_uniform_binary(input)) {
    const std::size_t words = (t + 63) / 64;
    std::size_t at = 0;
    for (std::size_t m = 0; m < book.num_codewords; ++m) {
      std::uint64_t bits = 0;
      std::size_t left = 0;
      for (std::size_t w = 0, s = 0; w < words; ++w) {
        bits = gen();
        left = std::min<std::size_t>(64, t - s);
        for (std::size_t b = 0; b < left; ++b, ++s)
          book.symbols[at++] = static_cast<std::uint8_t>((bits >> b) & 1U);
      }
    }
  } else {
    std::vector<double> cdf(input.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < input.size(); ++i) {
      acc += input[i];
      cdf[i] = acc;
    }
    for (std::size_t i = 0; i < book.symbols.size(); ++i)
      book.symbols[i] =
          static_cast<std::uint8_t>(sample_cdf(cdf.data(), cdf.size(), gen.uniform()));
  }
  return book;
}

TrialRecord run_tin_trial(const DiscreteChannel& ch, const TrialConfig& cfg,
                          int blocklength) {
  const SimContext c = build_context(ch, cfg, blocklength);

  // Fail fast if any codebook would blow the cap (before spawning workers).
  for (std::size_t u = 0; u < c.k; ++u)
    (void)Codebook::draw(u + 1, c.rates[u], c.t, c.inputs[u], 0, c.max_codewords);

  const long trials = cfg.trials;
  std::vector<long> chunk_errors(kChunks, 0);
  const std::uint64_t point_seed =
      derive_seed(cfg.seed, static_cast<std::uint64_t>(blocklength));
  parallel_chunks(kChunks, [&](std::size_t chunk) {
    const long begin = static_cast<long>(chunk) * trials / kChunks;
    const long end = static_cast<long>(chunk + 1) * trials / kChunks;
    if (begin >= end) return;
    TrialScratch s;
    s.books.resize(c.k);
    s.messages.resize(c.k);
    s.x.assign(c.k, std::vector<std::uint8_t>(static_cast<std::size_t>(c.t)));
    s.y.assign(c.k, std::vector<std::uint8_t>(static_cast<std::size_t>(c.t)));
    std::size_t max_cells = 0;
    for (const auto& law : c.laws) max_cells = std::max(max_cells, law.nx * law.ny);
    s.counts.assign(max_cells, 0);
    long errors = 0;
    for (long trial = begin; trial < end; ++trial) {
      const std::uint64_t trial_seed =
          derive_seed(point_seed, static_cast<std::uint64_t>(trial));
      if (!run_single_trial(c, trial_seed, s)) ++errors;
    }
    chunk_errors[chunk] = errors;
  });

  TrialRecord rec;
  rec.blocklength = blocklength;
  rec.rates = cfg.rates;
  rec.trials = trials;
  for (long e : chunk_errors) rec.errors += e;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(rec.errors) / n;
  rec.p_hat = p;
  const double z = 1.959963984540054;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // Clamp rounding noise so the interval always brackets the estimate.
  rec.ci_lo = std::min(std::max(0.0, center - half), p);
  rec.ci_hi = std::max(std::min(1.0, center + half), p);
  return rec;
}

std::vector<TrialRecord> sweep_blocklength(const DiscreteChannel& ch,
                                           const TrialConfig& cfg) {
  std::vector<TrialRecord> out;
  out.reserve(cfg.blocklengths.size());
  for (int t : cfg.blocklengths) out.push_back(run_tin_trial(ch, cfg, t));
  return out;
}

void write_trial_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  const std::size_t k = records.empty() ? 0 : records.front().rates.size();
  os << "T";
  for (std::size_t u = 1; u <= k; ++u) os << ",R_" << u;
  os << ",trials,errors,p_hat,ci_lo,ci_hi\n";
  os.precision(10);
  for (const auto& r : records) {
    os << r.blocklength;
    for (double rate : r.rates) os << "," << rate;
    os << "," << r.trials << "," << r.errors << "," << r.p_hat << "," << r.ci_lo
       << "," << r.ci_hi << "\n";
  }
}

}  // namespace mto
