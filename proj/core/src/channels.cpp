#include "mto/channels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mto/errors.hpp"

namespace mto {

namespace {

constexpr double kTol = 1e-12;

bool labels_distinct(const std::vector<std::string>& labels) {
  std::set<std::string> seen(labels.begin(), labels.end());
  return seen.size() == labels.size();
}

void check_kernel_rows(ValidationReport& rep, const Eigen::MatrixXd& k,
                       const std::string& what) {
  for (Eigen::Index r = 0; r < k.rows(); ++r) {
    double mass = 0.0;
    bool neg = false;
    for (Eigen::Index c = 0; c < k.cols(); ++c) {
      if (k(r, c) < -kTol) neg = true;
      mass += k(r, c);
    }
    if (neg) rep.fail(what + ": negative entry in row " + std::to_string(r));
    if (std::abs(mass - 1.0) > kTol)
      rep.fail(what + ": row " + std::to_string(r) + " mass " +
               std::to_string(mass) + " not 1");
  }
}

std::size_t product_size(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t s : shape) n *= s;
  return n;
}

}  // namespace

ValidationReport validate(const DiscreteChannel& ch) {
  ValidationReport rep;
  if (ch.k < 2) {
    rep.fail("discrete: need at least 2 users");
    return rep;
  }
  if (ch.x_alphabets.size() != ch.k || ch.y_alphabets.size() != ch.k) {
    rep.fail("discrete: alphabet list size must equal user count");
    return rep;
  }
  for (std::size_t i = 0; i < ch.k; ++i) {
    if (ch.x_alphabets[i].empty()) rep.fail("discrete: empty input alphabet for user " + std::to_string(i + 1));
    if (ch.y_alphabets[i].empty()) rep.fail("discrete: empty output alphabet for user " + std::to_string(i + 1));
    if (!labels_distinct(ch.x_alphabets[i]))
      rep.fail("discrete: duplicate input labels for user " + std::to_string(i + 1));
    if (!labels_distinct(ch.y_alphabets[i]))
      rep.fail("discrete: duplicate output labels for user " + std::to_string(i + 1));
  }
  if (ch.v_alphabet.empty() || !labels_distinct(ch.v_alphabet))
    rep.fail("discrete: interference alphabet empty or has duplicates");
  if (!rep.ok) return rep;

  if (ch.direct_kernels.size() != ch.k - 1) {
    rep.fail("discrete: need one direct kernel per user 2..K");
    return rep;
  }
  for (std::size_t i = 1; i < ch.k; ++i) {
    const auto& kern = ch.direct_kernels[i - 1];
    if (kern.rows() != Eigen::Index(ch.x_alphabets[i].size()) ||
        kern.cols() != Eigen::Index(ch.y_alphabets[i].size())) {
      rep.fail("discrete: direct kernel shape mismatch for user " + std::to_string(i + 1));
      continue;
    }
    check_kernel_rows(rep, kern, "discrete: direct kernel user " + std::to_string(i + 1));
  }
  std::size_t rows = product_size(ch.interferer_shape());
  if (ch.interference_kernel.rows() != Eigen::Index(rows) ||
      ch.interference_kernel.cols() != Eigen::Index(ch.v_alphabet.size())) {
    rep.fail("discrete: interference kernel shape mismatch");
    return rep;
  }
  check_kernel_rows(rep, ch.interference_kernel, "discrete: interference kernel");

  if (ch.f1.size() != ch.x_alphabets[0].size()) {
    rep.fail("discrete: f1 must have one row per x1 letter");
    return rep;
  }
  for (std::size_t x1 = 0; x1 < ch.f1.size(); ++x1) {
    if (ch.f1[x1].size() != ch.v_alphabet.size()) {
      rep.fail("discrete: f1 row " + std::to_string(x1) + " must have one entry per v");
      continue;
    }
    std::set<std::size_t> seen;
    for (std::size_t v = 0; v < ch.f1[x1].size(); ++v) {
      std::size_t y = ch.f1[x1][v];
      if (y >= ch.y_alphabets[0].size()) {
        rep.fail("discrete: f1 value out of range at x1=" + std::to_string(x1));
        continue;
      }
      if (!seen.insert(y).second)
        rep.fail("discrete: v not recoverable from (y1, x1) at x1=" + std::to_string(x1));
    }
  }
  return rep;
}

ValidationReport validate(const GaussianChannel& ch) {
  ValidationReport rep;
  if (ch.k < 2) {
    rep.fail("gaussian: need at least 2 users");
    return rep;
  }
  if (ch.tx_antennas.size() != ch.k || ch.rx_antennas.size() != ch.k ||
      ch.power.size() != ch.k) {
    rep.fail("gaussian: antenna/power list size must equal user count");
    return rep;
  }
  for (std::size_t i = 0; i < ch.k; ++i) {
    if (ch.tx_antennas[i] < 1 || ch.rx_antennas[i] < 1)
      rep.fail("gaussian: antenna counts must be >= 1 (user " + std::to_string(i + 1) + ")");
    if (!(ch.power[i] >= 0.0))
      rep.fail("gaussian: negative power budget (user " + std::to_string(i + 1) + ")");
  }
  if (!rep.ok) return rep;
  if (ch.h11.rows() != ch.rx_antennas[0] || ch.h11.cols() != ch.tx_antennas[0])
    rep.fail("gaussian: h11 must be N1 x M1");
  if (ch.direct.size() != ch.k - 1 || ch.cross.size() != ch.k - 1) {
    rep.fail("gaussian: need direct and cross matrices for users 2..K");
    return rep;
  }
  for (std::size_t i = 1; i < ch.k; ++i) {
    if (ch.direct[i - 1].rows() != ch.rx_antennas[i] ||
        ch.direct[i - 1].cols() != ch.tx_antennas[i])
      rep.fail("gaussian: direct matrix shape mismatch for user " + std::to_string(i + 1));
    if (ch.cross[i - 1].rows() != ch.rx_antennas[0] ||
        ch.cross[i - 1].cols() != ch.tx_antennas[i])
      rep.fail("gaussian: cross matrix shape mismatch for user " + std::to_string(i + 1));
  }
  if (!ch.constellations.empty()) {
    if (ch.constellations.size() != ch.k) {
      rep.fail("gaussian: constellation list size must equal user count");
      return rep;
    }
    for (std::size_t i = 0; i < ch.k; ++i) {
      if (!ch.constellations[i]) continue;
      if (ch.tx_antennas[i] != 1)
        rep.fail("gaussian: constellations require a single transmit antenna (user " +
                 std::to_string(i + 1) + ")");
      if (ch.constellations[i]->empty())
        rep.fail("gaussian: empty constellation (user " + std::to_string(i + 1) + ")");
    }
  }
  return rep;
}

ValidationReport validate(const ParallelChannel& ch) {
  ValidationReport rep;
  if (ch.carriers.empty()) {
    rep.fail("parallel: no carriers");
    return rep;
  }
  std::size_t users = 0;
  for (std::size_t f = 0; f < ch.carriers.size(); ++f) {
    ValidationReport sub = std::visit([](const auto& c) { return validate(c); },
                                      ch.carriers[f]);
    for (auto& p : sub.problems)
      rep.fail("carrier " + std::to_string(f + 1) + ": " + p);
    std::size_t carrier_users =
        std::visit([](const auto& c) { return c.k; }, ch.carriers[f]);
    if (f == 0)
      users = carrier_users;
    else if (carrier_users != users)
      rep.fail("parallel: carrier " + std::to_string(f + 1) + " has a different user count");
  }
  if (ch.shared_power) {
    if (ch.shared_power->size() != users)
      rep.fail("parallel: shared power budget size must equal user count");
    for (std::size_t f = 0; f < ch.carriers.size(); ++f)
      if (!std::holds_alternative<GaussianChannel>(ch.carriers[f]))
        rep.fail("parallel: shared power budgets require Gaussian carriers");
  }
  return rep;
}

ValidationReport validate(const FadingChannel& ch) {
  ValidationReport rep;
  if (ch.k < 2) {
    rep.fail("fading: need at least 2 users");
    return rep;
  }
  if (ch.sigma_cross.size() != ch.k - 1 || ch.sigma_direct.size() != ch.k - 1 ||
      ch.power.size() != ch.k) {
    rep.fail("fading: coefficient/power list sizes must match user count");
    return rep;
  }
  if (!(ch.sigma_11 > 0.0)) rep.fail("fading: sigma_11 must be positive");
  for (std::size_t i = 0; i + 1 < ch.k; ++i) {
    if (!(ch.sigma_direct[i] > 0.0))
      rep.fail("fading: sigma_" + std::to_string(i + 2) + std::to_string(i + 2) +
               " must be positive");
    if (!(ch.sigma_cross[i] >= 0.0))
      rep.fail("fading: negative cross fade deviation");
  }
  for (double p : ch.power)
    if (!(p >= 0.0)) rep.fail("fading: negative power budget");
  return rep;
}

ValidationReport validate(const Channel& ch) {
  return std::visit([](const auto& c) { return validate(c); }, ch);
}

DiscreteChannel make_collision(const std::vector<std::vector<std::string>>& x_prime,
                               const std::vector<double>& collision_prob) {
  if (x_prime.size() < 2)
    throw DimensionError("collision: need at least 2 users");
  DiscreteChannel ch;
  ch.k = x_prime.size();
  ch.x_alphabets.resize(ch.k);
  for (std::size_t i = 0; i < ch.k; ++i) {
    ch.x_alphabets[i] = x_prime[i];
    ch.x_alphabets[i].push_back("phi");  // idle letter for every user
  }
  ch.v_alphabet = {"0", "e"};
  // Receiver 1: pass-through or erasure.
  ch.y_alphabets.resize(ch.k);
  ch.y_alphabets[0] = ch.x_alphabets[0];
  ch.y_alphabets[0].push_back("e");
  ch.f1.assign(ch.x_alphabets[0].size(), std::vector<std::size_t>(2));
  for (std::size_t x1 = 0; x1 < ch.x_alphabets[0].size(); ++x1) {
    ch.f1[x1][0] = x1;
    ch.f1[x1][1] = ch.x_alphabets[0].size();  // the erasure letter
  }
  // Receivers 2..K: noiseless.
  for (std::size_t i = 1; i < ch.k; ++i) {
    ch.y_alphabets[i] = ch.x_alphabets[i];
    ch.direct_kernels.push_back(Eigen::MatrixXd::Identity(
        ch.x_alphabets[i].size(), ch.x_alphabets[i].size()));
  }
  auto shape = ch.interferer_shape();
  std::size_t rows = product_size(shape);
  if (!collision_prob.empty() && collision_prob.size() != rows)
    throw DimensionError("collision: need one probability per interferer tuple (" +
                         std::to_string(rows) + ")");
  ch.interference_kernel.resize(rows, 2);
  for (std::size_t r = 0; r < rows; ++r) {
    double q;
    if (collision_prob.empty()) {
      // Deterministic rule: erase iff any interferer is active.
      auto idx = mixed_radix_unflatten(r, shape);
      bool active = false;
      for (std::size_t j = 0; j < idx.size(); ++j)
        if (idx[j] + 1 != ch.x_alphabets[j + 1].size()) active = true;  // not phi
      q = active ? 1.0 : 0.0;
    } else {
      q = collision_prob[r];
      if (!(q >= 0.0 && q <= 1.0))
        throw InvalidDistribution("collision: probability outside [0,1]");
    }
    ch.interference_kernel(r, 0) = 1.0 - q;
    ch.interference_kernel(r, 1) = q;
  }
  return ch;
}

AuxSpec AuxSpec::identity(const DiscreteChannel& ch) {
  AuxSpec aux;
  for (std::size_t i = 1; i < ch.k; ++i) {
    std::vector<std::size_t> map(ch.x_alphabets[i].size());
    for (std::size_t x = 0; x < map.size(); ++x) map[x] = x;
    aux.maps.push_back(std::move(map));
    aux.u_alphabets.push_back(ch.x_alphabets[i]);
  }
  return aux;
}

ValidationReport validate_aux(const DiscreteChannel& ch, const AuxSpec& aux) {
  ValidationReport rep;
  if (aux.maps.size() != ch.k - 1 || aux.u_alphabets.size() != ch.k - 1) {
    rep.fail("aux: need one map per user 2..K");
    return rep;
  }
  for (std::size_t i = 1; i < ch.k; ++i) {
    const auto& map = aux.maps[i - 1];
    if (map.size() != ch.x_alphabets[i].size()) {
      rep.fail("aux: map size mismatch for user " + std::to_string(i + 1));
      return rep;
    }
    for (std::size_t u : map)
      if (u >= aux.u_alphabets[i - 1].size()) {
        rep.fail("aux: map value out of range for user " + std::to_string(i + 1));
        return rep;
      }
  }
  // The interference law must factor through the auxiliaries: identical
  // u-tuples must give identical kernel rows.
  auto shape = ch.interferer_shape();
  std::size_t rows = product_size(shape);
  std::map<std::vector<std::size_t>, Eigen::Index> rep_row;
  for (std::size_t r = 0; r < rows; ++r) {
    auto idx = mixed_radix_unflatten(r, shape);
    std::vector<std::size_t> u(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) u[j] = aux.maps[j][idx[j]];
    auto [it, inserted] = rep_row.try_emplace(u, Eigen::Index(r));
    if (!inserted) {
      double diff = (ch.interference_kernel.row(Eigen::Index(r)) -
                     ch.interference_kernel.row(it->second))
                        .cwiseAbs()
                        .maxCoeff();
      if (diff > kTol)
        rep.fail("aux: interference law does not factor through u (rows " +
                 std::to_string(it->second) + ", " + std::to_string(r) + ")");
    }
  }
  return rep;
}

Pmf effective_interference(const DiscreteChannel& ch,
                           const std::vector<Pmf>& interferer_inputs) {
  if (interferer_inputs.size() != ch.k - 1)
    throw DimensionError("effective interference: need inputs for users 2..K");
  auto shape = ch.interferer_shape();
  for (std::size_t j = 0; j < shape.size(); ++j)
    if (interferer_inputs[j].size() != shape[j])
      throw DimensionError("effective interference: input support mismatch");
  std::vector<double> q(ch.v_alphabet.size(), 0.0);
  std::size_t rows = product_size(shape);
  for (std::size_t r = 0; r < rows; ++r) {
    auto idx = mixed_radix_unflatten(r, shape);
    double p = 1.0;
    for (std::size_t j = 0; j < idx.size(); ++j) p *= interferer_inputs[j][idx[j]];
    if (p == 0.0) continue;
    for (std::size_t v = 0; v < q.size(); ++v)
      q[v] += p * ch.interference_kernel(Eigen::Index(r), Eigen::Index(v));
  }
  return Pmf(ch.v_alphabet, std::move(q));
}

bool is_deterministic(const DiscreteChannel& ch) {
  auto row_is_point = [](const Eigen::MatrixXd& k, Eigen::Index r) {
    for (Eigen::Index c = 0; c < k.cols(); ++c)
      if (k(r, c) > kTol && k(r, c) < 1.0 - kTol) return false;
    return true;
  };
  for (const auto& kern : ch.direct_kernels)
    for (Eigen::Index r = 0; r < kern.rows(); ++r)
      if (!row_is_point(kern, r)) return false;
  for (Eigen::Index r = 0; r < ch.interference_kernel.rows(); ++r)
    if (!row_is_point(ch.interference_kernel, r)) return false;
  return true;
}

JointPmf joint_law(const DiscreteChannel& ch, const std::vector<Pmf>& input,
                   const AuxSpec* aux) {
  if (input.size() != ch.k)
    throw DimensionError("joint law: need one input pmf per user");
  for (std::size_t i = 0; i < ch.k; ++i)
    if (input[i].size() != ch.x_alphabets[i].size())
      throw DimensionError("joint law: input support mismatch for user " +
                           std::to_string(i + 1));

  std::vector<std::string> axes;
  std::vector<std::size_t> shape;
  for (std::size_t i = 0; i < ch.k; ++i) {
    axes.push_back("X" + std::to_string(i + 1));
    shape.push_back(ch.x_alphabets[i].size());
  }
  axes.push_back("V");
  shape.push_back(ch.v_alphabet.size());
  for (std::size_t i = 0; i < ch.k; ++i) {
    axes.push_back("Y" + std::to_string(i + 1));
    shape.push_back(ch.y_alphabets[i].size());
  }
  if (aux) {
    for (std::size_t i = 1; i < ch.k; ++i) {
      axes.push_back("U" + std::to_string(i + 1));
      shape.push_back(aux->u_alphabets[i - 1].size());
    }
  }
  auto strides = mixed_radix_strides(shape);
  std::vector<double> probs(product_size(shape), 0.0);

  std::vector<std::size_t> x_shape;
  for (std::size_t i = 0; i < ch.k; ++i) x_shape.push_back(ch.x_alphabets[i].size());
  std::size_t x_total = product_size(x_shape);
  auto interferer_shape = ch.interferer_shape();
  std::vector<std::size_t> y_shape;  // users 2..K only
  for (std::size_t i = 1; i < ch.k; ++i) y_shape.push_back(ch.y_alphabets[i].size());
  std::size_t y_total = product_size(y_shape);

  for (std::size_t xf = 0; xf < x_total; ++xf) {
    auto x = mixed_radix_unflatten(xf, x_shape);
    double px = 1.0;
    for (std::size_t i = 0; i < ch.k; ++i) px *= input[i][x[i]];
    if (px == 0.0) continue;
    std::size_t irow = 0;
    for (std::size_t j = 0; j < interferer_shape.size(); ++j)
      irow = irow * interferer_shape[j] + x[j + 1];
    std::size_t base = 0;
    for (std::size_t i = 0; i < ch.k; ++i) base += x[i] * strides[i];
    if (aux)
      for (std::size_t i = 1; i < ch.k; ++i)
        base += aux->maps[i - 1][x[i]] * strides[2 * ch.k + i];
    for (std::size_t v = 0; v < ch.v_alphabet.size(); ++v) {
      double pv = ch.interference_kernel(Eigen::Index(irow), Eigen::Index(v));
      if (pv == 0.0) continue;
      std::size_t y1 = ch.f1[x[0]][v];
      std::size_t base_v =
          base + v * strides[ch.k] + y1 * strides[ch.k + 1];
      for (std::size_t yf = 0; yf < y_total; ++yf) {
        auto y = mixed_radix_unflatten(yf, y_shape);
        double py = 1.0;
        for (std::size_t j = 0; j < y_shape.size(); ++j)
          py *= ch.direct_kernels[j](Eigen::Index(x[j + 1]), Eigen::Index(y[j]));
        if (py == 0.0) continue;
        std::size_t flat = base_v;
        for (std::size_t j = 0; j < y_shape.size(); ++j)
          flat += y[j] * strides[ch.k + 2 + j];
        probs[flat] += px * pv * py;
      }
    }
  }
  return JointPmf(std::move(axes), std::move(shape), std::move(probs));
}

namespace {

std::vector<std::string> lift_labels(const std::vector<std::vector<std::string>>& per_carrier) {
  std::vector<std::size_t> shape;
  for (const auto& a : per_carrier) shape.push_back(a.size());
  std::size_t total = product_size(shape);
  std::vector<std::string> out;
  out.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    auto idx = mixed_radix_unflatten(flat, shape);
    std::string label;
    for (std::size_t f = 0; f < idx.size(); ++f) {
      if (f) label += "|";
      label += per_carrier[f][idx[f]];
    }
    out.push_back(label);
  }
  return out;
}

DiscreteChannel lift_discrete(const std::vector<const DiscreteChannel*>& carriers) {
  const std::size_t fcount = carriers.size();
  const std::size_t k = carriers[0]->k;
  DiscreteChannel out;
  out.k = k;
  auto gather = [&](auto&& pick) {
    std::vector<std::vector<std::string>> per_carrier;
    for (const auto* c : carriers) per_carrier.push_back(pick(*c));
    return lift_labels(per_carrier);
  };
  for (std::size_t i = 0; i < k; ++i) {
    out.x_alphabets.push_back(gather([i](const DiscreteChannel& c) { return c.x_alphabets[i]; }));
    out.y_alphabets.push_back(gather([i](const DiscreteChannel& c) { return c.y_alphabets[i]; }));
  }
  out.v_alphabet = gather([](const DiscreteChannel& c) { return c.v_alphabet; });

  // Direct kernels: carrier-major Kronecker products.
  for (std::size_t i = 1; i < k; ++i) {
    Eigen::MatrixXd kern = carriers[0]->direct_kernels[i - 1];
    for (std::size_t f = 1; f < fcount; ++f) {
      const Eigen::MatrixXd& next = carriers[f]->direct_kernels[i - 1];
      Eigen::MatrixXd lifted(kern.rows() * next.rows(), kern.cols() * next.cols());
      for (Eigen::Index r = 0; r < kern.rows(); ++r)
        for (Eigen::Index c = 0; c < kern.cols(); ++c)
          lifted.block(r * next.rows(), c * next.cols(), next.rows(), next.cols()) =
              kern(r, c) * next;
      kern = std::move(lifted);
    }
    out.direct_kernels.push_back(std::move(kern));
  }

  // Interference kernel: lifted rows are user-major (each user's letter is a
  // carrier tuple), while per-carrier rows are user-major over single letters.
  auto lifted_shape = out.interferer_shape();
  std::size_t rows = product_size(lifted_shape);
  std::vector<std::vector<std::size_t>> carrier_shapes(fcount);
  for (std::size_t f = 0; f < fcount; ++f)
    carrier_shapes[f] = carriers[f]->interferer_shape();
  std::vector<std::size_t> v_shape;
  for (std::size_t f = 0; f < fcount; ++f)
    v_shape.push_back(carriers[f]->v_alphabet.size());
  out.interference_kernel.resize(rows, product_size(v_shape));
  std::vector<std::size_t> user_carrier_shape;  // per user: carrier tuple shape
  for (std::size_t i = 1; i < k; ++i)
    for (std::size_t f = 0; f < fcount; ++f)
      user_carrier_shape.push_back(carriers[f]->x_alphabets[i].size());
  for (std::size_t r = 0; r < rows; ++r) {
    auto uc = mixed_radix_unflatten(r, user_carrier_shape);
    // Per-carrier row index over users.
    std::vector<std::size_t> carrier_row(fcount, 0);
    for (std::size_t f = 0; f < fcount; ++f) {
      std::size_t row = 0;
      for (std::size_t j = 0; j + 1 < k; ++j)
        row = row * carrier_shapes[f][j] + uc[j * fcount + f];
      carrier_row[f] = row;
    }
    for (std::size_t vflat = 0; vflat < product_size(v_shape); ++vflat) {
      auto v = mixed_radix_unflatten(vflat, v_shape);
      double p = 1.0;
      for (std::size_t f = 0; f < fcount; ++f)
        p *= carriers[f]->interference_kernel(Eigen::Index(carrier_row[f]),
                                              Eigen::Index(v[f]));
      out.interference_kernel(Eigen::Index(r), Eigen::Index(vflat)) = p;
    }
  }

  // f1 acts carrier by carrier.
  std::vector<std::size_t> x1_shape, y1_shape;
  for (std::size_t f = 0; f < fcount; ++f) {
    x1_shape.push_back(carriers[f]->x_alphabets[0].size());
    y1_shape.push_back(carriers[f]->y_alphabets[0].size());
  }
  out.f1.assign(product_size(x1_shape),
                std::vector<std::size_t>(product_size(v_shape)));
  for (std::size_t xf = 0; xf < out.f1.size(); ++xf) {
    auto x1 = mixed_radix_unflatten(xf, x1_shape);
    for (std::size_t vflat = 0; vflat < product_size(v_shape); ++vflat) {
      auto v = mixed_radix_unflatten(vflat, v_shape);
      std::size_t y = 0;
      for (std::size_t f = 0; f < fcount; ++f)
        y = y * y1_shape[f] + carriers[f]->f1[x1[f]][v[f]];
      out.f1[xf][vflat] = y;
    }
  }
  return out;
}

GaussianChannel lift_gaussian(const std::vector<const GaussianChannel*>& carriers,
                              const std::optional<std::vector<double>>& shared_power) {
  const std::size_t k = carriers[0]->k;
  GaussianChannel out;
  out.k = k;
  out.tx_antennas.assign(k, 0);
  out.rx_antennas.assign(k, 0);
  out.power.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto* c : carriers) {
      out.tx_antennas[i] += c->tx_antennas[i];
      out.rx_antennas[i] += c->rx_antennas[i];
      out.power[i] += c->power[i];
    }
    if (shared_power) out.power[i] = (*shared_power)[i];
  }
  auto blkdiag = [](const std::vector<Eigen::MatrixXcd>& blocks) {
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
      r += b.rows();
      c += b.cols();
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(r, c);
    Eigen::Index ro = 0, co = 0;
    for (const auto& b : blocks) {
      m.block(ro, co, b.rows(), b.cols()) = b;
      ro += b.rows();
      co += b.cols();
    }
    return m;
  };
  std::vector<Eigen::MatrixXcd> h11_blocks;
  for (const auto* c : carriers) h11_blocks.push_back(c->h11);
  out.h11 = blkdiag(h11_blocks);
  for (std::size_t i = 1; i < k; ++i) {
    std::vector<Eigen::MatrixXcd> d_blocks, c_blocks;
    for (const auto* c : carriers) {
      d_blocks.push_back(c->direct[i - 1]);
      c_blocks.push_back(c->cross[i - 1]);
    }
    out.direct.push_back(blkdiag(d_blocks));
    out.cross.push_back(blkdiag(c_blocks));
  }
  return out;
}

}  // namespace

std::variant<DiscreteChannel, GaussianChannel> lift_parallel(const ParallelChannel& par) {
  ValidationReport rep = validate(par);
  if (!rep.ok) throw DomainError("lift: invalid parallel channel: " + rep.problems.front());
  bool all_discrete = true, all_gaussian = true;
  for (const auto& c : par.carriers) {
    all_discrete = all_discrete && std::holds_alternative<DiscreteChannel>(c);
    all_gaussian = all_gaussian && std::holds_alternative<GaussianChannel>(c);
  }
  if (all_discrete) {
    std::vector<const DiscreteChannel*> cs;
    for (const auto& c : par.carriers) cs.push_back(&std::get<DiscreteChannel>(c));
    return lift_discrete(cs);
  }
  if (all_gaussian) {
    std::vector<const GaussianChannel*> cs;
    for (const auto& c : par.carriers) cs.push_back(&std::get<GaussianChannel>(c));
    return lift_gaussian(cs, par.shared_power);
  }
  throw DomainError("lift: carriers must all be discrete or all Gaussian");
}

}  // namespace mto
