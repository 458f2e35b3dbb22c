#include "mto/regions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "mto/errors.hpp"
#include "mto/infotheory.hpp"
#include "mto/linprog.hpp"

namespace mto {

namespace {

std::string joined(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

}  // namespace

void Polytope::add_row(const Eigen::RowVectorXd& coeff, double bound) {
  if (static_cast<std::size_t>(coeff.size()) != vars.size())
    throw DimensionError("row width does not match the variable count");
  const Eigen::Index n = static_cast<Eigen::Index>(vars.size());
  a.conservativeResize(a.rows() + 1, n);
  a.row(a.rows() - 1) = coeff;
  b.conservativeResize(b.size() + 1);
  b(b.size() - 1) = bound;
}

std::size_t Polytope::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == name) return i;
  throw AxisError("no variable named '" + name + "'");
}

Polytope deduplicate(const Polytope& p, double tol) {
  Polytope out;
  out.vars = p.vars;
  out.a.resize(0, static_cast<Eigen::Index>(p.vars.size()));
  out.b.resize(0);
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> bounds;
  for (Eigen::Index r = 0; r < p.a.rows(); ++r) {
    Eigen::RowVectorXd row = p.a.row(r);
    double bound = p.b(r);
    const double scale = row.size() ? row.cwiseAbs().maxCoeff() : 0.0;
    if (scale < 1e-14) {
      if (bound >= -1e-12) continue;  // 0 <= nonnegative: vacuous
      row.setZero();                  // infeasibility marker, keep one
    } else {
      row /= scale;
      bound /= scale;
    }
    bool dup = false;
    for (std::size_t s = 0; s < rows.size(); ++s) {
      if ((rows[s] - row).cwiseAbs().maxCoeff() <= tol &&
          std::abs(bounds[s] - bound) <= tol) {
        dup = true;
        break;
      }
    }
    if (!dup) {
      rows.push_back(row);
      bounds.push_back(bound);
    }
  }
  for (std::size_t s = 0; s < rows.size(); ++s) out.add_row(rows[s], bounds[s]);
  return out;
}

Polytope fourier_motzkin(const Polytope& p, const std::string& var) {
  const std::size_t vi = p.var_index(var);
  Polytope out;
  out.vars = p.vars;
  out.vars.erase(out.vars.begin() + static_cast<std::ptrdiff_t>(vi));
  out.a.resize(0, static_cast<Eigen::Index>(out.vars.size()));
  out.b.resize(0);
  auto strip = [&](const Eigen::RowVectorXd& row) {
    Eigen::RowVectorXd r(out.vars.size());
    Eigen::Index w = 0;
    for (Eigen::Index j = 0; j < row.size(); ++j)
      if (static_cast<std::size_t>(j) != vi) r(w++) = row(j);
    return r;
  };
  constexpr double kZero = 1e-12;
  std::vector<Eigen::Index> pos, neg;
  for (Eigen::Index r = 0; r < p.a.rows(); ++r) {
    const double c = p.a(r, static_cast<Eigen::Index>(vi));
    if (c > kZero)
      pos.push_back(r);
    else if (c < -kZero)
      neg.push_back(r);
    else
      out.add_row(strip(p.a.row(r)), p.b(r));
  }
  for (Eigen::Index i : pos) {
    const double cp = p.a(i, static_cast<Eigen::Index>(vi));
    for (Eigen::Index j : neg) {
      const double cn = -p.a(j, static_cast<Eigen::Index>(vi));
      const Eigen::RowVectorXd combo = p.a.row(i) / cp + p.a.row(j) / cn;
      out.add_row(strip(combo), p.b(i) / cp + p.b(j) / cn);
    }
  }
  return deduplicate(out);
}

Polytope with_nonnegativity(const Polytope& p) {
  Polytope out = p;
  const Eigen::Index n = static_cast<Eigen::Index>(p.vars.size());
  Eigen::RowVectorXd row(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    row.setZero();
    row(j) = -1.0;
    out.add_row(row, 0.0);
  }
  return out;
}

PolytopeOptimum polytope_max(const Polytope& p, const Eigen::VectorXd& obj) {
  PolytopeOptimum out;
  LpResult res = maximize_lp(obj, p.a, p.b);
  if (res.status == LpResult::Status::kUnbounded) {
    out.unbounded = true;
    return out;
  }
  if (!res.optimal()) return out;
  out.ok = true;
  out.value = res.value;
  out.arg = res.x;
  return out;
}

bool contains_point(const Polytope& p, const Eigen::VectorXd& x, double tol) {
  if (x.size() != p.a.cols())
    throw DimensionError("point dimension does not match the polytope");
  for (Eigen::Index r = 0; r < p.a.rows(); ++r)
    if (p.a.row(r).dot(x) > p.b(r) + tol) return false;
  return true;
}

Polytope remove_redundant(const Polytope& p) {
  Polytope q = deduplicate(p);
  const std::size_t n = q.rows();
  std::vector<bool> keep(n, true);
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<Eigen::Index> others;
    for (std::size_t s = 0; s < n; ++s)
      if (s != r && keep[s]) others.push_back(static_cast<Eigen::Index>(s));
    Eigen::MatrixXd a(others.size() + 1, q.a.cols());
    Eigen::VectorXd b(others.size() + 1);
    for (std::size_t s = 0; s < others.size(); ++s) {
      a.row(static_cast<Eigen::Index>(s)) = q.a.row(others[s]);
      b(static_cast<Eigen::Index>(s)) = q.b(others[s]);
    }
    // keep row r itself, relaxed, so the LP stays bounded along its normal
    a.row(static_cast<Eigen::Index>(others.size())) = q.a.row(static_cast<Eigen::Index>(r));
    b(static_cast<Eigen::Index>(others.size())) = q.b(static_cast<Eigen::Index>(r)) + 1.0;
    LpResult res = maximize_lp(q.a.row(static_cast<Eigen::Index>(r)).transpose(), a, b);
    if (res.optimal() && res.value <= q.b(static_cast<Eigen::Index>(r)) + 1e-9)
      keep[r] = false;
  }
  Polytope out;
  out.vars = q.vars;
  out.a.resize(0, q.a.cols());
  out.b.resize(0);
  for (std::size_t r = 0; r < n; ++r)
    if (keep[r]) out.add_row(q.a.row(static_cast<Eigen::Index>(r)), q.b(static_cast<Eigen::Index>(r)));
  return out;
}

bool region_contains(const Polytope& outer, const Polytope& inner, double tol) {
  if (outer.vars != inner.vars)
    throw DimensionError("regions use different variable lists");
  const Polytope feas = with_nonnegativity(inner);
  const Polytope rows = deduplicate(outer);
  for (Eigen::Index r = 0; r < rows.a.rows(); ++r) {
    LpResult res = maximize_lp(rows.a.row(r).transpose(), feas.a, feas.b);
    if (res.status == LpResult::Status::kInfeasible) return true;  // empty inner
    if (!res.optimal()) return false;  // unbounded or stalled: not certified
    if (res.value > rows.b(r) + tol) return false;
  }
  return true;
}

bool regions_equal(const Polytope& a, const Polytope& b, double tol) {
  return region_contains(a, b, tol) && region_contains(b, a, tol);
}

std::vector<Eigen::VectorXd> vertices(const Polytope& p, double tol) {
  std::vector<Eigen::VectorXd> out;
  const Eigen::Index d = p.a.cols();
  if (d == 0 || p.a.rows() < d) return out;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(d));
  std::function<void(Eigen::Index, Eigen::Index)> rec = [&](Eigen::Index start,
                                                            Eigen::Index depth) {
    if (depth == d) {
      Eigen::MatrixXd m(d, d);
      Eigen::VectorXd rhs(d);
      for (Eigen::Index i = 0; i < d; ++i) {
        m.row(i) = p.a.row(idx[static_cast<std::size_t>(i)]);
        rhs(i) = p.b(idx[static_cast<std::size_t>(i)]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
      if (!lu.isInvertible()) return;
      Eigen::VectorXd x = lu.solve(rhs);
      if (!contains_point(p, x, tol)) return;
      for (const auto& seen : out)
        if ((seen - x).cwiseAbs().maxCoeff() <= 1e-7) return;
      out.push_back(std::move(x));
      return;
    }
    for (Eigen::Index i = start; i < p.a.rows(); ++i) {
      idx[static_cast<std::size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

std::string to_text(const Polytope& p) {
  std::ostringstream os;
  os.precision(12);
  for (Eigen::Index r = 0; r < p.a.rows(); ++r) {
    bool first = true;
    for (Eigen::Index j = 0; j < p.a.cols(); ++j) {
      const double c = p.a(r, j);
      if (std::abs(c) < 1e-12) continue;
      const double mag = std::abs(c);
      if (first) {
        if (c < 0) os << "-";
        if (std::abs(mag - 1.0) > 1e-9) os << mag << " ";
      } else {
        os << (c < 0 ? " - " : " + ");
        if (std::abs(mag - 1.0) > 1e-9) os << mag << " ";
      }
      os << p.vars[static_cast<std::size_t>(j)];
      first = false;
    }
    if (first) os << "0";
    os << " <= " << p.b(r) << "\n";
  }
  return os.str();
}

// ---- region builders -------------------------------------------------------

namespace {

std::string axis(const char* base, std::size_t user) {
  return std::string(base) + std::to_string(user);
}

struct RegionSetup {
  JointPmf law;
  std::size_t k = 0;
};

RegionSetup make_setup(const DiscreteChannel& ch, const std::vector<Pmf>& dist,
                       const AuxSpec& aux) {
  if (ch.k > 10) throw DimensionError("rate regions support at most 10 users");
  if (!is_deterministic(ch))
    throw DomainError("rate regions are defined for deterministic channels");
  auto rep = validate_aux(ch, aux);
  if (!rep.ok)
    throw DomainError("auxiliary assignment rejected: " + joined(rep.problems));
  if (dist.size() != ch.k)
    throw DimensionError("need one input law per user");
  RegionSetup s;
  s.law = joint_law(ch, dist, &aux);
  s.k = ch.k;
  return s;
}

double ent(const RegionSetup& s, const std::vector<std::string>& targets,
           const std::vector<std::string>& given) {
  if (targets.empty()) return 0.0;
  if (given.empty()) return entropy(s.law.marginal(targets));
  return conditional_entropy(s.law, targets, given);
}

Polytope rate_vars(std::size_t k) {
  Polytope p;
  for (std::size_t u = 1; u <= k; ++u) p.vars.push_back(axis("R", u));
  p.a.resize(0, static_cast<Eigen::Index>(k));
  p.b.resize(0);
  return p;
}

// Adds the per-user rows R_1 <= H(Y1|V) and R_i <= H(Y_i), then one row per
// interferer subset S with the bound produced by `s_bound(S)`.
template <typename BoundFn>
Polytope build_region(const RegionSetup& s, BoundFn s_bound) {
  const std::size_t k = s.k, m = k - 1;
  Polytope p = rate_vars(k);
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(k));
  row.setZero();
  row(0) = 1.0;
  p.add_row(row, ent(s, {"Y1"}, {"V"}));
  for (std::size_t u = 2; u <= k; ++u) {
    row.setZero();
    row(static_cast<Eigen::Index>(u - 1)) = 1.0;
    p.add_row(row, ent(s, {axis("Y", u)}, {}));
  }
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    row.setZero();
    row(0) = 1.0;
    std::vector<std::size_t> in_s;
    std::vector<std::string> u_comp;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t user = j + 2;
      if ((mask >> j) & 1U) {
        row(static_cast<Eigen::Index>(user - 1)) = 1.0;
        in_s.push_back(user);
      } else {
        u_comp.push_back(axis("U", user));
      }
    }
    p.add_row(row, s_bound(in_s, u_comp));
  }
  return deduplicate(p);
}

}  // namespace

Polytope outer_region(const DiscreteChannel& ch, const std::vector<Pmf>& dist,
                      const AuxSpec& aux) {
  RegionSetup s = make_setup(ch, dist, aux);
  return build_region(s, [&](const std::vector<std::size_t>& in_s,
                             const std::vector<std::string>& u_comp) {
    std::vector<std::string> ys;
    for (std::size_t u : in_s) ys.push_back(axis("Y", u));
    std::vector<std::string> given = {"V"};
    given.insert(given.end(), u_comp.begin(), u_comp.end());
    return ent(s, {"Y1"}, u_comp) + ent(s, ys, given);
  });
}

Polytope inner_region(const DiscreteChannel& ch, const std::vector<Pmf>& dist,
                      const AuxSpec& aux) {
  RegionSetup s = make_setup(ch, dist, aux);
  return build_region(s, [&](const std::vector<std::size_t>& in_s,
                             const std::vector<std::string>& u_comp) {
    double bound = ent(s, {"Y1"}, u_comp);
    for (std::size_t u : in_s) bound += ent(s, {axis("Y", u)}, {axis("U", u)});
    return bound;
  });
}

Polytope inner_region_parametric(const DiscreteChannel& ch,
                                 const std::vector<Pmf>& dist, const AuxSpec& aux) {
  RegionSetup s = make_setup(ch, dist, aux);
  const std::size_t k = s.k, m = k - 1;
  Polytope p;
  for (std::size_t u = 1; u <= k; ++u) p.vars.push_back(axis("R", u));
  for (std::size_t u = 2; u <= k; ++u) p.vars.push_back(axis("Omega", u));
  const Eigen::Index n = static_cast<Eigen::Index>(k + m);
  p.a.resize(0, n);
  p.b.resize(0);
  Eigen::RowVectorXd row(n);
  for (std::size_t u = 2; u <= k; ++u) {
    row.setZero();
    row(static_cast<Eigen::Index>(u - 1)) = 1.0;
    p.add_row(row, ent(s, {axis("Y", u)}, {}));
    row(static_cast<Eigen::Index>(k + u - 2)) = -1.0;
    p.add_row(row, ent(s, {axis("Y", u)}, {axis("U", u)}));
  }
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    row.setZero();
    row(0) = 1.0;
    std::vector<std::string> u_comp;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t user = j + 2;
      if ((mask >> j) & 1U)
        row(static_cast<Eigen::Index>(k + user - 2)) = 1.0;
      else
        u_comp.push_back(axis("U", user));
    }
    p.add_row(row, ent(s, {"Y1"}, u_comp));
  }
  for (std::size_t u = 2; u <= k; ++u) {
    row.setZero();
    row(static_cast<Eigen::Index>(k + u - 2)) = -1.0;
    p.add_row(row, 0.0);
  }
  for (std::size_t u = 2; u <= k; ++u) p = fourier_motzkin(p, axis("Omega", u));
  return deduplicate(p);
}

double alignment_gain(const DiscreteChannel& ch, const std::vector<Pmf>& dist,
                      const AuxSpec& aux, const std::vector<std::size_t>& users) {
  RegionSetup s = make_setup(ch, dist, aux);
  if (users.empty()) return 0.0;
  std::vector<bool> in_s(s.k + 1, false);
  for (std::size_t u : users) {
    if (u < 2 || u > s.k) throw DimensionError("user ids must lie in 2..K");
    if (in_s[u]) throw DimensionError("duplicate user id in S");
    in_s[u] = true;
  }
  std::vector<std::string> ys, us, given = {"V"};
  for (std::size_t u = 2; u <= s.k; ++u) {
    if (in_s[u]) {
      ys.push_back(axis("Y", u));
      us.push_back(axis("U", u));
    } else {
      given.push_back(axis("U", u));
    }
  }
  return ent(s, ys, given) - ent(s, ys, us);
}

ResolvableReport resolvable_capacity(const DiscreteChannel& ch,
                                     const std::vector<std::vector<Pmf>>& dist_grid,
                                     const AuxSpec& aux) {
  if (!is_deterministic(ch))
    throw DomainError("resolvability is defined for deterministic channels");
  auto rep = validate_aux(ch, aux);
  if (!rep.ok)
    throw DomainError("auxiliary assignment rejected: " + joined(rep.problems));

  // Structural recoverability of the auxiliary tuple from the interference
  // variable: holds for every input law iff no v arises from two distinct
  // auxiliary tuples.
  const auto ishape = ch.interferer_shape();
  std::size_t n_tuples = 1;
  for (std::size_t sz : ishape) n_tuples *= sz;
  std::vector<std::vector<std::size_t>> seen_u(ch.v_alphabet.size());
  std::vector<bool> filled(ch.v_alphabet.size(), false);
  for (std::size_t t = 0; t < n_tuples; ++t) {
    const auto digits = mixed_radix_unflatten(t, ishape);
    Eigen::Index vbest = 0;
    ch.interference_kernel.row(static_cast<Eigen::Index>(t)).maxCoeff(&vbest);
    std::vector<std::size_t> utuple(digits.size());
    for (std::size_t j = 0; j < digits.size(); ++j)
      utuple[j] = aux.maps[j][digits[j]];
    auto& slot = seen_u[static_cast<std::size_t>(vbest)];
    if (!filled[static_cast<std::size_t>(vbest)]) {
      filled[static_cast<std::size_t>(vbest)] = true;
      slot = utuple;
    } else if (slot != utuple) {
      std::ostringstream os;
      os << "resolvability fails: interference letter '"
         << ch.v_alphabet[static_cast<std::size_t>(vbest)]
         << "' arises from distinct auxiliary tuples";
      throw DomainError(os.str());
    }
  }

  ResolvableReport out;
  for (std::size_t g = 0; g < dist_grid.size(); ++g) {
    RegionSetup s = make_setup(ch, dist_grid[g], aux);
    std::vector<std::string> u_all;
    for (std::size_t u = 2; u <= s.k; ++u) u_all.push_back(axis("U", u));
    const double h_u_given_v = ent(s, u_all, {"V"});
    if (h_u_given_v > 1e-9) {
      std::ostringstream os;
      os << "resolvability fails at grid law #" << g
         << ": H(U|V) = " << h_u_given_v;
      throw DomainError(os.str());
    }
    Polytope inner = inner_region(ch, dist_grid[g], aux);
    Polytope outer = outer_region(ch, dist_grid[g], aux);
    if (!regions_equal(inner, outer, 1e-9)) {
      std::ostringstream os;
      os << "inner and outer regions differ at grid law #" << g;
      throw DomainError(os.str());
    }
    out.regions.push_back(std::move(inner));
  }
  return out;
}

}  // namespace mto
