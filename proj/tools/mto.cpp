// Command-line front end: loads channel descriptions, dispatches the
// regime / capacity / region / verify / simulate operations, and emits
// machine-readable reports (JSON by default, CSV for sweep-style outputs).
//
// Exit codes: 0 success, 1 domain failure (regime violated with
// --require-noisy, failed verification, resolvability violation), 2 input
// error (bad file, bad schema, bad flags).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mto/capacity.hpp"
#include "mto/channels.hpp"
#include "mto/checks.hpp"
#include "mto/errors.hpp"
#include "mto/json_io.hpp"
#include "mto/regimes.hpp"
#include "mto/regions.hpp"
#include "mto/rng.hpp"
#include "mto/simulate.hpp"

namespace {

using nlohmann::json;

struct CommonOpts {
  std::string channel_path;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  int grid = 0;
  std::string out_path;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts& o, bool channel_required) {
  auto* c = cmd->add_option("--channel", o.channel_path, "channel description (JSON)");
  if (channel_required) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "base seed for every randomized step");
  cmd->add_option("--tol", o.tol, "numeric tolerance");
  cmd->add_option("--grid", o.grid, "grid density (0 = automatic)");
  cmd->add_option("--out", o.out_path, "write the report here instead of stdout");
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw mto::ConfigError("cannot write output file: " + out_path);
  f << text << "\n";
}

// Key/value CSV for the scalar-report commands; sweep outputs have their own
// tabular writers.
std::string flat_csv(const json& doc) {
  std::ostringstream os;
  os << "key,value\n";
  for (const auto& item : doc.items()) {
    if (item.value().is_structured()) continue;
    os << item.key() << "," << item.value().dump() << "\n";
  }
  return os.str();
}

void emit_report(const json& doc, const CommonOpts& o) {
  emit(o.format == "csv" ? flat_csv(doc) : doc.dump(2), o.out_path);
}

std::string family_name(const mto::Channel& ch) {
  if (std::holds_alternative<mto::DiscreteChannel>(ch)) return "discrete";
  if (std::holds_alternative<mto::GaussianChannel>(ch)) return "gaussian";
  if (std::holds_alternative<mto::ParallelChannel>(ch)) return "parallel";
  return "fading";
}

json regime_to_json(const mto::RegimeReport& rep, bool include_map) {
  json doc;
  doc["noisy"] = rep.noisy;
  doc["margin"] = rep.margin;
  doc["method"] = rep.method;
  doc["residual"] = rep.residual;
  doc["boundary"] = rep.boundary;
  if (rep.witness_mi) {
    doc["witness_mi_bits"] = *rep.witness_mi;
    doc["witness_user"] = *rep.witness_user;
  }
  if (include_map && rep.degrading_map) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < rep.degrading_map->rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < rep.degrading_map->cols(); ++c)
        row.push_back((*rep.degrading_map)(r, c));
      rows.push_back(std::move(row));
    }
    doc["degrading_map"] = std::move(rows);
  }
  if (!rep.notes.empty()) doc["notes"] = rep.notes;
  return doc;
}

json polytope_to_json(const mto::Polytope& p) {
  json doc;
  doc["vars"] = p.vars;
  json rows = json::array();
  for (Eigen::Index r = 0; r < p.a.rows(); ++r) {
    json row;
    json coeffs = json::array();
    for (Eigen::Index c = 0; c < p.a.cols(); ++c) coeffs.push_back(p.a(r, c));
    row["coeffs"] = std::move(coeffs);
    row["bound"] = p.b[r];
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  doc["text"] = mto::to_text(p);
  return doc;
}

json capacity_to_json(const mto::CapacityResult& res) {
  json doc;
  doc["bits"] = res.bits;
  if (!res.per_user_bits.empty()) doc["per_user_bits"] = res.per_user_bits;
  if (!res.per_carrier_bits.empty()) doc["per_carrier_bits"] = res.per_carrier_bits;
  doc["regime_noisy"] = res.regime_noisy;
  doc["regime_margin"] = res.regime_margin;
  doc["lower_bound_only"] = res.lower_bound_only;
  doc["grid_certified"] = res.grid_certified;
  doc["restart_spread"] = res.restart_spread;
  doc["converged"] = res.converged;
  if (!res.argmax.empty()) {
    json argmax = json::array();
    for (const auto& p : res.argmax) argmax.push_back(mto::pmf_to_json(p));
    doc["argmax"] = std::move(argmax);
  }
  if (!res.gamma.empty()) {
    json gamma = json::array();
    for (const auto& g : res.gamma) gamma.push_back(mto::complex_matrix_json(g));
    doc["gamma"] = std::move(gamma);
  }
  if (!res.weights.empty()) {
    doc["weights"] = res.weights;
    doc["max_weight_deviation_from_uniform"] = res.max_weight_deviation;
  }
  if (!res.notes.empty()) doc["notes"] = res.notes;
  return doc;
}

// Per-user distribution list: JSON array with one probability array per user,
// in channel order.
std::vector<mto::Pmf> load_input_dists(const std::string& path,
                                       const mto::DiscreteChannel& ch) {
  std::vector<mto::Pmf> input;
  if (path.empty()) {
    for (std::size_t i = 0; i < ch.k; ++i)
      input.push_back(mto::Pmf::uniform(ch.x_alphabets[i].size()));
    return input;
  }
  const json doc = mto::load_json_file(path);
  if (!doc.is_array() || doc.size() != ch.k)
    throw mto::ConfigError("input distributions: expected one array per user");
  for (std::size_t i = 0; i < ch.k; ++i) {
    if (!doc[i].is_array())
      throw mto::ConfigError("input distributions: entry " + std::to_string(i) +
                             " is not an array");
    input.emplace_back(ch.x_alphabets[i], doc[i].get<std::vector<double>>());
  }
  return input;
}

// Auxiliary assignment: {"maps": [[u index per x letter], ...]} for users
// 2..K, with optional "u_alphabets" labels.
mto::AuxSpec load_aux(const std::string& path, const mto::DiscreteChannel& ch) {
  if (path.empty()) return mto::AuxSpec::identity(ch);
  const json doc = mto::load_json_file(path);
  if (!doc.is_object() || !doc.contains("maps") || !doc["maps"].is_array())
    throw mto::ConfigError("aux file: expected an object with a \"maps\" array");
  mto::AuxSpec aux;
  for (const auto& row : doc["maps"])
    aux.maps.push_back(row.get<std::vector<std::size_t>>());
  if (doc.contains("u_alphabets")) {
    for (const auto& row : doc["u_alphabets"])
      aux.u_alphabets.push_back(row.get<std::vector<std::string>>());
  } else {
    for (const auto& map : aux.maps) {
      std::size_t n = 0;
      for (std::size_t u : map) n = std::max(n, u + 1);
      std::vector<std::string> labels;
      for (std::size_t u = 0; u < n; ++u) labels.push_back("u" + std::to_string(u));
      aux.u_alphabets.push_back(std::move(labels));
    }
  }
  const mto::ValidationReport rep = validate_aux(ch, aux);
  if (!rep.ok)
    throw mto::ConfigError("aux file: " + rep.problems.front());
  return aux;
}

// Grid of product input laws: n points per user (interior mesh for binary
// users, uniform + seeded interior points otherwise).
std::vector<std::vector<mto::Pmf>> make_dist_grid(const mto::DiscreteChannel& ch,
                                                  int n, std::uint64_t seed) {
  if (n < 1) throw mto::ConfigError("distribution grid needs at least 1 point");
  std::vector<std::vector<mto::Pmf>> per_user(ch.k);
  for (std::size_t i = 0; i < ch.k; ++i) {
    const std::size_t m = ch.x_alphabets[i].size();
    if (m == 2) {
      for (int j = 0; j < n; ++j) {
        const double p = (2.0 * j + 1.0) / (2.0 * n);
        per_user[i].push_back(mto::Pmf(ch.x_alphabets[i], {p, 1.0 - p}));
      }
    } else {
      per_user[i].push_back(mto::Pmf::uniform(m));
      mto::SplitMix64 gen(mto::derive_seed(seed, 31, i));
      for (int j = 1; j < n; ++j) {
        std::vector<double> probs(m);
        double total = 0.0;
        for (auto& v : probs) {
          v = 0.05 + gen.uniform();
          total += v;
        }
        for (auto& v : probs) v /= total;
        per_user[i].push_back(mto::Pmf(ch.x_alphabets[i], probs));
      }
    }
  }
  std::size_t count = 1;
  std::vector<std::size_t> shape;
  for (const auto& list : per_user) {
    shape.push_back(list.size());
    count *= list.size();
  }
  if (count > 100000)
    throw mto::ConfigError("distribution grid too large (" + std::to_string(count) +
                           " points); lower --grid");
  std::vector<std::vector<mto::Pmf>> grid;
  grid.reserve(count);
  for (std::size_t g = 0; g < count; ++g) {
    const auto idx = mto::mixed_radix_unflatten(g, shape);
    std::vector<mto::Pmf> dist;
    for (std::size_t i = 0; i < ch.k; ++i) dist.push_back(per_user[i][idx[i]]);
    grid.push_back(std::move(dist));
  }
  return grid;
}

const mto::DiscreteChannel& require_discrete(const mto::Channel& ch,
                                             const std::string& cmd) {
  const auto* d = std::get_if<mto::DiscreteChannel>(&ch);
  if (!d)
    throw mto::ConfigError(cmd + ": needs a discrete channel (got " +
                           family_name(ch) + ")");
  return *d;
}

// ---- regime ---------------------------------------------------------------

struct RegimeOpts {
  CommonOpts common;
  bool require_noisy = false;
  bool witness = false;
};

int run_regime(const RegimeOpts& o) {
  const mto::Channel ch = mto::load_channel(o.common.channel_path);
  const mto::RegimeReport rep = mto::check_regime(ch, o.common.tol);
  json doc = regime_to_json(rep, o.witness);
  doc["command"] = "regime";
  doc["family"] = family_name(ch);
  emit_report(doc, o.common);
  return (o.require_noisy && !rep.noisy) ? 1 : 0;
}

// ---- capacity ---------------------------------------------------------------

struct CapacityOpts {
  CommonOpts common;
  bool lower_bound = false;
  bool deterministic = false;
  int restarts = 8;
};

int run_capacity(const CapacityOpts& o) {
  const mto::Channel ch = mto::load_channel(o.common.channel_path);
  mto::CapacityOptions opts;
  opts.tol = (o.common.tol == 1e-9) ? 1e-6 : o.common.tol;
  opts.grid = o.common.grid;
  opts.restarts = o.restarts;
  opts.seed = o.common.seed;
  opts.lower_bound_ok = o.lower_bound;

  mto::CapacityResult res;
  if (const auto* d = std::get_if<mto::DiscreteChannel>(&ch)) {
    res = o.deterministic ? mto::sum_capacity_deterministic(*d, opts)
                          : mto::sum_capacity_discrete(*d, opts);
  } else if (const auto* g = std::get_if<mto::GaussianChannel>(&ch)) {
    bool constellation = false;
    for (const auto& c : g->constellations) constellation = constellation || c.has_value();
    res = constellation ? mto::sum_capacity_constellation(*g, opts)
                        : mto::sum_capacity_gaussian(*g, opts);
  } else if (const auto* p = std::get_if<mto::ParallelChannel>(&ch)) {
    res = mto::sum_capacity_parallel(*p, opts);
  } else {
    throw mto::ConfigError(
        "capacity: the fading family only supports the regime command");
  }

  json doc = capacity_to_json(res);
  doc["command"] = "capacity";
  doc["family"] = family_name(ch);
  emit_report(doc, o.common);
  return 0;
}

// ---- region -----------------------------------------------------------------

struct RegionOpts {
  CommonOpts common;
  std::string kind = "outer";
  std::string input_path;
  std::string aux_path;
  std::vector<std::size_t> delta_users;
  bool want_vertices = false;
  bool reduce = false;
};

json vertices_json(const mto::Polytope& p) {
  json verts = json::array();
  for (const auto& v : mto::vertices(mto::with_nonnegativity(p))) {
    json row = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v[i]);
    verts.push_back(std::move(row));
  }
  return verts;
}

std::string vertices_csv(const mto::Polytope& p) {
  std::ostringstream os;
  for (std::size_t i = 0; i < p.vars.size(); ++i)
    os << (i ? "," : "") << p.vars[i];
  os << "\n";
  os.precision(12);
  for (const auto& v : mto::vertices(mto::with_nonnegativity(p))) {
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << "\n";
  }
  return os.str();
}

int run_region(const RegionOpts& o) {
  const mto::Channel loaded = mto::load_channel(o.common.channel_path);
  const mto::DiscreteChannel& ch = require_discrete(loaded, "region");
  const mto::AuxSpec aux = load_aux(o.aux_path, ch);
  const std::vector<mto::Pmf> dist = load_input_dists(o.input_path, ch);

  json doc;
  doc["command"] = "region";
  doc["kind"] = o.kind;

  mto::Polytope region;
  if (o.kind == "resolvable") {
    const int n = o.common.grid > 0 ? o.common.grid : 5;
    const auto grid = make_dist_grid(ch, n, o.common.seed);
    const mto::ResolvableReport rep = mto::resolvable_capacity(ch, grid, aux);
    doc["resolvable"] = true;
    doc["grid_points"] = rep.regions.size();
    region = rep.regions.front();  // representative region (first grid law)
  } else if (o.kind == "outer") {
    region = mto::outer_region(ch, dist, aux);
  } else if (o.kind == "inner") {
    region = mto::inner_region(ch, dist, aux);
  } else {
    region = mto::inner_region_parametric(ch, dist, aux);
  }
  if (o.reduce) region = mto::remove_redundant(region);
  doc["region"] = polytope_to_json(region);

  if (!o.delta_users.empty()) {
    json delta;
    delta["users"] = o.delta_users;
    delta["bits"] = mto::alignment_gain(ch, dist, aux, o.delta_users);
    doc["delta"] = std::move(delta);
  }
  if (o.want_vertices || o.common.format == "csv")
    doc["vertices"] = vertices_json(region);

  if (o.common.format == "csv") {
    emit(vertices_csv(region), o.common.out_path);
    return 0;
  }
  emit_report(doc, o.common);
  return 0;
}

// ---- verify -------------------------------------------------------------------

struct VerifyOpts {
  CommonOpts common;
  std::size_t trials = 0;  // 0 = per-battery defaults
  bool equivalence = false;
  bool lemma1 = false;
  bool lemma2 = false;
  bool regions = false;
  bool two_letter = false;
};

json check_to_json(const mto::CheckResult& c) {
  json doc;
  doc["name"] = c.name;
  doc["pass"] = c.pass;
  doc["trials"] = c.trials;
  doc["failures"] = c.failures;
  if (std::isfinite(c.worst)) doc["worst"] = c.worst;
  if (!c.details.empty()) doc["details"] = c.details;
  return doc;
}

int run_verify(const VerifyOpts& o) {
  const bool selected =
      o.equivalence || o.lemma1 || o.lemma2 || o.regions || o.two_letter;
  mto::VerifySuiteOptions suite;
  suite.seed = o.common.seed;
  if (o.trials > 0) {
    suite.equivalence_trials = o.trials;
    suite.chain_trials = o.trials;
    suite.region_trials = std::min<std::size_t>(o.trials, 50);
  }

  std::vector<mto::CheckResult> checks;
  if (!selected) {
    checks = mto::run_verification_suite(suite);
  } else {
    if (o.equivalence)
      checks.push_back(mto::check_scalar_equivalence(suite.equivalence_trials, suite.seed));
    if (o.lemma1)
      checks.push_back(mto::check_chain_inequality(suite.chain_trials, suite.seed));
    if (o.lemma2)
      checks.push_back(mto::check_parallel_inequality(suite.chain_trials, suite.seed));
    if (o.regions)
      checks.push_back(mto::check_fm_inner_equality(suite.region_trials, suite.seed));
    if (o.two_letter) checks.push_back(mto::check_two_letter_xor());
  }

  if (!o.common.channel_path.empty()) {
    const mto::Channel ch = mto::load_channel(o.common.channel_path);
    const mto::RegimeReport rep = mto::check_regime(ch, o.common.tol);
    mto::CheckResult c;
    c.name = "channel_regime";
    c.trials = 1;
    c.pass = rep.noisy;
    c.worst = rep.margin;
    if (!rep.noisy) {
      c.failures = 1;
      c.details = "channel fails its regime test (margin " +
                  std::to_string(rep.margin) + ")";
    }
    checks.push_back(std::move(c));
  }

  bool all_pass = true;
  json list = json::array();
  for (const auto& c : checks) {
    all_pass = all_pass && c.pass;
    list.push_back(check_to_json(c));
  }
  json doc;
  doc["command"] = "verify";
  doc["pass"] = all_pass;
  doc["checks"] = std::move(list);
  emit_report(doc, o.common);
  return all_pass ? 0 : 1;
}

// ---- simulate -------------------------------------------------------------------

struct SimulateOpts {
  CommonOpts common;
  std::vector<double> rates;
  std::vector<int> blocklengths{6, 10, 14};
  int trials = 2000;
  double epsilon = 0.5;
  std::string input_path;
  std::size_t max_codewords = std::size_t(1) << 16;
  bool format_given = false;
};

int run_simulate(const SimulateOpts& o) {
  const mto::Channel loaded = mto::load_channel(o.common.channel_path);
  const mto::DiscreteChannel& ch = require_discrete(loaded, "simulate");

  mto::TrialConfig cfg;
  cfg.rates = o.rates;
  cfg.blocklengths = o.blocklengths;
  cfg.trials = o.trials;
  cfg.epsilon = o.epsilon;
  cfg.seed = o.common.seed;
  cfg.max_codewords = o.max_codewords;
  if (!o.input_path.empty()) cfg.inputs = load_input_dists(o.input_path, ch);

  const std::vector<mto::TrialRecord> records = mto::sweep_blocklength(ch, cfg);

  // Sweep output defaults to CSV; JSON on request.
  const bool use_json = o.format_given && o.common.format == "json";
  if (use_json) {
    json list = json::array();
    for (const auto& r : records) {
      json row;
      row["blocklength"] = r.blocklength;
      row["rates"] = r.rates;
      row["trials"] = r.trials;
      row["errors"] = r.errors;
      row["p_hat"] = r.p_hat;
      row["ci_lo"] = r.ci_lo;
      row["ci_hi"] = r.ci_hi;
      list.push_back(std::move(row));
    }
    json doc;
    doc["command"] = "simulate";
    doc["records"] = std::move(list);
    emit_report(doc, o.common);
  } else {
    std::ostringstream os;
    mto::write_trial_csv(os, records);
    emit(os.str(), o.common.out_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"many-to-one interference network toolkit"};
  app.require_subcommand(1);

  RegimeOpts regime;
  auto* regime_cmd =
      app.add_subcommand("regime", "decide noisy-interference membership");
  add_common(regime_cmd, regime.common, true);
  regime_cmd->add_flag("--require-noisy", regime.require_noisy,
                       "exit 1 when the channel is outside the regime");
  regime_cmd->add_flag("--witness", regime.witness,
                       "include the degrading map / witness details");

  CapacityOpts capacity;
  auto* capacity_cmd = app.add_subcommand("capacity", "compute sum capacity");
  add_common(capacity_cmd, capacity.common, true);
  capacity_cmd->add_flag("--lower-bound", capacity.lower_bound,
                         "outside the regime, report the TIN value as a lower bound");
  capacity_cmd->add_flag("--deterministic", capacity.deterministic,
                         "use the deterministic-channel evaluator");
  capacity_cmd->add_option("--restarts", capacity.restarts,
                           "optimizer restarts")->check(CLI::PositiveNumber);

  RegionOpts region;
  auto* region_cmd = app.add_subcommand("region", "rate-region polytopes");
  add_common(region_cmd, region.common, true);
  region_cmd->add_option("--kind", region.kind, "which region to build")
      ->check(CLI::IsMember({"outer", "inner", "parametric", "resolvable"}));
  region_cmd->add_option("--input", region.input_path,
                         "per-user input distributions (JSON)");
  region_cmd->add_option("--aux", region.aux_path, "auxiliary assignment (JSON)");
  region_cmd->add_option("--delta", region.delta_users,
                         "user set S for the alignment gain (e.g. --delta 2 3)");
  region_cmd->add_flag("--vertices", region.want_vertices,
                       "include vertex enumeration");
  region_cmd->add_flag("--reduce", region.reduce, "drop redundant inequalities");

  VerifyOpts verify;
  auto* verify_cmd =
      app.add_subcommand("verify", "run the randomized verification batteries");
  add_common(verify_cmd, verify.common, false);
  verify_cmd->add_option("--trials", verify.trials, "override per-battery trial counts");
  verify_cmd->add_flag("--equivalence", verify.equivalence,
                       "scalar ratio test vs PSD test");
  verify_cmd->add_flag("--lemma1", verify.lemma1, "chain entropy inequality");
  verify_cmd->add_flag("--lemma2", verify.lemma2, "parallel entropy inequality");
  verify_cmd->add_flag("--regions", verify.regions, "parametric region equality");
  verify_cmd->add_flag("--two-letter", verify.two_letter, "two-letter consistency");

  SimulateOpts simulate;
  auto* simulate_cmd =
      app.add_subcommand("simulate", "Monte-Carlo TIN decoding error rates");
  add_common(simulate_cmd, simulate.common, true);
  simulate_cmd->add_option("--rates", simulate.rates, "per-user rates in bits/use")
      ->required();
  simulate_cmd->add_option("--blocklengths", simulate.blocklengths,
                           "blocklengths to sweep");
  simulate_cmd->add_option("--trials", simulate.trials, "trials per blocklength");
  simulate_cmd->add_option("--epsilon", simulate.epsilon, "typicality tolerance");
  simulate_cmd->add_option("--input", simulate.input_path,
                           "codebook input distributions (JSON)");
  simulate_cmd->add_option("--max-codewords", simulate.max_codewords,
                           "per-user codebook size cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (regime_cmd->parsed()) return run_regime(regime);
    if (capacity_cmd->parsed()) return run_capacity(capacity);
    if (region_cmd->parsed()) return run_region(region);
    if (verify_cmd->parsed()) return run_verify(verify);
    simulate.format_given = simulate_cmd->count("--format") > 0;
    return run_simulate(simulate);
  } catch (const mto::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
