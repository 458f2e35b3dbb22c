#include "mto/json_io.hpp"

#include <algorithm>
#include <complex>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mto/errors.hpp"

namespace mto {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

void expect_keys(const json& doc, const std::string& where,
                 const std::set<std::string>& allowed,
                 const std::set<std::string>& required) {
  if (!doc.is_object()) bad(where + ": expected a JSON object");
  for (const auto& item : doc.items()) {
    if (!allowed.count(item.key()))
      bad(where + ": unknown key \"" + item.key() + "\"");
  }
  for (const auto& key : required) {
    if (!doc.contains(key)) bad(where + ": missing key \"" + key + "\"");
  }
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where + ": expected a number");
  return j.get<double>();
}

std::vector<double> as_number_array(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::string> as_string_array(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where + ": expected an array of strings");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string())
      bad(where + "[" + std::to_string(i) + "]: expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

std::vector<std::vector<std::string>> as_alphabets(const json& j,
                                                   const std::string& where) {
  if (!j.is_array()) bad(where + ": expected an array of alphabets");
  std::vector<std::vector<std::string>> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_string_array(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Eigen::MatrixXd as_real_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where + ": expected a non-empty matrix");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Eigen::MatrixXd m;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row =
        as_number_array(j[r], where + "[" + std::to_string(r) + "]");
    if (r == 0) {
      cols = row.size();
      if (cols == 0) bad(where + ": empty matrix row");
      m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      bad(where + ": ragged matrix (row " + std::to_string(r) + ")");
    }
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return m;
}

std::complex<double> as_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    bad(where + ": expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Eigen::MatrixXcd as_complex_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where + ": expected a non-empty matrix");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Eigen::MatrixXcd m;
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = j[r];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array()) bad(rw + ": expected a matrix row");
    if (r == 0) {
      cols = row.size();
      if (cols == 0) bad(where + ": empty matrix row");
      m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      bad(where + ": ragged matrix (row " + std::to_string(r) + ")");
    }
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_complex(row[c], rw + "[" + std::to_string(c) + "]");
  }
  return m;
}

json complex_to_json(const std::complex<double>& z) {
  return json::array({z.real(), z.imag()});
}

json real_matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

void check_valid(const ValidationReport& report, const std::string& where) {
  if (report.ok) return;
  std::ostringstream os;
  os << where << ": invalid channel";
  for (const auto& p : report.problems) os << "; " << p;
  bad(os.str());
}

DiscreteChannel discrete_from_json(const json& doc) {
  expect_keys(doc, "discrete channel",
              {"family", "x_alphabets", "y_alphabets", "v_alphabet",
               "direct_kernels", "interference_kernel", "f1"},
              {"x_alphabets", "y_alphabets", "v_alphabet", "direct_kernels",
               "interference_kernel", "f1"});
  DiscreteChannel ch;
  ch.x_alphabets = as_alphabets(doc["x_alphabets"], "x_alphabets");
  ch.y_alphabets = as_alphabets(doc["y_alphabets"], "y_alphabets");
  ch.v_alphabet = as_string_array(doc["v_alphabet"], "v_alphabet");
  ch.k = ch.x_alphabets.size();
  const json& kernels = doc["direct_kernels"];
  if (!kernels.is_array()) bad("direct_kernels: expected an array of matrices");
  for (std::size_t i = 0; i < kernels.size(); ++i)
    ch.direct_kernels.push_back(as_real_matrix(
        kernels[i], "direct_kernels[" + std::to_string(i) + "]"));
  ch.interference_kernel =
      as_real_matrix(doc["interference_kernel"], "interference_kernel");

  // f1 is written with output labels so fixtures stay readable; translate to
  // indices into y_alphabets[0].
  if (ch.y_alphabets.empty()) bad("y_alphabets: expected at least one alphabet");
  const auto& y1 = ch.y_alphabets[0];
  const json& f1 = doc["f1"];
  if (!f1.is_array()) bad("f1: expected an array of per-x1 rows");
  for (std::size_t a = 0; a < f1.size(); ++a) {
    const auto labels =
        as_string_array(f1[a], "f1[" + std::to_string(a) + "]");
    std::vector<std::size_t> row;
    row.reserve(labels.size());
    for (const auto& label : labels) {
      const auto it = std::find(y1.begin(), y1.end(), label);
      if (it == y1.end())
        bad("f1[" + std::to_string(a) + "]: label \"" + label +
            "\" is not in y_alphabets[0]");
      row.push_back(static_cast<std::size_t>(it - y1.begin()));
    }
    ch.f1.push_back(std::move(row));
  }
  check_valid(validate(ch), "discrete channel");
  return ch;
}

GaussianChannel gaussian_from_json(const json& doc) {
  expect_keys(doc, "gaussian channel",
              {"family", "h11", "direct", "cross", "power", "constellations"},
              {"h11", "direct", "cross", "power"});
  GaussianChannel ch;
  ch.h11 = as_complex_matrix(doc["h11"], "h11");
  const json& direct = doc["direct"];
  const json& cross = doc["cross"];
  if (!direct.is_array()) bad("direct: expected an array of matrices");
  if (!cross.is_array()) bad("cross: expected an array of matrices");
  if (direct.size() != cross.size())
    bad("direct and cross must list the same number of interferers");
  for (std::size_t i = 0; i < direct.size(); ++i)
    ch.direct.push_back(
        as_complex_matrix(direct[i], "direct[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < cross.size(); ++i)
    ch.cross.push_back(
        as_complex_matrix(cross[i], "cross[" + std::to_string(i) + "]"));
  ch.power = as_number_array(doc["power"], "power");
  ch.k = ch.direct.size() + 1;
  ch.tx_antennas.push_back(ch.h11.cols());
  ch.rx_antennas.push_back(ch.h11.rows());
  for (std::size_t i = 0; i < ch.direct.size(); ++i) {
    ch.tx_antennas.push_back(ch.direct[i].cols());
    ch.rx_antennas.push_back(ch.direct[i].rows());
  }
  if (doc.contains("constellations")) {
    const json& cons = doc["constellations"];
    if (!cons.is_array() || cons.size() != ch.k)
      bad("constellations: expected one entry per user (null for Gaussian inputs)");
    for (std::size_t u = 0; u < cons.size(); ++u) {
      const std::string where = "constellations[" + std::to_string(u) + "]";
      if (cons[u].is_null()) {
        ch.constellations.emplace_back(std::nullopt);
        continue;
      }
      if (!cons[u].is_array() || cons[u].empty())
        bad(where + ": expected a non-empty array of points or null");
      std::vector<std::complex<double>> points;
      points.reserve(cons[u].size());
      for (std::size_t p = 0; p < cons[u].size(); ++p)
        points.push_back(
            as_complex(cons[u][p], where + "[" + std::to_string(p) + "]"));
      ch.constellations.emplace_back(std::move(points));
    }
  }
  check_valid(validate(ch), "gaussian channel");
  return ch;
}

FadingChannel fading_from_json(const json& doc) {
  expect_keys(doc, "fading channel",
              {"family", "sigma_11", "sigma_cross", "sigma_direct", "power"},
              {"sigma_11", "sigma_cross", "sigma_direct", "power"});
  FadingChannel ch;
  ch.sigma_11 = as_number(doc["sigma_11"], "sigma_11");
  ch.sigma_cross = as_number_array(doc["sigma_cross"], "sigma_cross");
  ch.sigma_direct = as_number_array(doc["sigma_direct"], "sigma_direct");
  ch.power = as_number_array(doc["power"], "power");
  ch.k = ch.sigma_cross.size() + 1;
  check_valid(validate(ch), "fading channel");
  return ch;
}

DiscreteChannel collision_from_json(const json& doc) {
  expect_keys(doc, "collision channel",
              {"family", "x_prime", "collision_prob"}, {"x_prime"});
  const auto x_prime = as_alphabets(doc["x_prime"], "x_prime");
  std::vector<double> prob;
  if (doc.contains("collision_prob"))
    prob = as_number_array(doc["collision_prob"], "collision_prob");
  DiscreteChannel ch = make_collision(x_prime, prob);
  check_valid(validate(ch), "collision channel");
  return ch;
}

ParallelChannel parallel_from_json(const json& doc);

Channel channel_from_json_impl(const json& doc) {
  if (!doc.is_object()) bad("channel: expected a JSON object");
  if (!doc.contains("family") || !doc["family"].is_string())
    bad("channel: missing \"family\" tag");
  const std::string family = doc["family"].get<std::string>();
  if (family == "discrete") return discrete_from_json(doc);
  if (family == "gaussian") return gaussian_from_json(doc);
  if (family == "parallel") return parallel_from_json(doc);
  if (family == "fading") return fading_from_json(doc);
  if (family == "collision") return collision_from_json(doc);
  bad("channel: unknown family \"" + family + "\"");
}

ParallelChannel parallel_from_json(const json& doc) {
  expect_keys(doc, "parallel channel", {"family", "carriers", "shared_power"},
              {"carriers"});
  const json& carriers = doc["carriers"];
  if (!carriers.is_array() || carriers.empty())
    bad("carriers: expected a non-empty array of channels");
  ParallelChannel par;
  for (std::size_t f = 0; f < carriers.size(); ++f) {
    Channel sub = channel_from_json_impl(carriers[f]);
    if (auto* d = std::get_if<DiscreteChannel>(&sub)) {
      par.carriers.emplace_back(std::move(*d));
    } else if (auto* g = std::get_if<GaussianChannel>(&sub)) {
      par.carriers.emplace_back(std::move(*g));
    } else {
      bad("carriers[" + std::to_string(f) +
          "]: carriers must be discrete, collision or gaussian channels");
    }
  }
  if (doc.contains("shared_power"))
    par.shared_power = as_number_array(doc["shared_power"], "shared_power");
  check_valid(validate(par), "parallel channel");
  return par;
}

json discrete_to_json(const DiscreteChannel& ch) {
  json doc;
  doc["family"] = "discrete";
  doc["x_alphabets"] = ch.x_alphabets;
  doc["y_alphabets"] = ch.y_alphabets;
  doc["v_alphabet"] = ch.v_alphabet;
  json kernels = json::array();
  for (const auto& m : ch.direct_kernels) kernels.push_back(real_matrix_to_json(m));
  doc["direct_kernels"] = std::move(kernels);
  doc["interference_kernel"] = real_matrix_to_json(ch.interference_kernel);
  json f1 = json::array();
  for (const auto& row : ch.f1) {
    json labels = json::array();
    for (std::size_t v = 0; v < row.size(); ++v)
      labels.push_back(ch.y_alphabets[0][row[v]]);
    f1.push_back(std::move(labels));
  }
  doc["f1"] = std::move(f1);
  return doc;
}

json gaussian_to_json(const GaussianChannel& ch) {
  json doc;
  doc["family"] = "gaussian";
  doc["h11"] = complex_matrix_to_json(ch.h11);
  json direct = json::array();
  for (const auto& m : ch.direct) direct.push_back(complex_matrix_to_json(m));
  doc["direct"] = std::move(direct);
  json cross = json::array();
  for (const auto& m : ch.cross) cross.push_back(complex_matrix_to_json(m));
  doc["cross"] = std::move(cross);
  doc["power"] = ch.power;
  if (!ch.constellations.empty()) {
    json cons = json::array();
    for (const auto& entry : ch.constellations) {
      if (!entry) {
        cons.push_back(nullptr);
        continue;
      }
      json points = json::array();
      for (const auto& z : *entry) points.push_back(complex_to_json(z));
      cons.push_back(std::move(points));
    }
    doc["constellations"] = std::move(cons);
  }
  return doc;
}

json fading_to_json(const FadingChannel& ch) {
  json doc;
  doc["family"] = "fading";
  doc["sigma_11"] = ch.sigma_11;
  doc["sigma_cross"] = ch.sigma_cross;
  doc["sigma_direct"] = ch.sigma_direct;
  doc["power"] = ch.power;
  return doc;
}

json parallel_to_json(const ParallelChannel& ch) {
  json doc;
  doc["family"] = "parallel";
  json carriers = json::array();
  for (const auto& carrier : ch.carriers) {
    if (const auto* d = std::get_if<DiscreteChannel>(&carrier))
      carriers.push_back(discrete_to_json(*d));
    else
      carriers.push_back(gaussian_to_json(std::get<GaussianChannel>(carrier)));
  }
  doc["carriers"] = std::move(carriers);
  if (ch.shared_power) doc["shared_power"] = *ch.shared_power;
  return doc;
}

}  // namespace

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open file: " + path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) bad("invalid JSON in file: " + path);
  return doc;
}

Channel channel_from_json(const nlohmann::json& doc) {
  return channel_from_json_impl(doc);
}

Channel load_channel(const std::string& path) {
  return channel_from_json(load_json_file(path));
}

nlohmann::json channel_to_json(const Channel& ch) {
  if (const auto* d = std::get_if<DiscreteChannel>(&ch)) return discrete_to_json(*d);
  if (const auto* g = std::get_if<GaussianChannel>(&ch)) return gaussian_to_json(*g);
  if (const auto* p = std::get_if<ParallelChannel>(&ch)) return parallel_to_json(*p);
  return fading_to_json(std::get<FadingChannel>(ch));
}

nlohmann::json pmf_to_json(const Pmf& p) {
  json doc;
  doc["labels"] = p.labels();
  doc["probs"] = p.probs();
  return doc;
}

nlohmann::json complex_matrix_json(const Eigen::MatrixXcd& m) {
  return complex_matrix_to_json(m);
}

}  // namespace mto
