#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mto {

// Finite probability mass function over labelled outcomes.
// Mass must be 1 within 1e-12; entries must be >= 0; labels distinct.
class Pmf {
 public:
  Pmf() = default;
  Pmf(std::vector<std::string> labels, std::vector<double> probs);

  static Pmf uniform(std::size_t n);
  static Pmf point_mass(std::size_t n, std::size_t at);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::vector<double> probs_;
};

// Dense joint pmf over named axes, stored row-major (last axis fastest).
class JointPmf {
 public:
  JointPmf() = default;
  JointPmf(std::vector<std::string> axes, std::vector<std::size_t> shape,
           std::vector<double> probs);

  // Outer product of independent per-axis pmfs.
  static JointPmf product(const std::vector<std::string>& axes,
                          const std::vector<Pmf>& pmfs);

  const std::vector<std::string>& axes() const { return axes_; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

  std::size_t axis(const std::string& name) const;  // throws AxisError
  bool has_axis(const std::string& name) const;

  std::size_t flat_index(const std::vector<std::size_t>& idx) const;
  std::vector<std::size_t> unflatten(std::size_t flat) const;

  // Marginal over the named axes (kept in the given order).
  JointPmf marginal(const std::vector<std::string>& keep) const;

 private:
  std::vector<std::string> axes_;
  std::vector<std::size_t> shape_;
  std::vector<std::size_t> strides_;
  std::vector<double> probs_;
};

// Mixed-radix helpers for iterating product alphabets.
std::vector<std::size_t> mixed_radix_strides(const std::vector<std::size_t>& shape);
std::vector<std::size_t> mixed_radix_unflatten(std::size_t flat,
                                               const std::vector<std::size_t>& shape);

}  // namespace mto
