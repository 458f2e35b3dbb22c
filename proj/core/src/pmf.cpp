#include "mto/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "mto/errors.hpp"

namespace mto {

namespace {
constexpr double kMassTol = 1e-12;
}

Pmf::Pmf(std::vector<std::string> labels, std::vector<double> probs)
    : labels_(std::move(labels)), probs_(std::move(probs)) {
  if (labels_.size() != probs_.size())
    throw InvalidDistribution("pmf: label/probability count mismatch");
  if (probs_.empty()) throw InvalidDistribution("pmf: empty support");
  double mass = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw InvalidDistribution("pmf: negative or non-finite probability");
    mass += p;
  }
  if (std::abs(mass - 1.0) > kMassTol)
    throw InvalidDistribution("pmf: total mass " + std::to_string(mass) +
                              " not 1 within 1e-12");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size())
    throw InvalidDistribution("pmf: duplicate outcome labels");
}

Pmf Pmf::uniform(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return Pmf(std::move(labels), std::vector<double>(n, 1.0 / double(n)));
}

Pmf Pmf::point_mass(std::size_t n, std::size_t at) {
  if (at >= n) throw InvalidDistribution("pmf: point mass outside support");
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  std::vector<double> probs(n, 0.0);
  probs[at] = 1.0;
  return Pmf(std::move(labels), std::move(probs));
}

std::vector<std::size_t> mixed_radix_strides(const std::vector<std::size_t>& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;)
    strides[i - 1] = strides[i] * shape[i];
  return strides;
}

std::vector<std::size_t> mixed_radix_unflatten(std::size_t flat,
                                               const std::vector<std::size_t>& shape) {
  std::vector<std::size_t> idx(shape.size());
  for (std::size_t i = shape.size(); i-- > 0;) {
    idx[i] = flat % shape[i];
    flat /= shape[i];
  }
  return idx;
}

JointPmf::JointPmf(std::vector<std::string> axes, std::vector<std::size_t> shape,
                   std::vector<double> probs)
    : axes_(std::move(axes)), shape_(std::move(shape)), probs_(std::move(probs)) {
  if (axes_.size() != shape_.size())
    throw AxisError("joint pmf: axis/shape rank mismatch");
  std::set<std::string> seen(axes_.begin(), axes_.end());
  if (seen.size() != axes_.size())
    throw AxisError("joint pmf: duplicate axis names");
  std::size_t total = 1;
  for (std::size_t s : shape_) {
    if (s == 0) throw InvalidDistribution("joint pmf: empty axis");
    total *= s;
  }
  if (probs_.size() != total)
    throw DimensionError("joint pmf: tensor size does not match shape");
  double mass = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw InvalidDistribution("joint pmf: negative or non-finite entry");
    mass += p;
  }
  if (std::abs(mass - 1.0) > kMassTol)
    throw InvalidDistribution("joint pmf: total mass not 1 within 1e-12");
  strides_ = mixed_radix_strides(shape_);
}

JointPmf JointPmf::product(const std::vector<std::string>& axes,
                           const std::vector<Pmf>& pmfs) {
  if (axes.size() != pmfs.size())
    throw AxisError("joint pmf: axis/pmf count mismatch");
  std::vector<std::size_t> shape(pmfs.size());
  std::size_t total = 1;
  for (std::size_t i = 0; i < pmfs.size(); ++i) {
    shape[i] = pmfs[i].size();
    total *= shape[i];
  }
  std::vector<double> probs(total, 1.0);
  auto strides = mixed_radix_strides(shape);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    double p = 1.0;
    for (std::size_t a = 0; a < shape.size(); ++a) {
      p *= pmfs[a][rem / strides[a]];
      rem %= strides[a];
    }
    probs[flat] = p;
  }
  return JointPmf(axes, std::move(shape), std::move(probs));
}

std::size_t JointPmf::axis(const std::string& name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i] == name) return i;
  throw AxisError("joint pmf: unknown axis '" + name + "'");
}

bool JointPmf::has_axis(const std::string& name) const {
  return std::find(axes_.begin(), axes_.end(), name) != axes_.end();
}

std::size_t JointPmf::flat_index(const std::vector<std::size_t>& idx) const {
  if (idx.size() != shape_.size())
    throw DimensionError("joint pmf: index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= shape_[i]) throw DimensionError("joint pmf: index out of range");
    flat += idx[i] * strides_[i];
  }
  return flat;
}

std::vector<std::size_t> JointPmf::unflatten(std::size_t flat) const {
  return mixed_radix_unflatten(flat, shape_);
}

JointPmf JointPmf::marginal(const std::vector<std::string>& keep) const {
  std::vector<std::size_t> keep_axes(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep_axes[i] = axis(keep[i]);
  std::vector<std::size_t> new_shape(keep.size());
  std::size_t total = 1;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    new_shape[i] = shape_[keep_axes[i]];
    total *= new_shape[i];
  }
  std::vector<double> out(total, 0.0);
  auto new_strides = mixed_radix_strides(new_shape);
  for (std::size_t flat = 0; flat < probs_.size(); ++flat) {
    if (probs_[flat] == 0.0) continue;
    std::size_t dst = 0;
    for (std::size_t i = 0; i < keep_axes.size(); ++i)
      dst += ((flat / strides_[keep_axes[i]]) % shape_[keep_axes[i]]) * new_strides[i];
    out[dst] += probs_[flat];
  }
  return JointPmf(keep, std::move(new_shape), std::move(out));
}

}  // namespace mto
