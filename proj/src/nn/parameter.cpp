#include "ucca/nn/parameter.hpp"

#include <cmath>
#include <functional>
#include <numeric>

namespace ucca::nn {

std::size_t Parameter::cols() const {
  if (shape.size() < 2) return 1;
  return std::accumulate(shape.begin() + 1, shape.end(), std::size_t{1}, std::multiplies<>());
}

Parameter& ParameterSet::add(const std::string& name, std::vector<std::size_t> shape) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter " + name);
  auto p = std::make_unique<Parameter>();
  p->name = name;
  std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  p->shape = std::move(shape);
  p->value.assign(n, 0.0);
  p->grad.assign(n, 0.0);
  index_.emplace(name, params_.size());
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter* ParameterSet::find(const std::string& name) {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : params_[it->second].get();
}

const Parameter* ParameterSet::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : params_[it->second].get();
}

Parameter& ParameterSet::at(const std::string& name) {
  if (Parameter* p = find(name)) return *p;
  throw std::out_of_range("no parameter " + name);
}

const Parameter& ParameterSet::at(const std::string& name) const {
  if (const Parameter* p = find(name)) return *p;
  throw std::out_of_range("no parameter " + name);
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) std::fill(p->grad.begin(), p->grad.end(), 0.0);
}

std::size_t ParameterSet::total_values() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->size();
  return n;
}

void init_glorot(Parameter& p, Rng& rng) {
  double fan = static_cast<double>(p.rows() + p.cols());
  double limit = std::sqrt(6.0 / fan);
  init_uniform(p, -limit, limit, rng);
}

void init_uniform(Parameter& p, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  for (double& v : p.value) v = dist(rng);
}

}  // namespace ucca::nn
