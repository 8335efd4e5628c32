#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ucca::nn {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A dense fp64 tensor with its gradient. Matrices are row-major; 3-way
// tensors are stored with the last index fastest.
struct Parameter {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool frozen = false;

  std::size_t size() const { return value.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape.front(); }
  // Product of all dimensions but the first.
  std::size_t cols() const;
  std::span<double> row(std::size_t r) { return {value.data() + r * cols(), cols()}; }
  std::span<const double> row(std::size_t r) const { return {value.data() + r * cols(), cols()}; }
  std::span<double> grad_row(std::size_t r) { return {grad.data() + r * cols(), cols()}; }
};

// Owns parameters in insertion order; addresses are stable.
class ParameterSet {
 public:
  Parameter& add(const std::string& name, std::vector<std::size_t> shape);
  Parameter* find(const std::string& name);
  const Parameter* find(const std::string& name) const;
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return *params_[i]; }
  const Parameter& operator[](std::size_t i) const { return *params_[i]; }

  void zero_grad();
  std::size_t total_values() const;

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

using Rng = std::mt19937_64;

// Uniform in +-sqrt(6 / (rows + cols)).
void init_glorot(Parameter& p, Rng& rng);
void init_uniform(Parameter& p, double lo, double hi, Rng& rng);

}  // namespace ucca::nn
