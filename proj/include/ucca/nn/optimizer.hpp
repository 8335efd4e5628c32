#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "ucca/nn/parameter.hpp"

namespace ucca::nn {

// Applies the accumulated gradients of every non-frozen parameter. Throws
// NumericError (naming the tensor) on a non-finite gradient, before any
// parameter is modified.
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  void step(ParameterSet& params);

 protected:
  virtual void update(Parameter& p) = 0;
  virtual void begin_step() {}
};

class Sgd : public Optimizer {
 public:
  explicit Sgd(double learning_rate) : lr_(learning_rate) {}

 protected:
  void update(Parameter& p) override;

 private:
  double lr_;
};

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam : public Optimizer {
 public:
  explicit Adam(AdamHyper hyper) : hyper_(hyper) {}
  long steps() const { return t_; }

 protected:
  void begin_step() override { ++t_; }
  void update(Parameter& p) override;

 private:
  struct Moments {
    std::vector<double> m, v;
  };
  AdamHyper hyper_;
  long t_ = 0;
  std::unordered_map<std::string, Moments> state_;
};

std::unique_ptr<Optimizer> make_optimizer(const std::string& name, double learning_rate);

}  // namespace ucca::nn
