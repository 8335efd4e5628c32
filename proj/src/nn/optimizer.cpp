#include "ucca/nn/optimizer.hpp"

#include <cmath>

#include "ucca/kernels.hpp"

namespace ucca::nn {

void Optimizer::step(ParameterSet& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter& p = params[i];
    if (p.frozen) continue;
    for (std::size_t j = 0; j < p.grad.size(); ++j) {
      if (!std::isfinite(p.grad[j])) {
        throw NumericError("non-finite gradient in " + p.name + " at index " + std::to_string(j));
      }
    }
  }
  begin_step();
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].frozen) update(params[i]);
  }
}

void Sgd::update(Parameter& p) { kernels::axpy(-lr_, p.grad, p.value); }

void Adam::update(Parameter& p) {
  Moments& s = state_[p.name];
  if (s.m.size() != p.size()) {
    s.m.assign(p.size(), 0.0);
    s.v.assign(p.size(), 0.0);
  }
  kernels::AdamCoeffs c;
  c.learning_rate = hyper_.learning_rate;
  c.beta1 = hyper_.beta1;
  c.beta2 = hyper_.beta2;
  c.epsilon = hyper_.epsilon;
  c.bias1 = 1.0 - std::pow(hyper_.beta1, static_cast<double>(t_));
  c.bias2 = 1.0 - std::pow(hyper_.beta2, static_cast<double>(t_));
  kernels::active().adam(p.value.data(), s.m.data(), s.v.data(), p.grad.data(), p.size(), c);
}

std::unique_ptr<Optimizer> make_optimizer(const std::string& name, double learning_rate) {
  if (name == "sgd") return std::make_unique<Sgd>(learning_rate);
  if (name == "adam") return std::make_unique<Adam>(AdamHyper{learning_rate});
  throw std::invalid_argument("unknown optimizer " + name);
}

}  // namespace ucca::nn
