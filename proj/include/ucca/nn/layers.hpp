#pragma once

// Forward/backward primitives over Parameters. Backward functions add into
// parameter gradients (skipping frozen ones) and into the given input
// gradient, so callers can accumulate over many uses.

#include <span>
#include <vector>

#include "ucca/nn/parameter.hpp"

namespace ucca::nn {

using Vec = std::vector<double>;

// y = W x + b; W is (out x in).
Vec linear(const Parameter& W, const Parameter& b, std::span<const double> x);
// dx may be empty when the input gradient is not needed.
void linear_backward(Parameter& W, Parameter& b, std::span<const double> x, std::span<const double> dy,
                     std::span<double> dx);

void relu_inplace(Vec& v);
// Zeroes dy where the activation was clipped.
void relu_backward(std::span<const double> activated, std::span<double> dy);

// Linear -> ReLU -> Linear.
struct MlpCache {
  Vec hidden;  // after ReLU
  Vec out;
};

void mlp_forward(const Parameter& W1, const Parameter& b1, const Parameter& W2, const Parameter& b2,
                 std::span<const double> x, MlpCache& cache);
void mlp_backward(Parameter& W1, Parameter& b1, Parameter& W2, Parameter& b2, std::span<const double> x,
                  const MlpCache& cache, std::span<const double> dout, std::span<double> dx);

// Biaffine scores s[l] = sum_a sum_b [c;1]_a W[a,l,b] p_b with W shaped
// (dc+1) x L x dp.
struct BiaffineCache {
  Vec u;  // u[a*L + l] = sum_b W[a,l,b] p_b
  Vec out;
};

void biaffine_forward(const Parameter& W, std::span<const double> child, std::span<const double> parent,
                      BiaffineCache& cache);
void biaffine_backward(Parameter& W, std::span<const double> child, std::span<const double> parent,
                       const BiaffineCache& cache, std::span<const double> dout, std::span<double> dchild,
                       std::span<double> dparent);

// One LSTM direction with gates ordered [i, f, o, g]. Wx is (4H x in), Wh is
// (4H x H), b is 4H. Zero initial state.
struct LstmTrace {
  std::vector<Vec> gates;  // post-activation, per step
  std::vector<Vec> cell;   // c_t
  std::vector<Vec> hidden; // h_t
};

// Steps through inputs in the given order.
LstmTrace lstm_forward(const Parameter& Wx, const Parameter& Wh, const Parameter& b, const std::vector<Vec>& inputs);
// dh[t] is the loss gradient w.r.t. hidden[t] from outside the recurrence.
// Returns the gradient w.r.t. each input.
std::vector<Vec> lstm_backward(Parameter& Wx, Parameter& Wh, Parameter& b, const std::vector<Vec>& inputs,
                               const LstmTrace& trace, const std::vector<Vec>& dh);

double sigmoid(double x);

}  // namespace ucca::nn
