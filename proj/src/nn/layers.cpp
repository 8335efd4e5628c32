#include "ucca/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

#include "ucca/kernels.hpp"

namespace ucca::nn {

namespace k = ucca::kernels;

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

Vec linear(const Parameter& W, const Parameter& b, std::span<const double> x) {
  if (W.cols() != x.size() || W.rows() != b.size()) throw std::invalid_argument("linear: shape mismatch for " + W.name);
  Vec y(b.value);
  k::gemv(W.value, W.rows(), W.cols(), x, y);
  return y;
}

void linear_backward(Parameter& W, Parameter& b, std::span<const double> x, std::span<const double> dy,
                     std::span<double> dx) {
  if (!W.frozen) k::ger(W.grad, W.rows(), W.cols(), dy, x);
  if (!b.frozen) k::axpy(1.0, dy, b.grad);
  if (!dx.empty()) k::gemv_t(W.value, W.rows(), W.cols(), dy, dx);
}

void relu_inplace(Vec& v) {
  for (double& x : v) x = x > 0 ? x : 0.0;
}

void relu_backward(std::span<const double> activated, std::span<double> dy) {
  for (std::size_t i = 0; i < dy.size(); ++i) {
    if (activated[i] <= 0) dy[i] = 0.0;
  }
}

void mlp_forward(const Parameter& W1, const Parameter& b1, const Parameter& W2, const Parameter& b2,
                 std::span<const double> x, MlpCache& cache) {
  cache.hidden = linear(W1, b1, x);
  relu_inplace(cache.hidden);
  cache.out = linear(W2, b2, cache.hidden);
}

void mlp_backward(Parameter& W1, Parameter& b1, Parameter& W2, Parameter& b2, std::span<const double> x,
                  const MlpCache& cache, std::span<const double> dout, std::span<double> dx) {
  Vec dh(cache.hidden.size(), 0.0);
  linear_backward(W2, b2, cache.hidden, dout, dh);
  relu_backward(cache.hidden, dh);
  linear_backward(W1, b1, x, dh, dx);
}

void biaffine_forward(const Parameter& W, std::span<const double> child, std::span<const double> parent,
                      BiaffineCache& cache) {
  if (W.shape.size() != 3 || W.shape[0] != child.size() + 1 || W.shape[2] != parent.size()) {
    throw std::invalid_argument("biaffine: shape mismatch");
  }
  const std::size_t A = W.shape[0], L = W.shape[1], dp = W.shape[2];
  cache.u.assign(A * L, 0.0);
  k::gemv(W.value, A * L, dp, parent, cache.u);
  cache.out.assign(L, 0.0);
  for (std::size_t a = 0; a < A; ++a) {
    double ca = a + 1 < A ? child[a] : 1.0;
    k::axpy(ca, std::span<const double>(cache.u).subspan(a * L, L), cache.out);
  }
}

void biaffine_backward(Parameter& W, std::span<const double> child, std::span<const double> parent,
                       const BiaffineCache& cache, std::span<const double> dout, std::span<double> dchild,
                       std::span<double> dparent) {
  const std::size_t A = W.shape[0], L = W.shape[1], dp = W.shape[2];
  // du[a,l] = c~_a * ds_l
  Vec du(A * L);
  for (std::size_t a = 0; a < A; ++a) {
    double ca = a + 1 < A ? child[a] : 1.0;
    for (std::size_t l = 0; l < L; ++l) du[a * L + l] = ca * dout[l];
  }
  if (!dchild.empty()) {
    for (std::size_t a = 0; a + 1 < A; ++a) {
      dchild[a] += k::dot(std::span<const double>(cache.u).subspan(a * L, L), dout);
    }
  }
  if (!W.frozen) k::ger(W.grad, A * L, dp, du, parent);
  if (!dparent.empty()) k::gemv_t(W.value, A * L, dp, du, dparent);
}

namespace {

void check_lstm_shapes(const Parameter& Wx, const Parameter& Wh, const Parameter& b) {
  std::size_t H = Wh.cols();
  if (Wx.rows() != 4 * H || Wh.rows() != 4 * H || b.size() != 4 * H) {
    throw std::invalid_argument("lstm: shape mismatch for " + Wx.name);
  }
}

}  // namespace

LstmTrace lstm_forward(const Parameter& Wx, const Parameter& Wh, const Parameter& b, const std::vector<Vec>& inputs) {
  check_lstm_shapes(Wx, Wh, b);
  const std::size_t H = Wh.cols();
  const std::size_t in = Wx.cols();
  LstmTrace trace;
  trace.gates.reserve(inputs.size());
  trace.cell.reserve(inputs.size());
  trace.hidden.reserve(inputs.size());
  Vec h(H, 0.0), c(H, 0.0);
  for (const Vec& x : inputs) {
    if (x.size() != in) throw std::invalid_argument("lstm: input width mismatch for " + Wx.name);
    Vec a(b.value);
    k::gemv(Wx.value, 4 * H, in, x, a);
    k::gemv(Wh.value, 4 * H, H, h, a);
    for (std::size_t j = 0; j < 3 * H; ++j) a[j] = sigmoid(a[j]);
    for (std::size_t j = 3 * H; j < 4 * H; ++j) a[j] = std::tanh(a[j]);
    for (std::size_t j = 0; j < H; ++j) {
      c[j] = a[H + j] * c[j] + a[j] * a[3 * H + j];
      h[j] = a[2 * H + j] * std::tanh(c[j]);
    }
    trace.gates.push_back(std::move(a));
    trace.cell.push_back(c);
    trace.hidden.push_back(h);
  }
  return trace;
}

std::vector<Vec> lstm_backward(Parameter& Wx, Parameter& Wh, Parameter& b, const std::vector<Vec>& inputs,
                               const LstmTrace& trace, const std::vector<Vec>& dh_out) {
  const std::size_t H = Wh.cols();
  const std::size_t in = Wx.cols();
  const std::size_t T = inputs.size();
  std::vector<Vec> dx(T, Vec(in, 0.0));
  Vec dh_next(H, 0.0), dc_next(H, 0.0);
  const Vec zeros(H, 0.0);
  Vec da(4 * H);
  for (std::size_t t = T; t-- > 0;) {
    const Vec& g = trace.gates[t];
    const Vec& c = trace.cell[t];
    const Vec& c_prev = t > 0 ? trace.cell[t - 1] : zeros;
    const Vec& h_prev = t > 0 ? trace.hidden[t - 1] : zeros;
    for (std::size_t j = 0; j < H; ++j) {
      double dh = dh_out[t][j] + dh_next[j];
      double i = g[j], f = g[H + j], o = g[2 * H + j], gg = g[3 * H + j];
      double tc = std::tanh(c[j]);
      double dc = dc_next[j] + dh * o * (1.0 - tc * tc);
      da[j] = dc * gg * i * (1.0 - i);
      da[H + j] = dc * c_prev[j] * f * (1.0 - f);
      da[2 * H + j] = dh * tc * o * (1.0 - o);
      da[3 * H + j] = dc * i * (1.0 - gg * gg);
      dc_next[j] = dc * f;
    }
    if (!Wx.frozen) k::ger(Wx.grad, 4 * H, in, da, inputs[t]);
    if (!Wh.frozen) k::ger(Wh.grad, 4 * H, H, da, h_prev);
    if (!b.frozen) k::axpy(1.0, da, b.grad);
    k::gemv_t(Wx.value, 4 * H, in, da, dx[t]);
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    k::gemv_t(Wh.value, 4 * H, H, da, dh_next);
  }
  return dx;
}

}  // namespace ucca::nn
