#include <cmath>

#include "ucca/kernels.hpp"

namespace ucca::kernels {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot(w + r * cols, x, cols);
}

void gemv_t(const double* w, std::size_t rows, std::size_t cols, const double* y, double* x) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (y[r] != 0.0) axpy(y[r], w + r * cols, x, cols);
  }
}

void ger(double* a, std::size_t rows, std::size_t cols, const double* y, const double* x) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (y[r] != 0.0) axpy(y[r], x, a + r * cols, cols);
  }
}

void adam(double* param, double* m, double* v, const double* grad, std::size_t n, const AdamCoeffs& c) {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    m[i] = c.beta1 * m[i] + one_minus_b1 * g;
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g * g);
    const double m_hat = m[i] / c.bias1;
    const double v_hat = v[i] / c.bias2;
    param[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

constexpr KernelTable kScalar{"scalar", dot, axpy, gemv, gemv_t, ger, adam};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace ucca::kernels
