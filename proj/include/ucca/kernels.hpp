#pragma once

// Dense fp64 inner loops used by the neural core. A scalar reference table is
// always present; an AVX2+FMA table is built on x86-64 and chosen at runtime
// when the CPU supports it. UCCA_KERNELS=scalar|avx2|auto overrides the choice.

#include <cstddef>
#include <span>
#include <string_view>

namespace ucca::kernels {

struct AdamCoeffs {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double bias1 = 1.0;  // 1 - beta1^t
  double bias2 = 1.0;  // 1 - beta2^t
};

struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y += W x, W row-major rows x cols
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y);
  // x += W^T y
  void (*gemv_t)(const double* w, std::size_t rows, std::size_t cols, const double* y, double* x);
  // A += y x^T
  void (*ger)(double* a, std::size_t rows, std::size_t cols, const double* y, const double* x);
  void (*adam)(double* param, double* m, double* v, const double* grad, std::size_t n, const AdamCoeffs& c);
};

const KernelTable& scalar_kernels();
// nullptr when the variant was not built or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

const KernelTable& active();
// "scalar", "avx2" or "auto"; false if the request cannot be honoured.
bool select(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) { return active().dot(a.data(), b.data(), a.size()); }

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void gemv(std::span<const double> w, std::size_t rows, std::size_t cols, std::span<const double> x,
                 std::span<double> y) {
  active().gemv(w.data(), rows, cols, x.data(), y.data());
}

inline void gemv_t(std::span<const double> w, std::size_t rows, std::size_t cols, std::span<const double> y,
                   std::span<double> x) {
  active().gemv_t(w.data(), rows, cols, y.data(), x.data());
}

inline void ger(std::span<double> a, std::size_t rows, std::size_t cols, std::span<const double> y,
                std::span<const double> x) {
  active().ger(a.data(), rows, cols, y.data(), x.data());
}

}  // namespace ucca::kernels
