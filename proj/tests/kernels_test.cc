#include "gtest/gtest.h"

#include <cmath>
#include <random>
#include <vector>

#include "ucca/kernels.hpp"

using namespace ucca::kernels;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

void expect_close(const std::vector<double>& a, const std::vector<double>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12 * (1.0 + std::abs(a[i]))) << i;
}

class KernelEquivalence : public ::testing::TestWithParam<std::size_t> {
 protected:
  void SetUp() override {
    simd_ = avx2_kernels();
    if (!simd_) GTEST_SKIP() << "no AVX2 on this machine";
  }
  const KernelTable& ref_ = scalar_kernels();
  const KernelTable* simd_ = nullptr;
  std::mt19937_64 rng_{GetParam()};
};

}  // namespace

TEST_P(KernelEquivalence, Dot) {
  std::size_t n = GetParam();
  auto a = random_vector(rng_, n);
  auto b = random_vector(rng_, n);
  EXPECT_NEAR(ref_.dot(a.data(), b.data(), n), simd_->dot(a.data(), b.data(), n), 1e-12 * (1.0 + n));
}

TEST_P(KernelEquivalence, Axpy) {
  std::size_t n = GetParam();
  auto x = random_vector(rng_, n);
  auto y1 = random_vector(rng_, n);
  auto y2 = y1;
  ref_.axpy(0.37, x.data(), y1.data(), n);
  simd_->axpy(0.37, x.data(), y2.data(), n);
  expect_close(y1, y2);
}

TEST_P(KernelEquivalence, GemvAndTranspose) {
  std::size_t cols = GetParam();
  std::size_t rows = cols / 2 + 3;
  auto w = random_vector(rng_, rows * cols);
  auto x = random_vector(rng_, cols);
  auto y = random_vector(rng_, rows);
  auto y1 = y, y2 = y;
  ref_.gemv(w.data(), rows, cols, x.data(), y1.data());
  simd_->gemv(w.data(), rows, cols, x.data(), y2.data());
  expect_close(y1, y2);
  auto x1 = x, x2 = x;
  ref_.gemv_t(w.data(), rows, cols, y.data(), x1.data());
  simd_->gemv_t(w.data(), rows, cols, y.data(), x2.data());
  expect_close(x1, x2);
  auto a1 = w, a2 = w;
  ref_.ger(a1.data(), rows, cols, y.data(), x.data());
  simd_->ger(a2.data(), rows, cols, y.data(), x.data());
  expect_close(a1, a2);
}

TEST_P(KernelEquivalence, Adam) {
  std::size_t n = GetParam();
  auto p1 = random_vector(rng_, n);
  auto g = random_vector(rng_, n);
  std::vector<double> m1(n, 0.1), v1(n, 0.2);
  auto p2 = p1, m2 = m1, v2 = v1;
  AdamCoeffs c;
  c.bias1 = 1 - std::pow(c.beta1, 3);
  c.bias2 = 1 - std::pow(c.beta2, 3);
  ref_.adam(p1.data(), m1.data(), v1.data(), g.data(), n, c);
  simd_->adam(p2.data(), m2.data(), v2.data(), g.data(), n, c);
  expect_close(p1, p2);
  expect_close(m1, m2);
  expect_close(v1, v2);
}

INSTANTIATE_TEST_SUITE_P(Sizes, KernelEquivalence, ::testing::Values(0, 1, 3, 4, 7, 16, 17, 33, 250, 1001));

TEST(KernelSelection, ScalarAlwaysAvailable) {
  const KernelTable& before = active();
  EXPECT_TRUE(select("scalar"));
  EXPECT_STREQ(active().name, "scalar");
  EXPECT_FALSE(select("neon"));
  EXPECT_TRUE(select("auto"));
  EXPECT_STREQ(active().name, avx2_kernels() ? "avx2" : "scalar");
  select(before.name);
}

TEST(KernelSelection, GemvMatchesNaive) {
  // W = [[1,2],[3,4],[5,6]], x = [1,-1]
  std::vector<double> w{1, 2, 3, 4, 5, 6}, x{1, -1}, y{10, 0, 0};
  gemv(w, 3, 2, x, y);
  EXPECT_EQ(y, (std::vector<double>{9, -1, -1}));
  std::vector<double> xt{0, 0};
  gemv_t(w, 3, 2, std::vector<double>{1, 0, 1}, xt);
  EXPECT_EQ(xt, (std::vector<double>{6, 8}));
}
