#include <cmath>
#include <functional>
#include <vector>

#include "avsal/nn.hpp"
#include "avsal/rng.hpp"
#include "doctest.h"

using namespace avsal;
using nn::Tensor;

namespace {

// All gradient checks run in double: central differences against the
// analytic backward pass, elementwise relative error under tol.
constexpr double kFdStep = 1e-5;
constexpr double kFdTol = 1e-6;

Tensor<double> random_tensor(Rng& rng, std::vector<int> shape) {
  Tensor<double> t(std::move(shape));
  for (auto& v : t.data) v = rng.uniform(-1.0, 1.0);
  return t;
}

// Weighted-sum loss L = sum_i r_i * y_i with fixed random weights; its
// gradient wrt y is just r, which seeds the backward pass.
struct ProbeLoss {
  std::vector<double> r;
  explicit ProbeLoss(Rng& rng, int64_t n) : r(static_cast<size_t>(n)) {
    for (auto& v : r) v = rng.uniform(-1.0, 1.0);
  }
  double value(const Tensor<double>& y) const {
    double acc = 0.0;
    for (size_t i = 0; i < y.data.size(); ++i) acc += r[i] * y.data[i];
    return acc;
  }
  Tensor<double> seed(const std::vector<int>& shape) const {
    Tensor<double> g(shape);
    g.data.assign(r.begin(), r.end());
    return g;
  }
};

void check_close(double got, double want, double tol = kFdTol) {
  double scale = std::max({1.0, std::abs(got), std::abs(want)});
  CHECK(std::abs(got - want) / scale < tol);
}

// Central-difference derivative of `loss_of` wrt *p.
double fd(double* p, const std::function<double()>& loss_of) {
  double keep = *p;
  *p = keep + kFdStep;
  double up = loss_of();
  *p = keep - kFdStep;
  double dn = loss_of();
  *p = keep;
  return (up - dn) / (2.0 * kFdStep);
}

}  // namespace

TEST_CASE("conv3d output dims follow the pad-1 kernel-3 formula") {
  CHECK(nn::Conv3d<double>::out_dim(16, 2) == 8);
  CHECK(nn::Conv3d<double>::out_dim(8, 2) == 4);
  CHECK(nn::Conv3d<double>::out_dim(1, 1) == 1);
  CHECK(nn::Conv3d<double>::out_dim(64, 2) == 32);
  CHECK(nn::Conv3d<double>::out_dim(5, 1) == 5);
}

TEST_CASE("conv3d with a centered delta kernel is a strided copy") {
  nn::Conv3d<double> conv(1, 1, 1, 1);
  conv.w[13] = 1.0;  // kd=1, ky=1, kx=1: the center tap
  Rng rng(substream_seed(50, "nn"));
  auto x = random_tensor(rng, {1, 1, 3, 4, 4});
  auto y = conv.forward(x);
  REQUIRE(y.shape == x.shape);
  for (size_t i = 0; i < x.data.size(); ++i) CHECK(y.data[i] == doctest::Approx(x.data[i]));
}

TEST_CASE("conv3d gradients match finite differences") {
  Rng rng(substream_seed(51, "nn"));
  nn::Conv3d<double> conv(2, 3, 2, 2);
  for (auto& v : conv.w) v = rng.uniform(-0.5, 0.5);
  auto x = random_tensor(rng, {2, 2, 4, 6, 6});
  auto y0 = conv.forward(x);
  ProbeLoss loss(rng, y0.numel());

  std::fill(conv.gw.begin(), conv.gw.end(), 0.0);
  auto gx = conv.backward(loss.seed(y0.shape));

  auto loss_of = [&] { return loss.value(conv.forward(x)); };
  for (size_t i = 0; i < conv.w.size(); i += 7) {
    check_close(conv.gw[i], fd(&conv.w[i], loss_of));
  }
  for (size_t i = 0; i < x.data.size(); i += 23) {
    check_close(gx.data[i], fd(&x.data[i], loss_of));
  }
}

TEST_CASE("conv2d 1x1 is a pixelwise linear map and its gradients check out") {
  Rng rng(substream_seed(52, "nn"));
  nn::Conv2d<double> conv(3, 2, 1, true);
  for (auto& v : conv.w) v = rng.uniform(-0.5, 0.5);
  for (auto& v : conv.b) v = rng.uniform(-0.5, 0.5);
  auto x = random_tensor(rng, {2, 3, 4, 5});
  auto y = conv.forward(x);
  // Spot-check one output pixel by hand.
  double want = conv.b[1];
  for (int ic = 0; ic < 3; ++ic) {
    want += conv.w[static_cast<size_t>(1) * 3 + ic] *
            x.data[static_cast<size_t>((0 * 3 + ic) * 4 + 2) * 5 + 3];
  }
  CHECK(y.data[static_cast<size_t>((0 * 2 + 1) * 4 + 2) * 5 + 3] == doctest::Approx(want));

  ProbeLoss loss(rng, y.numel());
  std::fill(conv.gw.begin(), conv.gw.end(), 0.0);
  std::fill(conv.gb.begin(), conv.gb.end(), 0.0);
  auto gx = conv.backward(loss.seed(y.shape));
  auto loss_of = [&] { return loss.value(conv.forward(x)); };
  for (size_t i = 0; i < conv.w.size(); ++i) check_close(conv.gw[i], fd(&conv.w[i], loss_of));
  for (size_t i = 0; i < conv.b.size(); ++i) check_close(conv.gb[i], fd(&conv.b[i], loss_of));
  for (size_t i = 0; i < x.data.size(); i += 11) check_close(gx.data[i], fd(&x.data[i], loss_of));
}

TEST_CASE("conv2d 3x3 same-padding gradients match finite differences") {
  Rng rng(substream_seed(53, "nn"));
  nn::Conv2d<double> conv(2, 2, 3, false);
  for (auto& v : conv.w) v = rng.uniform(-0.5, 0.5);
  auto x = random_tensor(rng, {1, 2, 5, 6});
  auto y = conv.forward(x);
  CHECK(y.shape == std::vector<int>({1, 2, 5, 6}));
  ProbeLoss loss(rng, y.numel());
  std::fill(conv.gw.begin(), conv.gw.end(), 0.0);
  auto gx = conv.backward(loss.seed(y.shape));
  auto loss_of = [&] { return loss.value(conv.forward(x)); };
  for (size_t i = 0; i < conv.w.size(); i += 3) check_close(conv.gw[i], fd(&conv.w[i], loss_of));
  for (size_t i = 0; i < x.data.size(); i += 7) check_close(gx.data[i], fd(&x.data[i], loss_of));
}

TEST_CASE("batch norm normalizes to zero mean unit variance in training mode") {
  Rng rng(substream_seed(54, "nn"));
  nn::BatchNorm<double> bn(3);
  auto x = random_tensor(rng, {4, 3, 5});
  for (auto& v : x.data) v = 2.0 * v + 1.0;
  auto y = bn.forward(x, true, false);
  for (int c = 0; c < 3; ++c) {
    double mu = 0.0, var = 0.0;
    int64_t cnt = 0;
    for (int b = 0; b < 4; ++b) {
      for (int i = 0; i < 5; ++i) {
        mu += y.data[static_cast<size_t>((b * 3 + c) * 5 + i)];
        ++cnt;
      }
    }
    mu /= cnt;
    for (int b = 0; b < 4; ++b) {
      for (int i = 0; i < 5; ++i) {
        double d = y.data[static_cast<size_t>((b * 3 + c) * 5 + i)] - mu;
        var += d * d;
      }
    }
    var /= cnt;
    CHECK(mu == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(var == doctest::Approx(1.0).epsilon(1e-4));  // eps shifts it slightly
  }
}

TEST_CASE("batch norm running statistics blend with momentum 0.1") {
  nn::BatchNorm<double> bn(1);
  Tensor<double> x({2, 1, 2});
  x.data = {1.0, 3.0, 5.0, 7.0};  // mean 4, population var 5
  bn.forward(x, true, true);
  CHECK(bn.running_mean[0] == doctest::Approx(0.9 * 0.0 + 0.1 * 4.0));
  CHECK(bn.running_var[0] == doctest::Approx(0.9 * 1.0 + 0.1 * 5.0));
  // Eval mode uses them instead of batch stats.
  auto y = bn.forward(x, false, false);
  double istd = 1.0 / std::sqrt(bn.running_var[0] + 1e-5);
  CHECK(y.data[0] == doctest::Approx((1.0 - bn.running_mean[0]) * istd));
}

TEST_CASE("batch norm gradients match finite differences") {
  Rng rng(substream_seed(55, "nn"));
  nn::BatchNorm<double> bn(2);
  for (auto& v : bn.gamma) v = rng.uniform(0.5, 1.5);
  for (auto& v : bn.beta) v = rng.uniform(-0.5, 0.5);
  auto x = random_tensor(rng, {3, 2, 4});
  auto y = bn.forward(x, true, false);
  ProbeLoss loss(rng, y.numel());
  std::fill(bn.g_gamma.begin(), bn.g_gamma.end(), 0.0);
  std::fill(bn.g_beta.begin(), bn.g_beta.end(), 0.0);
  auto gx = bn.backward(loss.seed(y.shape));
  auto loss_of = [&] { return loss.value(bn.forward(x, true, false)); };
  for (size_t i = 0; i < bn.gamma.size(); ++i) check_close(bn.g_gamma[i], fd(&bn.gamma[i], loss_of));
  for (size_t i = 0; i < bn.beta.size(); ++i) check_close(bn.g_beta[i], fd(&bn.beta[i], loss_of));
  for (size_t i = 0; i < x.data.size(); ++i) check_close(gx.data[i], fd(&x.data[i], loss_of));
}

TEST_CASE("relu forward and backward") {
  nn::Relu<double> relu;
  Tensor<double> x({1, 1, 4});
  x.data = {-1.0, 0.0, 0.5, 2.0};
  auto y = relu.forward(x);
  CHECK(y.data == std::vector<double>({0.0, 0.0, 0.5, 2.0}));
  Tensor<double> gy({1, 1, 4});
  gy.data = {1.0, 1.0, 1.0, 1.0};
  auto gx = relu.backward(gy);
  CHECK(gx.data == std::vector<double>({0.0, 0.0, 1.0, 1.0}));
}

TEST_CASE("upsample2x interpolates with half-pixel centers and clamped edges") {
  nn::Upsample2x<double> up;
  Tensor<double> x({1, 1, 1, 2});
  x.data = {1.0, 3.0};
  auto y = up.forward(x);
  REQUIRE(y.shape == std::vector<int>({1, 1, 2, 4}));
  // src = o/2 - 0.25: edge replication at both ends, 1/4-3/4 blends inside.
  CHECK(y.data[0] == doctest::Approx(1.0));
  CHECK(y.data[1] == doctest::Approx(1.5));
  CHECK(y.data[2] == doctest::Approx(2.5));
  CHECK(y.data[3] == doctest::Approx(3.0));
  // Second row repeats the first (height 1 clamps vertically).
  CHECK(y.data[4] == doctest::Approx(1.0));
  CHECK(y.data[7] == doctest::Approx(3.0));
}

TEST_CASE("upsample2x backward is the exact adjoint of forward") {
  Rng rng(substream_seed(56, "nn"));
  nn::Upsample2x<double> up;
  auto x = random_tensor(rng, {2, 3, 4, 5});
  auto y = up.forward(x);
  auto gy = random_tensor(rng, y.shape);
  auto gx = up.backward(gy);
  // <forward(x), gy> == <x, backward(gy)> for a linear operator.
  double lhs = 0.0, rhs = 0.0;
  for (size_t i = 0; i < y.data.size(); ++i) lhs += y.data[i] * gy.data[i];
  for (size_t i = 0; i < x.data.size(); ++i) rhs += x.data[i] * gx.data[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("global average pool and its gradient") {
  Rng rng(substream_seed(57, "nn"));
  nn::GlobalAvgPool<double> gap;
  auto x = random_tensor(rng, {2, 3, 4, 5});
  auto y = gap.forward(x);
  REQUIRE(y.shape == std::vector<int>({2, 3}));
  double want = 0.0;
  for (int i = 0; i < 20; ++i) want += x.data[static_cast<size_t>(20 + i)];  // b=0, c=1
  CHECK(y.data[1] == doctest::Approx(want / 20.0));

  ProbeLoss loss(rng, y.numel());
  auto gx = gap.backward(loss.seed(y.shape));
  auto loss_of = [&] { return loss.value(gap.forward(x)); };
  for (size_t i = 0; i < x.data.size(); i += 9) check_close(gx.data[i], fd(&x.data[i], loss_of));
}

TEST_CASE("spatial softmax yields a distribution and correct gradients") {
  Rng rng(substream_seed(58, "nn"));
  nn::SpatialSoftmax<double> sm;
  auto x = random_tensor(rng, {2, 1, 3, 4});
  for (auto& v : x.data) v *= 5.0;  // exercise the max-shift stability path
  auto y = sm.forward(x);
  for (int b = 0; b < 2; ++b) {
    double sum = 0.0;
    for (int i = 0; i < 12; ++i) sum += y.data[static_cast<size_t>(b * 12 + i)];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  ProbeLoss loss(rng, y.numel());
  auto gx = sm.backward(loss.seed(y.shape));
  auto loss_of = [&] { return loss.value(sm.forward(x)); };
  for (size_t i = 0; i < x.data.size(); ++i) check_close(gx.data[i], fd(&x.data[i], loss_of));
}

TEST_CASE("softmax is shift invariant") {
  nn::SpatialSoftmax<double> sm;
  Tensor<double> x({1, 1, 2, 2});
  x.data = {1.0, 2.0, 3.0, 4.0};
  auto a = sm.forward(x);
  for (auto& v : x.data) v += 100.0;
  auto b = sm.forward(x);
  for (size_t i = 0; i < 4; ++i) CHECK(a.data[i] == doctest::Approx(b.data[i]).epsilon(1e-12));
}
