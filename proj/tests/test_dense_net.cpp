#include <doctest.h>

#include <cmath>
#include <random>

#include "gapflow/rl/dense_net.hpp"

using namespace gapflow::rl;

namespace {

double act(Activation a, double z) {
  switch (a) {
    case Activation::relu: return z > 0 ? z : 0.0;
    case Activation::tanh: return std::tanh(z);
    case Activation::linear: return z;
  }
  return z;
}

// Loop-based forward pass without Eigen products.
std::vector<double> reference_forward(const DenseNet& net, std::vector<double> x) {
  for (const auto& layer : net.layers()) {
    std::vector<double> y(static_cast<std::size_t>(layer.weights.rows()));
    for (int o = 0; o < layer.weights.rows(); ++o) {
      double z = layer.bias(o);
      for (int i = 0; i < layer.weights.cols(); ++i) z += layer.weights(o, i) * x[static_cast<std::size_t>(i)];
      y[static_cast<std::size_t>(o)] = act(layer.activation, z);
    }
    x = std::move(y);
  }
  return x;
}

double objective(const DenseNet& net, const Matrix& input, const Matrix& grad_out) {
  return (net.evaluate(input).array() * grad_out.array()).sum();
}

double rel_error(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Largest relative error between backprop and central differences over all
// parameters and inputs.
double finite_difference_error(DenseNet net, const Matrix& input, const Matrix& grad_out) {
  const double h = 1e-5;
  const auto fwd = forward(net, input);
  const Gradients g = backward(net, fwd.cache, grad_out);
  double worst = 0.0;
  auto& layers = net.mutable_layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (int r = 0; r < layers[l].weights.rows(); ++r) {
      for (int c = 0; c < layers[l].weights.cols(); ++c) {
        double& w = layers[l].weights(r, c);
        const double saved = w;
        w = saved + h;
        const double up = objective(net, input, grad_out);
        w = saved - h;
        const double down = objective(net, input, grad_out);
        w = saved;
        worst = std::max(worst, rel_error(g.weights[l](r, c), (up - down) / (2 * h)));
      }
      double& b = layers[l].bias(r);
      const double saved = b;
      b = saved + h;
      const double up = objective(net, input, grad_out);
      b = saved - h;
      const double down = objective(net, input, grad_out);
      b = saved;
      worst = std::max(worst, rel_error(g.bias[l](r), (up - down) / (2 * h)));
    }
  }
  Matrix x = input;
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < x.cols(); ++c) {
      const double saved = x(r, c);
      x(r, c) = saved + h;
      const double up = objective(net, x, grad_out);
      x(r, c) = saved - h;
      const double down = objective(net, x, grad_out);
      x(r, c) = saved;
      worst = std::max(worst, rel_error(g.input(r, c), (up - down) / (2 * h)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("zero network emits zeros") {
  DenseNet net({3, 4, 2}, Activation::relu, Activation::tanh);
  Vector x(3);
  x << 1, -2, 3;
  CHECK(net.evaluate(x).isZero(0.0));
}

TEST_CASE("1x1 linear identity") {
  DenseNet net({1, 1}, Activation::linear, Activation::linear);
  net.mutable_layers()[0].weights(0, 0) = 1.0;
  Vector x(1);
  x << 3.0;
  CHECK(net.evaluate(x)(0) == 3.0);
}

TEST_CASE("forward matches an independent implementation") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 50; ++trial) {
    DenseNet net({2, 3, 1}, trial % 2 ? Activation::tanh : Activation::relu, Activation::tanh);
    net.initialize(rng, 1.0);
    for (auto& layer : net.mutable_layers()) layer.bias = Vector::NullaryExpr(layer.bias.size(), [&] { return n01(rng); });
    Vector x(2);
    x << n01(rng), n01(rng);
    const auto ref = reference_forward(net, {x(0), x(1)});
    CHECK(net.evaluate(x)(0) == doctest::Approx(ref[0]).epsilon(1e-12));
    CHECK(forward(net, Matrix(x)).output(0, 0) == doctest::Approx(ref[0]).epsilon(1e-12));
  }
}

TEST_CASE("input size mismatch is rejected") {
  DenseNet net({3, 2}, Activation::relu, Activation::linear);
  CHECK_THROWS_AS(forward(net, Matrix::Zero(2, 1)), std::invalid_argument);
}

TEST_CASE("backprop agrees with central differences on a 4-8-8-2 net") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    DenseNet net({4, 8, 8, 2}, Activation::tanh, Activation::linear);
    net.initialize(rng, 0.5);
    const Matrix x = Matrix::NullaryExpr(4, 3, [&] { return n01(rng); });
    const Matrix gy = Matrix::NullaryExpr(2, 3, [&] { return n01(rng); });
    CHECK(finite_difference_error(net, x, gy) < 1e-4);
  }
}

TEST_CASE("backprop through relu layers") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    DenseNet net({5, 6, 4, 1}, Activation::relu, Activation::tanh);
    net.initialize(rng, 0.5);
    const Matrix x = Matrix::NullaryExpr(5, 2, [&] { return n01(rng); });
    const Matrix gy = Matrix::Ones(1, 2);
    CHECK(finite_difference_error(net, x, gy) < 1e-4);
  }
}

TEST_CASE("zero upstream gradient gives zero gradients") {
  std::mt19937_64 rng(1);
  DenseNet net({3, 5, 2}, Activation::relu, Activation::tanh);
  net.initialize(rng);
  const auto fwd = forward(net, Matrix::Ones(3, 1));
  CHECK(backward(net, fwd.cache, Matrix::Zero(2, 1)).max_abs() == 0.0);
}

TEST_CASE("single linear layer weight gradient equals the input") {
  DenseNet net({3, 1}, Activation::linear, Activation::linear);
  Matrix x(3, 1);
  x << 0.5, -1.5, 2.0;
  const auto fwd = forward(net, x);
  const auto g = backward(net, fwd.cache, Matrix::Ones(1, 1));
  CHECK(g.weights[0].transpose() == x);
  CHECK(g.bias[0](0) == 1.0);
}

TEST_CASE("a cache goes stale once parameters change") {
  std::mt19937_64 rng(2);
  DenseNet net({2, 2}, Activation::linear, Activation::linear);
  net.initialize(rng);
  const auto fwd = forward(net, Matrix::Ones(2, 1));
  net.mutable_layers()[0].bias(0) += 1.0;
  CHECK_THROWS_AS(backward(net, fwd.cache, Matrix::Ones(2, 1)), std::logic_error);
  DenseNet other = net;
  const auto fresh = forward(net, Matrix::Ones(2, 1));
  CHECK_THROWS_AS(backward(other, fresh.cache, Matrix::Ones(2, 1)), std::logic_error);
}

TEST_CASE("soft update") {
  std::mt19937_64 rng(3);
  DenseNet online({4, 3, 2}, Activation::relu, Activation::tanh);
  DenseNet target = online;
  online.initialize(rng, 0.1);
  target.initialize(rng, 0.1);
  const DenseNet before = target;

  SUBCASE("tau 0 keeps the target") {
    soft_update(target, online, 0.0);
    for (std::size_t l = 0; l < target.layers().size(); ++l) {
      CHECK(target.layers()[l].weights == before.layers()[l].weights);
      CHECK(target.layers()[l].bias == before.layers()[l].bias);
    }
  }
  SUBCASE("tau 1 copies the online net") {
    soft_update(target, online, 1.0);
    for (std::size_t l = 0; l < target.layers().size(); ++l) {
      CHECK(target.layers()[l].weights == online.layers()[l].weights);
      CHECK(target.layers()[l].bias == online.layers()[l].bias);
    }
  }
  SUBCASE("tau 0.001 blends elementwise exactly") {
    const double tau = 0.001;
    soft_update(target, online, tau);
    for (std::size_t l = 0; l < target.layers().size(); ++l) {
      const auto& w = target.layers()[l].weights;
      for (int i = 0; i < w.size(); ++i) {
        const double expected = tau * online.layers()[l].weights.data()[i] +
                                (1.0 - tau) * before.layers()[l].weights.data()[i];
        CHECK(w.data()[i] == expected);
      }
    }
  }
  SUBCASE("scalar case") {
    DenseNet a({1, 1}, Activation::linear, Activation::linear);
    DenseNet b = a;
    a.mutable_layers()[0].weights(0, 0) = 1.0;
    soft_update(b, a, 0.001);
    CHECK(b.layers()[0].weights(0, 0) == 0.001);
  }
  SUBCASE("shape mismatch") {
    DenseNet wrong({4, 2, 2}, Activation::relu, Activation::tanh);
    CHECK_THROWS_AS(soft_update(wrong, online, 0.5), std::invalid_argument);
  }
}
