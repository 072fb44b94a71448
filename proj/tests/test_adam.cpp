#include <doctest.h>

#include <cmath>
#include <limits>

#include "gapflow/rl/adam.hpp"

using namespace gapflow::rl;

namespace {

DenseNet scalar_net(double w, double b) {
  DenseNet net({1, 1}, Activation::linear, Activation::linear);
  net.mutable_layers()[0].weights(0, 0) = w;
  net.mutable_layers()[0].bias(0) = b;
  return net;
}

Gradients scalar_grad(const DenseNet& net, double gw, double gb) {
  auto g = Gradients::zeros_like(net);
  g.weights[0](0, 0) = gw;
  g.bias[0](0) = gb;
  return g;
}

}  // namespace

TEST_CASE("zero gradient leaves parameters unchanged") {
  auto net = scalar_net(0.7, -0.2);
  auto state = AdamState::for_net(net);
  adam_step(net, Gradients::zeros_like(net), state, 1e-3);
  CHECK(net.layers()[0].weights(0, 0) == 0.7);
  CHECK(net.layers()[0].bias(0) == -0.2);
  CHECK(state.step == 1);
}

TEST_CASE("first step moves by lr against the gradient sign") {
  for (const double g : {1e-4, 0.3, 250.0, -7.0}) {
    auto net = scalar_net(0.0, 0.0);
    auto state = AdamState::for_net(net);
    adam_step(net, scalar_grad(net, g, -g), state, 1e-3);
    CHECK(net.layers()[0].weights(0, 0) == doctest::Approx(-1e-3 * (g > 0 ? 1 : -1)).epsilon(1e-3));
    CHECK(net.layers()[0].bias(0) == doctest::Approx(1e-3 * (g > 0 ? 1 : -1)).epsilon(1e-3));
  }
}

TEST_CASE("three steps follow the bias-corrected recurrence") {
  const double grads[3] = {0.5, -1.2, 0.05};
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double theta = 1.0, m = 0.0, v = 0.0;
  auto net = scalar_net(theta, 0.0);
  auto state = AdamState::for_net(net);
  for (int t = 1; t <= 3; ++t) {
    const double g = grads[t - 1];
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mhat = m / (1 - std::pow(b1, t));
    const double vhat = v / (1 - std::pow(b2, t));
    theta -= lr * mhat / (std::sqrt(vhat) + eps);
    adam_step(net, scalar_grad(net, g, 0.0), state, lr);
    CHECK(net.layers()[0].weights(0, 0) == doctest::Approx(theta).epsilon(1e-12));
  }
}

TEST_CASE("non-finite gradients are rejected") {
  auto net = scalar_net(0.0, 0.0);
  auto state = AdamState::for_net(net);
  CHECK_THROWS_WITH_AS(adam_step(net, scalar_grad(net, std::nan(""), 0.0), state, 1e-3),
                       "non-finite gradient", std::invalid_argument);
  CHECK_THROWS_AS(adam_step(net, scalar_grad(net, 0.0, std::numeric_limits<double>::infinity()), state, 1e-3),
                  std::invalid_argument);
  CHECK(net.layers()[0].weights(0, 0) == 0.0);
}

TEST_CASE("state shaped for another net is rejected") {
  auto net = scalar_net(0.0, 0.0);
  DenseNet other({2, 1}, Activation::linear, Activation::linear);
  auto state = AdamState::for_net(other);
  CHECK_FALSE(state.matches(net));
  CHECK_THROWS_AS(adam_step(net, Gradients::zeros_like(net), state, 1e-3), std::invalid_argument);
}
