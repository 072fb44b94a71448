#include "gapflow/rl/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace gapflow::rl {

AdamState AdamState::for_net(const DenseNet& net) {
  AdamState s;
  for (const auto& layer : net.layers()) {
    s.m_weights.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
    s.v_weights.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
    s.m_bias.push_back(Vector::Zero(layer.bias.size()));
    s.v_bias.push_back(Vector::Zero(layer.bias.size()));
  }
  return s;
}

bool AdamState::matches(const DenseNet& net) const {
  const auto& layers = net.layers();
  if (m_weights.size() != layers.size() || v_weights.size() != layers.size() ||
      m_bias.size() != layers.size() || v_bias.size() != layers.size()) {
    return false;
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (m_weights[l].rows() != layers[l].weights.rows() ||
        m_weights[l].cols() != layers[l].weights.cols() ||
        m_bias[l].size() != layers[l].bias.size()) {
      return false;
    }
  }
  return true;
}

namespace {

template <typename Param>
void update(Param& theta, const Param& g, Param& m, Param& v, double lr, double c1, double c2,
            const AdamConfig& cfg) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
  theta.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.epsilon);
}

}  // namespace

void adam_step(DenseNet& net, const Gradients& grads, AdamState& state, double lr,
               const AdamConfig& config) {
  const auto& layers = net.layers();
  if (!state.matches(net) || grads.weights.size() != layers.size() ||
      grads.bias.size() != layers.size()) {
    throw std::invalid_argument("adam_step shape mismatch");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (grads.weights[l].rows() != layers[l].weights.rows() ||
        grads.weights[l].cols() != layers[l].weights.cols() ||
        grads.bias[l].size() != layers[l].bias.size()) {
      throw std::invalid_argument("adam_step shape mismatch");
    }
    if (!grads.weights[l].allFinite() || !grads.bias[l].allFinite()) {
      throw std::invalid_argument("non-finite gradient");
    }
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  auto& params = net.mutable_layers();
  for (std::size_t l = 0; l < params.size(); ++l) {
    update(params[l].weights, grads.weights[l], state.m_weights[l], state.v_weights[l], lr, c1,
           c2, config);
    update(params[l].bias, grads.bias[l], state.m_bias[l], state.v_bias[l], lr, c1, c2, config);
  }
}

}  // namespace gapflow::rl
