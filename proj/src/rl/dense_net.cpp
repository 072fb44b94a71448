#include "gapflow/rl/dense_net.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gapflow::rl {

namespace {

Matrix activate(const Matrix& z, Activation act) {
  switch (act) {
    case Activation::relu: return z.cwiseMax(0.0);
    case Activation::tanh: return z.array().tanh().matrix();
    case Activation::linear: return z;
  }
  return z;
}

// d activation / d z, evaluated at the pre-activation.
Matrix activation_slope(const Matrix& z, Activation act) {
  switch (act) {
    case Activation::relu: return (z.array() > 0.0).cast<double>().matrix();
    case Activation::tanh: {
      const Eigen::ArrayXXd t = z.array().tanh();
      return (1.0 - t * t).matrix();
    }
    case Activation::linear: return Matrix::Ones(z.rows(), z.cols());
  }
  return Matrix::Ones(z.rows(), z.cols());
}

}  // namespace

DenseNet::DenseNet(std::vector<int> sizes, Activation hidden, Activation output)
    : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("network needs input and output sizes");
  for (int s : sizes_) {
    if (s <= 0) throw std::invalid_argument("layer sizes must be positive");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    DenseLayer layer;
    layer.weights = Matrix::Zero(sizes_[l + 1], sizes_[l]);
    layer.bias = Vector::Zero(sizes_[l + 1]);
    layer.activation = l + 2 == sizes_.size() ? output : hidden;
    layers_.push_back(std::move(layer));
  }
}

void DenseNet::initialize(std::mt19937_64& rng, double final_scale) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    auto& layer = layers_[l];
    const bool last = l + 1 == layers_.size();
    const double limit =
        last ? final_scale
             : std::sqrt(6.0 / static_cast<double>(layer.weights.rows() + layer.weights.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) layer.weights(r, c) = dist(rng);
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = last ? dist(rng) : 0.0;
  }
  ++generation_;
}

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) {
    n += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
  }
  return n;
}

std::vector<DenseLayer>& DenseNet::mutable_layers() {
  ++generation_;
  return layers_;
}

Matrix DenseNet::evaluate(const Matrix& input) const {
  if (input.rows() != input_size()) {
    throw std::invalid_argument("input size " + std::to_string(input.rows()) + " != " +
                                std::to_string(input_size()));
  }
  Matrix x = input;
  for (const auto& layer : layers_) {
    Matrix z = layer.weights * x;
    z.colwise() += layer.bias;
    x = activate(z, layer.activation);
  }
  return x;
}

Vector DenseNet::evaluate(const Vector& input) const {
  return evaluate(Matrix(input)).col(0);
}

bool DenseNet::all_finite() const {
  for (const auto& layer : layers_) {
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

bool DenseNet::same_shape(const DenseNet& other) const {
  if (sizes_ != other.sizes_ || layers_.size() != other.layers_.size()) return false;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].activation != other.layers_[l].activation) return false;
  }
  return true;
}

Gradients Gradients::zeros_like(const DenseNet& net) {
  Gradients g;
  for (const auto& layer : net.layers()) {
    g.weights.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
    g.bias.push_back(Vector::Zero(layer.bias.size()));
  }
  g.input = Matrix::Zero(net.input_size(), 1);
  return g;
}

double Gradients::max_abs() const {
  double m = 0.0;
  for (const auto& w : weights) m = std::max(m, w.cwiseAbs().maxCoeff());
  for (const auto& b : bias) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

ForwardResult forward(const DenseNet& net, const Matrix& input) {
  if (input.rows() != net.input_size()) {
    throw std::invalid_argument("input size " + std::to_string(input.rows()) + " != " +
                                std::to_string(net.input_size()));
  }
  ForwardResult out;
  out.cache.net = &net;
  out.cache.generation = net.generation();
  Matrix x = input;
  for (const auto& layer : net.layers()) {
    out.cache.inputs.push_back(x);
    Matrix z = layer.weights * x;
    z.colwise() += layer.bias;
    x = activate(z, layer.activation);
    out.cache.preactivations.push_back(std::move(z));
  }
  out.output = std::move(x);
  return out;
}

Gradients backward(const DenseNet& net, const ForwardCache& cache, const Matrix& grad_output) {
  if (cache.net != &net || cache.generation != net.generation() ||
      cache.inputs.size() != net.layers().size()) {
    throw std::logic_error("stale forward cache");
  }
  const auto& layers = net.layers();
  const Eigen::Index batch = cache.inputs.front().cols();
  if (grad_output.rows() != net.output_size() || grad_output.cols() != batch) {
    throw std::invalid_argument("grad_output shape mismatch");
  }
  Gradients g;
  g.weights.resize(layers.size());
  g.bias.resize(layers.size());
  Matrix upstream = grad_output;
  for (std::size_t k = layers.size(); k-- > 0;) {
    const Matrix delta =
        upstream.cwiseProduct(activation_slope(cache.preactivations[k], layers[k].activation));
    g.weights[k] = delta * cache.inputs[k].transpose();
    g.bias[k] = delta.rowwise().sum();
    upstream = layers[k].weights.transpose() * delta;
  }
  g.input = std::move(upstream);
  return g;
}

void soft_update(DenseNet& target, const DenseNet& online, double tau) {
  if (!target.same_shape(online)) throw std::invalid_argument("soft_update shape mismatch");
  auto& dst = target.mutable_layers();
  const auto& src = online.layers();
  for (std::size_t l = 0; l < dst.size(); ++l) {
    dst[l].weights = tau * src[l].weights + (1.0 - tau) * dst[l].weights;
    dst[l].bias = tau * src[l].bias + (1.0 - tau) * dst[l].bias;
  }
}

}  // namespace gapflow::rl
