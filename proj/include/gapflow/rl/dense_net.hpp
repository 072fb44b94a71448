#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace gapflow::rl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Activation : std::uint8_t { relu, tanh, linear };

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out
  Activation activation = Activation::linear;
};

/// Fully connected feed-forward network. Inputs are column vectors; batched
/// calls pass one sample per column.
class DenseNet {
 public:
  DenseNet() = default;
  /// sizes = {input, hidden..., output}; hidden layers use `hidden`, the last
  /// layer uses `output`. Parameters start at zero.
  DenseNet(std::vector<int> sizes, Activation hidden, Activation output);

  /// Hidden layers uniform in +-sqrt(6 / (fan_in + fan_out)); the output layer
  /// uniform in +-final_scale. Biases start at zero except the output bias,
  /// which shares the output layer's range.
  void initialize(std::mt19937_64& rng, double final_scale = 3e-3);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  std::size_t parameter_count() const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  /// Mutable access invalidates outstanding forward caches.
  std::vector<DenseLayer>& mutable_layers();

  /// Incremented on every parameter change; forward caches record it.
  std::uint64_t generation() const { return generation_; }

  /// Forward pass without a cache (inference).
  Matrix evaluate(const Matrix& input) const;
  Vector evaluate(const Vector& input) const;

  bool all_finite() const;
  bool same_shape(const DenseNet& other) const;

 private:
  std::vector<int> sizes_;
  std::vector<DenseLayer> layers_;
  std::uint64_t generation_ = 0;
};

struct ForwardCache {
  const DenseNet* net = nullptr;
  std::uint64_t generation = 0;
  std::vector<Matrix> inputs;       // input to each layer
  std::vector<Matrix> preactivations;
};

struct ForwardResult {
  Matrix output;
  ForwardCache cache;
};

/// Gradients summed over the batch columns.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> bias;
  Matrix input;

  static Gradients zeros_like(const DenseNet& net);
  double max_abs() const;
};

/// Throws std::invalid_argument on an input-size mismatch.
ForwardResult forward(const DenseNet& net, const Matrix& input);

/// Exact gradients of sum(output .* grad_output) with respect to every
/// parameter and the input. Throws std::logic_error if the cache does not
/// belong to `net` at its current generation.
Gradients backward(const DenseNet& net, const ForwardCache& cache, const Matrix& grad_output);

/// theta' <- tau * theta + (1 - tau) * theta' for every parameter.
/// Throws std::invalid_argument on a shape mismatch.
void soft_update(DenseNet& target, const DenseNet& online, double tau);

}  // namespace gapflow::rl
