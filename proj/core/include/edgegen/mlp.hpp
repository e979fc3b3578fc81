#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "edgegen/rng.hpp"

namespace edgegen {

/// Fully connected layer; weight is row-major out x in.
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  bool operator==(const DenseLayer&) const = default;
};

/// Multi-layer perceptron with tanh hidden units and a linear output layer.
class Mlp {
 public:
  /// Activations recorded by forward() for a later backward().
  struct Tape {
    std::vector<std::vector<double>> values;  // values[0] = input, values[i] = output of layer i-1
  };

  Mlp() = default;
  /// Zero-initialized network with the given layer widths (input first).
  explicit Mlp(std::span<const std::size_t> widths);

  std::size_t input_size() const { return layers_.empty() ? 0 : layers_.front().in; }
  std::size_t output_size() const { return layers_.empty() ? 0 : layers_.back().out; }
  std::size_t param_count() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  std::vector<double> forward(std::span<const double> x, Tape* tape = nullptr) const;

  /// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(output).
  void backward(const Tape& tape, std::span<const double> d_out, Mlp& grad) const;

  /// Orthogonal weights scaled by `hidden_gain` / `output_gain`; zero biases.
  void init_orthogonal(RngStream& rng, double hidden_gain, double output_gain);

  void set_zero();

  /// Appends all parameters (layer by layer, weight then bias) to `out`.
  void append_to(std::vector<double>& out) const;
  /// Reads parameters in append_to order; returns the number consumed.
  std::size_t assign_from(std::span<const double> in);

  bool operator==(const Mlp&) const = default;

 private:
  std::vector<DenseLayer> layers_;
};

}  // namespace edgegen
