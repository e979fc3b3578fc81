#include "edgegen/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "edgegen/errors.hpp"

namespace edgegen {

namespace {

// r x c matrix (r >= c, row-major) with orthonormal columns, from a Gaussian
// draw via modified Gram-Schmidt.
std::vector<double> orthonormal_columns(std::size_t r, std::size_t c, RngStream& rng) {
  std::vector<double> m(r * c);
  for (double& x : m) x = rng.normal();
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < r; ++i) dot += m[i * c + j] * m[i * c + k];
      for (std::size_t i = 0; i < r; ++i) m[i * c + j] -= dot * m[i * c + k];
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < r; ++i) norm += m[i * c + j] * m[i * c + j];
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < r; ++i) m[i * c + j] /= norm;
  }
  return m;
}

}  // namespace

Mlp::Mlp(std::span<const std::size_t> widths) {
  if (widths.size() < 2) throw InvalidArgument("an MLP needs at least input and output widths");
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    DenseLayer l;
    l.in = widths[i];
    l.out = widths[i + 1];
    l.weight.assign(l.in * l.out, 0.0);
    l.bias.assign(l.out, 0.0);
    layers_.push_back(std::move(l));
  }
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (const DenseLayer& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

std::vector<double> Mlp::forward(std::span<const double> x, Tape* tape) const {
  if (x.size() != input_size()) throw InvalidArgument("MLP input width mismatch");
  std::vector<double> cur(x.begin(), x.end());
  if (tape) {
    tape->values.resize(layers_.size() + 1);
    tape->values[0] = cur;
  }
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const DenseLayer& l = layers_[li];
    const bool hidden = li + 1 < layers_.size();
    std::vector<double> next(l.out);
    for (std::size_t o = 0; o < l.out; ++o) {
      const double* w = &l.weight[o * l.in];
      double acc = l.bias[o];
      for (std::size_t i = 0; i < l.in; ++i) acc += w[i] * cur[i];
      next[o] = hidden ? std::tanh(acc) : acc;
    }
    cur = std::move(next);
    if (tape) tape->values[li + 1] = cur;
  }
  return cur;
}

void Mlp::backward(const Tape& tape, std::span<const double> d_out, Mlp& grad) const {
  std::vector<double> delta(d_out.begin(), d_out.end());
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const DenseLayer& l = layers_[li];
    DenseLayer& g = grad.layers_[li];
    const std::vector<double>& input = tape.values[li];
    const bool hidden = li + 1 < layers_.size();
    if (hidden) {
      // d tanh(z) / dz = 1 - tanh(z)^2, and tape holds tanh(z).
      const std::vector<double>& act = tape.values[li + 1];
      for (std::size_t o = 0; o < l.out; ++o) delta[o] *= 1.0 - act[o] * act[o];
    }
    std::vector<double> d_input(li > 0 ? l.in : 0, 0.0);
    for (std::size_t o = 0; o < l.out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      g.bias[o] += d;
      double* gw = &g.weight[o * l.in];
      for (std::size_t i = 0; i < l.in; ++i) gw[i] += d * input[i];
      if (li > 0) {
        const double* w = &l.weight[o * l.in];
        for (std::size_t i = 0; i < l.in; ++i) d_input[i] += d * w[i];
      }
    }
    delta = std::move(d_input);
  }
}

void Mlp::init_orthogonal(RngStream& rng, double hidden_gain, double output_gain) {
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    DenseLayer& l = layers_[li];
    const double gain = li + 1 < layers_.size() ? hidden_gain : output_gain;
    const std::size_t r = std::max(l.out, l.in);
    const std::size_t c = std::min(l.out, l.in);
    const std::vector<double> q = orthonormal_columns(r, c, rng);
    for (std::size_t o = 0; o < l.out; ++o) {
      for (std::size_t i = 0; i < l.in; ++i) {
        // q is r x c; use it directly when out >= in, transposed otherwise.
        const double v = l.out >= l.in ? q[o * c + i] : q[i * c + o];
        l.weight[o * l.in + i] = gain * v;
      }
    }
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
}

void Mlp::set_zero() {
  for (DenseLayer& l : layers_) {
    std::fill(l.weight.begin(), l.weight.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
}

void Mlp::append_to(std::vector<double>& out) const {
  for (const DenseLayer& l : layers_) {
    out.insert(out.end(), l.weight.begin(), l.weight.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
}

std::size_t Mlp::assign_from(std::span<const double> in) {
  std::size_t k = 0;
  for (DenseLayer& l : layers_) {
    if (in.size() - k < l.weight.size() + l.bias.size()) throw InvalidArgument("parameter vector too short");
    std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(k), l.weight.size(), l.weight.begin());
    k += l.weight.size();
    std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(k), l.bias.size(), l.bias.begin());
    k += l.bias.size();
  }
  return k;
}

}  // namespace edgegen
