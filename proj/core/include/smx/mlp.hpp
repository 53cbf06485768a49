#pragma once

#include <cstdint>
#include <vector>

#include "smx/rng.hpp"

namespace smx {

/// Fully connected network with softplus hidden activations and a linear
/// output layer. Optionally carries per-scale gain/shift tables applied to
/// each hidden pre-activation (the noise-conditioning mechanism); with
/// scale_count == 0 it is a plain MLP.
///
/// Parameter layout (flat, in this order):
///   for each layer l: W_l row-major (out x in), then b_l
///   if conditioned, for each hidden layer l, for each scale s:
///     gain_{l,s} (width), shift_{l,s} (width)
/// Gains initialize to 1, shifts to 0, biases to 0, weights uniform in
/// +-sqrt(6/(fan_in+fan_out)).
class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(int in_dim, std::vector<int> hidden_widths, int out_dim,
              int scale_count, std::uint64_t seed);

  int input_dim() const { return in_dim_; }
  int output_dim() const { return out_dim_; }
  int scale_count() const { return scale_count_; }
  const std::vector<int>& hidden_widths() const { return hidden_; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }

  /// Per-call activation cache; reuse across calls to avoid reallocation.
  struct Workspace {
    std::vector<std::vector<double>> inputs;   // activation entering each layer
    std::vector<std::vector<double>> linear;   // W h + b per hidden layer
    std::vector<std::vector<double>> preact;   // after conditioning
    int scale = 0;
  };

  /// Forward pass. scale_index is 1-based; pass 1 for unconditioned nets.
  std::vector<double> forward(const std::vector<double>& x, int scale_index,
                              Workspace& ws) const;

  /// Reverse pass for the forward recorded in `ws`. Accumulates dL/dtheta
  /// into grad_params when non-null (must be param_count() long, caller
  /// zeroes) and returns dL/dx = J^T cotangent.
  std::vector<double> backward(const Workspace& ws,
                               const std::vector<double>& cotangent,
                               std::vector<double>* grad_params) const;

  // offsets into the flat parameter vector (used by checkpoint IO and tests)
  std::size_t weight_offset(int layer) const { return w_off_[layer]; }
  std::size_t bias_offset(int layer) const { return b_off_[layer]; }
  std::size_t gain_offset(int hidden_layer, int scale_index_1based) const;
  std::size_t shift_offset(int hidden_layer, int scale_index_1based) const;
  int layer_count() const { return static_cast<int>(dims_.size()) - 1; }
  int layer_in(int l) const { return dims_[l]; }
  int layer_out(int l) const { return dims_[l + 1]; }

 private:
  int in_dim_ = 0, out_dim_ = 0, scale_count_ = 0;
  std::vector<int> hidden_;
  std::vector<int> dims_;  // in, hidden..., out
  std::vector<std::size_t> w_off_, b_off_;
  std::size_t cond_base_ = 0;
  std::vector<double> params_;
};

}  // namespace smx
