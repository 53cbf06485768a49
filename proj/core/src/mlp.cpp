#include "smx/mlp.hpp"

#include <cmath>

#include "smx/errors.hpp"

namespace smx {

namespace {
inline double softplus(double z) {
  if (z > 30.0) return z;
  if (z < -30.0) return std::exp(z);
  return std::log1p(std::exp(z));
}
inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}
}  // namespace

FeedForward::FeedForward(int in_dim, std::vector<int> hidden_widths,
                         int out_dim, int scale_count, std::uint64_t seed)
    : in_dim_(in_dim),
      out_dim_(out_dim),
      scale_count_(scale_count),
      hidden_(std::move(hidden_widths)) {
  if (in_dim < 1 || out_dim < 1)
    throw PreconditionError("FeedForward: dimensions must be >= 1");
  dims_.push_back(in_dim_);
  for (int w : hidden_) {
    if (w < 1) throw PreconditionError("FeedForward: hidden width must be >= 1");
    dims_.push_back(w);
  }
  dims_.push_back(out_dim_);

  std::size_t off = 0;
  for (int l = 0; l < layer_count(); ++l) {
    w_off_.push_back(off);
    off += static_cast<std::size_t>(layer_out(l)) * layer_in(l);
    b_off_.push_back(off);
    off += layer_out(l);
  }
  cond_base_ = off;
  if (scale_count_ > 0)
    for (std::size_t l = 0; l < hidden_.size(); ++l)
      off += 2ul * scale_count_ * hidden_[l];
  params_.assign(off, 0.0);

  Rng rng(seed);
  for (int l = 0; l < layer_count(); ++l) {
    const double bound = std::sqrt(6.0 / (layer_in(l) + layer_out(l)));
    double* w = params_.data() + w_off_[l];
    const std::size_t n = static_cast<std::size_t>(layer_out(l)) * layer_in(l);
    for (std::size_t i = 0; i < n; ++i) w[i] = bound * (2.0 * rng.uniform() - 1.0);
  }
  if (scale_count_ > 0)
    for (std::size_t l = 0; l < hidden_.size(); ++l)
      for (int s = 1; s <= scale_count_; ++s) {
        double* g = params_.data() + gain_offset(static_cast<int>(l), s);
        for (int i = 0; i < hidden_[l]; ++i) g[i] = 1.0;
      }
}

std::size_t FeedForward::gain_offset(int hidden_layer, int scale) const {
  std::size_t off = cond_base_;
  for (int l = 0; l < hidden_layer; ++l)
    off += 2ul * scale_count_ * hidden_[l];
  return off + 2ul * (scale - 1) * hidden_[hidden_layer];
}

std::size_t FeedForward::shift_offset(int hidden_layer, int scale) const {
  return gain_offset(hidden_layer, scale) + hidden_[hidden_layer];
}

std::vector<double> FeedForward::forward(const std::vector<double>& x,
                                         int scale_index, Workspace& ws) const {
  if (static_cast<int>(x.size()) != in_dim_)
    throw SchemaError("FeedForward::forward: input dimension mismatch");
  if (scale_count_ > 0 && (scale_index < 1 || scale_index > scale_count_))
    throw PreconditionError("FeedForward::forward: scale index out of range");

  const int n_hidden = static_cast<int>(hidden_.size());
  ws.inputs.resize(layer_count());
  ws.linear.resize(n_hidden);
  ws.preact.resize(n_hidden);
  ws.scale = scale_index;

  std::vector<double> h = x;
  for (int l = 0; l < layer_count(); ++l) {
    ws.inputs[l] = h;
    const int rows = layer_out(l), cols = layer_in(l);
    const double* w = params_.data() + w_off_[l];
    const double* b = params_.data() + b_off_[l];
    std::vector<double> a(rows);
    for (int r = 0; r < rows; ++r) {
      double acc = b[r];
      const double* wr = w + static_cast<std::size_t>(r) * cols;
      for (int c = 0; c < cols; ++c) acc += wr[c] * h[c];
      a[r] = acc;
    }
    if (l == layer_count() - 1) return a;  // linear output layer
    ws.linear[l] = a;
    if (scale_count_ > 0) {
      const double* g = params_.data() + gain_offset(l, scale_index);
      const double* s = g + rows;
      for (int r = 0; r < rows; ++r) a[r] = g[r] * a[r] + s[r];
    }
    ws.preact[l] = a;
    for (int r = 0; r < rows; ++r) a[r] = softplus(a[r]);
    h = std::move(a);
  }
  return h;  // unreachable
}

std::vector<double> FeedForward::backward(const Workspace& ws,
                                          const std::vector<double>& cotangent,
                                          std::vector<double>* grad_params) const {
  if (static_cast<int>(cotangent.size()) != out_dim_)
    throw SchemaError("FeedForward::backward: cotangent dimension mismatch");
  std::vector<double> d = cotangent;
  for (int l = layer_count() - 1; l >= 0; --l) {
    const int rows = layer_out(l), cols = layer_in(l);
    if (l < layer_count() - 1) {
      // through softplus and conditioning: d currently holds dL/dh_{l+1}
      for (int r = 0; r < rows; ++r) d[r] *= sigmoid(ws.preact[l][r]);
      if (scale_count_ > 0) {
        const std::size_t go = gain_offset(l, ws.scale);
        const double* g = params_.data() + go;
        if (grad_params) {
          double* gg = grad_params->data() + go;
          for (int r = 0; r < rows; ++r) {
            gg[r] += d[r] * ws.linear[l][r];   // gain grad
            gg[rows + r] += d[r];              // shift grad
          }
        }
        for (int r = 0; r < rows; ++r) d[r] *= g[r];
      }
    }
    const double* w = params_.data() + w_off_[l];
    const std::vector<double>& h = ws.inputs[l];
    if (grad_params) {
      double* gw = grad_params->data() + w_off_[l];
      double* gb = grad_params->data() + b_off_[l];
      for (int r = 0; r < rows; ++r) {
        gb[r] += d[r];
        double* gwr = gw + static_cast<std::size_t>(r) * cols;
        const double dr = d[r];
        for (int c = 0; c < cols; ++c) gwr[c] += dr * h[c];
      }
    }
    std::vector<double> dh(cols, 0.0);
    for (int r = 0; r < rows; ++r) {
      const double* wr = w + static_cast<std::size_t>(r) * cols;
      const double dr = d[r];
      for (int c = 0; c < cols; ++c) dh[c] += wr[c] * dr;
    }
    d = std::move(dh);
  }
  return d;
}

}  // namespace smx
