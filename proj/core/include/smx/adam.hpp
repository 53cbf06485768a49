#pragma once

#include <cmath>
#include <vector>

namespace smx {

/// Adam with bias correction over a flat parameter vector.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t param_count, double lr, double beta1 = 0.9,
                double beta2 = 0.999, double epsilon = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(epsilon),
        m_(param_count, 0.0), v_(param_count, 0.0) {}

  /// One update with an explicit step-dependent learning rate (linear decay
  /// schedules pass the decayed value here).
  void step(std::vector<double>& params, const std::vector<double>& grad,
            double lr_override) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, t_);
    const double c2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
      params[i] -= lr_override * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
    }
  }

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    step(params, grad, lr_);
  }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace smx
