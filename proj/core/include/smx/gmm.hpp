#pragma once

#include <Eigen/Dense>
#include <vector>

#include "smx/rng.hpp"

namespace smx {

using SampleVec = std::vector<double>;

/// One mixture component. The Cholesky factor is computed at construction;
/// a non-PD covariance is a schema error.
struct GmmComponent {
  double weight;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::LLT<Eigen::MatrixXd> chol;   // of covariance
  Eigen::MatrixXd precision;          // covariance^{-1}
  double log_norm;                    // log of N(x; mu, Sigma) normalizer
};

/// Mixture of Gaussians with exact log-density and exact Stein score.
/// This is the ground-truth oracle for everything downstream.
class GaussianMixture {
 public:
  GaussianMixture(std::vector<double> weights,
                  std::vector<Eigen::VectorXd> means,
                  std::vector<Eigen::MatrixXd> covariances);

  int dimension() const { return dim_; }
  int component_count() const { return static_cast<int>(components_.size()); }
  const GmmComponent& component(int k) const { return components_[k]; }

  /// log sum_k w_k N(x; mu_k, Sigma_k), log-sum-exp stabilized.
  double log_density(const SampleVec& x) const;

  /// Exact gradient of log_density at x (the Stein score).
  SampleVec analytic_score(const SampleVec& x) const;

  /// Closed-form score of the sigma-perturbed distribution; only valid for
  /// a single-Gaussian mixture, where p * N(0, sigma^2 I) stays Gaussian:
  /// returns -(Sigma + sigma^2 I)^{-1} (x - mu).
  SampleVec perturbed_score(const SampleVec& x, double sigma) const;

  /// Draw one sample; label receives the component index.
  SampleVec draw(Rng& rng, int* label = nullptr) const;

  /// Fingerprint of weights/means/covariances, used for per-mixture caches.
  std::uint64_t fingerprint() const;

 private:
  int dim_;
  std::vector<GmmComponent> components_;
  void check_dim(const SampleVec& x, const char* op) const;
};

// Preset distributions used across experiments.
GaussianMixture preset_grid25();                  // 5x5 grid, sigma=0.05, in [0,1]^2
GaussianMixture preset_ring8();                   // 8 modes, radius 4, sigma=0.5
GaussianMixture preset_gauss1(double tau = 0.5, int dim = 2);  // single N(0, tau^2 I)
bool preset_is_range_bounded(const std::string& name);
GaussianMixture preset_by_name(const std::string& name);

}  // namespace smx
