#pragma once

#include <utility>
#include <vector>

#include "smx/gmm.hpp"

namespace smx {

struct MetricReport {
  double frechet = 0.0;
  double mode_coverage = 0.0;
  double high_quality_fraction = 0.0;
  double mean_log_density = 0.0;
  std::size_t sample_count = 0;
};

/// Gaussian-moment Frechet distance on raw coordinates:
/// ||mu_a - mu_b||^2 + Tr(Sigma_a + Sigma_b - 2 (Sigma_a Sigma_b)^{1/2}).
/// Covariances are unbiased fits with 1e-9 I jitter; the matrix square root
/// uses the symmetric eigendecomposition of Sa^{1/2} Sb Sa^{1/2} with
/// negative eigenvalues clipped at 0.
double frechet_gaussian(const std::vector<SampleVec>& samples_a,
                        const std::vector<SampleVec>& samples_b);

struct ModeCoverageResult {
  double coverage = 0.0;
  std::vector<std::size_t> assignment_histogram;  // one slot per mode
};

/// Nearest-mode assignment; a mode is covered when some sample lies within
/// radius_sigmas * (mode std) of its mean, where the mode std is the square
/// root of the largest covariance eigenvalue.
ModeCoverageResult mode_coverage(const std::vector<SampleVec>& samples,
                                 const GaussianMixture& gmm,
                                 double radius_sigmas);

/// Mean oracle log-density plus the fraction of samples whose log-density
/// exceeds the 5th percentile of 1e5 seed-pinned oracle draws (the
/// percentile reference is cached per mixture).
std::pair<double, double> density_stats(const std::vector<SampleVec>& samples,
                                        const GaussianMixture& gmm);

/// The cached 5th-percentile log-density threshold for a mixture.
double density_threshold(const GaussianMixture& gmm);

MetricReport evaluate_samples(const std::vector<SampleVec>& samples,
                              const GaussianMixture& gmm,
                              const std::vector<SampleVec>& reference);

}  // namespace smx
