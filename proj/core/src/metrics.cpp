#include "smx/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "smx/errors.hpp"

namespace smx {

namespace {

constexpr double kJitter = 1e-9;
constexpr std::uint64_t kThresholdSeed = 20240501;
constexpr std::size_t kThresholdDraws = 100000;

void fit_moments(const std::vector<SampleVec>& samples, Eigen::VectorXd& mean,
                 Eigen::MatrixXd& cov) {
  const int d = static_cast<int>(samples[0].size());
  const std::size_t n = samples.size();
  mean = Eigen::VectorXd::Zero(d);
  for (const SampleVec& s : samples)
    mean += Eigen::Map<const Eigen::VectorXd>(s.data(), d);
  mean /= static_cast<double>(n);
  cov = Eigen::MatrixXd::Zero(d, d);
  for (const SampleVec& s : samples) {
    const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(s.data(), d) - mean;
    cov += c * c.transpose();
  }
  cov /= static_cast<double>(n - 1);
  cov += kJitter * Eigen::MatrixXd::Identity(d, d);
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double frechet_gaussian(const std::vector<SampleVec>& samples_a,
                        const std::vector<SampleVec>& samples_b) {
  if (samples_a.empty() || samples_b.empty())
    throw PreconditionError("frechet_gaussian: empty sample set");
  const std::size_t d = samples_a[0].size();
  if (samples_b[0].size() != d)
    throw SchemaError("frechet_gaussian: dimension mismatch");
  if (samples_a.size() < d + 1 || samples_b.size() < d + 1)
    throw PreconditionError("frechet_gaussian: need at least d+1 samples per set");

  Eigen::VectorXd mu_a, mu_b;
  Eigen::MatrixXd sig_a, sig_b;
  fit_moments(samples_a, mu_a, sig_a);
  fit_moments(samples_b, mu_b, sig_b);

  const Eigen::MatrixXd root_a = psd_sqrt(sig_a);
  const Eigen::MatrixXd cross = psd_sqrt(root_a * sig_b * root_a);
  const double value = (mu_a - mu_b).squaredNorm() + sig_a.trace() +
                       sig_b.trace() - 2.0 * cross.trace();
  return std::max(value, 0.0);
}

ModeCoverageResult mode_coverage(const std::vector<SampleVec>& samples,
                                 const GaussianMixture& gmm,
                                 double radius_sigmas) {
  const int k = gmm.component_count();
  ModeCoverageResult res;
  res.assignment_histogram.assign(k, 0);
  std::vector<double> stds(k);
  for (int m = 0; m < k; ++m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gmm.component(m).covariance);
    stds[m] = std::sqrt(es.eigenvalues().maxCoeff());
  }
  std::vector<bool> covered(k, false);
  for (const SampleVec& s : samples) {
    const Eigen::Map<const Eigen::VectorXd> x(s.data(),
                                              static_cast<long>(s.size()));
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int m = 0; m < k; ++m) {
      const double dist = (x - gmm.component(m).mean).norm();
      if (dist < best_dist) {
        best_dist = dist;
        best = m;
      }
    }
    ++res.assignment_histogram[best];
    if (best_dist <= radius_sigmas * stds[best]) covered[best] = true;
  }
  res.coverage = static_cast<double>(std::count(covered.begin(), covered.end(), true)) / k;
  return res;
}

double density_threshold(const GaussianMixture& gmm) {
  static std::mutex mutex;
  static std::unordered_map<std::uint64_t, double> cache;
  const std::uint64_t key = gmm.fingerprint();
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  Rng rng(kThresholdSeed);
  std::vector<double> logs(kThresholdDraws);
  for (std::size_t i = 0; i < kThresholdDraws; ++i)
    logs[i] = gmm.log_density(gmm.draw(rng));
  const std::size_t idx = kThresholdDraws / 20;  // 5th percentile
  std::nth_element(logs.begin(), logs.begin() + idx, logs.end());
  const double threshold = logs[idx];
  std::lock_guard<std::mutex> lock(mutex);
  cache[key] = threshold;
  return threshold;
}

std::pair<double, double> density_stats(const std::vector<SampleVec>& samples,
                                        const GaussianMixture& gmm) {
  if (samples.empty()) throw PreconditionError("density_stats: empty samples");
  const double threshold = density_threshold(gmm);
  double mean = 0.0;
  std::size_t above = 0;
  for (const SampleVec& s : samples) {
    const double ld = gmm.log_density(s);
    mean += ld;
    if (ld >= threshold) ++above;
  }
  mean /= static_cast<double>(samples.size());
  return {mean, static_cast<double>(above) / static_cast<double>(samples.size())};
}

MetricReport evaluate_samples(const std::vector<SampleVec>& samples,
                              const GaussianMixture& gmm,
                              const std::vector<SampleVec>& reference) {
  MetricReport r;
  r.sample_count = samples.size();
  r.frechet = frechet_gaussian(samples, reference);
  r.mode_coverage = mode_coverage(samples, gmm, 3.0).coverage;
  std::tie(r.mean_log_density, r.high_quality_fraction) =
      density_stats(samples, gmm);
  return r;
}

}  // namespace smx
