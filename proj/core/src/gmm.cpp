#include "smx/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "smx/errors.hpp"

namespace smx {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::VectorXd to_eigen(const SampleVec& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<long>(x.size()));
}

SampleVec to_vec(const Eigen::VectorXd& v) {
  return SampleVec(v.data(), v.data() + v.size());
}
}  // namespace

GaussianMixture::GaussianMixture(std::vector<double> weights,
                                 std::vector<Eigen::VectorXd> means,
                                 std::vector<Eigen::MatrixXd> covariances) {
  if (weights.empty() || weights.size() != means.size() ||
      weights.size() != covariances.size())
    throw SchemaError("GaussianMixture: component lists must be nonempty and equal-length");
  dim_ = static_cast<int>(means[0].size());
  if (dim_ < 1) throw SchemaError("GaussianMixture: dimension must be >= 1");

  double wsum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || w > 1.0)
      throw SchemaError("GaussianMixture: weights must lie in (0, 1]");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw SchemaError("GaussianMixture: weights must sum to 1 within 1e-12");

  components_.reserve(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (means[k].size() != dim_)
      throw SchemaError("GaussianMixture: mean dimension mismatch");
    const Eigen::MatrixXd& cov = covariances[k];
    if (cov.rows() != dim_ || cov.cols() != dim_)
      throw SchemaError("GaussianMixture: covariance shape mismatch");
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw SchemaError("GaussianMixture: covariance must be symmetric");
    GmmComponent c;
    c.weight = weights[k];
    c.mean = means[k];
    c.covariance = cov;
    c.chol.compute(cov);
    if (c.chol.info() != Eigen::Success)
      throw SchemaError("GaussianMixture: covariance is not positive definite (component " +
                        std::to_string(k) + ")");
    double log_det = 0.0;
    for (int i = 0; i < dim_; ++i)
      log_det += 2.0 * std::log(c.chol.matrixL()(i, i));
    c.log_norm = -0.5 * (dim_ * kLog2Pi + log_det);
    c.precision = c.chol.solve(Eigen::MatrixXd::Identity(dim_, dim_));
    components_.push_back(std::move(c));
  }
}

void GaussianMixture::check_dim(const SampleVec& x, const char* op) const {
  if (static_cast<int>(x.size()) != dim_)
    throw SchemaError(std::string(op) + ": sample dimension " +
                      std::to_string(x.size()) + " != mixture dimension " +
                      std::to_string(dim_));
}

double GaussianMixture::log_density(const SampleVec& x) const {
  check_dim(x, "log_density");
  const Eigen::VectorXd xe = to_eigen(x);
  // log-sum-exp over component log-terms; naive summation underflows in
  // the mixture tails exercised by the augmentation tests.
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(components_.size());
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const GmmComponent& c = components_[k];
    const Eigen::VectorXd d = xe - c.mean;
    const double maha = d.dot(c.precision * d);
    terms[k] = std::log(c.weight) + c.log_norm - 0.5 * maha;
    max_term = std::max(max_term, terms[k]);
  }
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - max_term);
  return max_term + std::log(acc);
}

SampleVec GaussianMixture::analytic_score(const SampleVec& x) const {
  check_dim(x, "analytic_score");
  const Eigen::VectorXd xe = to_eigen(x);
  // responsibilities via log-sum-exp, then the weighted sum of
  // -Sigma_k^{-1} (x - mu_k)
  std::vector<double> terms(components_.size());
  std::vector<Eigen::VectorXd> grads(components_.size());
  double max_term = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const GmmComponent& c = components_[k];
    const Eigen::VectorXd d = xe - c.mean;
    grads[k] = -(c.precision * d);
    terms[k] = std::log(c.weight) + c.log_norm - 0.5 * (-d.dot(grads[k]));
    max_term = std::max(max_term, terms[k]);
  }
  double denom = 0.0;
  Eigen::VectorXd num = Eigen::VectorXd::Zero(dim_);
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const double r = std::exp(terms[k] - max_term);
    denom += r;
    num += r * grads[k];
  }
  return to_vec(num / denom);
}

SampleVec GaussianMixture::perturbed_score(const SampleVec& x, double sigma) const {
  if (components_.size() != 1)
    throw UnsupportedError("perturbed_score: closed form requires a single Gaussian");
  if (!(sigma > 0.0)) throw PreconditionError("perturbed_score: sigma must be positive");
  check_dim(x, "perturbed_score");
  const GmmComponent& c = components_[0];
  const Eigen::MatrixXd inflated =
      c.covariance + sigma * sigma * Eigen::MatrixXd::Identity(dim_, dim_);
  const Eigen::VectorXd d = to_eigen(x) - c.mean;
  return to_vec(Eigen::VectorXd(-inflated.llt().solve(d)));
}

SampleVec GaussianMixture::draw(Rng& rng, int* label) const {
  // component by inverse CDF over weights, then mu + L z
  const double u = rng.uniform();
  double cum = 0.0;
  int k = component_count() - 1;
  for (int i = 0; i < component_count(); ++i) {
    cum += components_[i].weight;
    if (u < cum) { k = i; break; }
  }
  const GmmComponent& c = components_[k];
  Eigen::VectorXd z(dim_);
  for (int i = 0; i < dim_; ++i) z[i] = rng.normal();
  if (label) *label = k;
  return to_vec(Eigen::VectorXd(c.mean + c.chol.matrixL() * z));
}

std::uint64_t GaussianMixture::fingerprint() const {
  // FNV-1a over the raw parameter bytes
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  for (const GmmComponent& c : components_) {
    mix(c.weight);
    for (int i = 0; i < dim_; ++i) mix(c.mean[i]);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) mix(c.covariance(i, j));
  }
  return h;
}

GaussianMixture preset_grid25() {
  std::vector<double> w(25, 1.0 / 25.0);
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  const Eigen::MatrixXd cov = 0.05 * 0.05 * Eigen::MatrixXd::Identity(2, 2);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      Eigen::VectorXd m(2);
      m << (1.0 + 2.0 * i) / 10.0, (1.0 + 2.0 * j) / 10.0;  // 0.1 .. 0.9
      means.push_back(m);
      covs.push_back(cov);
    }
  return GaussianMixture(w, means, covs);
}

GaussianMixture preset_ring8() {
  std::vector<double> w(8, 1.0 / 8.0);
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  const Eigen::MatrixXd cov = 0.5 * 0.5 * Eigen::MatrixXd::Identity(2, 2);
  for (int k = 0; k < 8; ++k) {
    const double a = 2.0 * M_PI * k / 8.0;
    Eigen::VectorXd m(2);
    m << 4.0 * std::cos(a), 4.0 * std::sin(a);
    means.push_back(m);
    covs.push_back(cov);
  }
  return GaussianMixture(w, means, covs);
}

GaussianMixture preset_gauss1(double tau, int dim) {
  return GaussianMixture({1.0}, {Eigen::VectorXd::Zero(dim)},
                         {tau * tau * Eigen::MatrixXd::Identity(dim, dim)});
}

bool preset_is_range_bounded(const std::string& name) { return name == "grid25"; }

GaussianMixture preset_by_name(const std::string& name) {
  if (name == "grid25") return preset_grid25();
  if (name == "ring8") return preset_ring8();
  if (name == "gauss1") return preset_gauss1();
  throw PreconditionError("unknown preset: " + name);
}

}  // namespace smx
