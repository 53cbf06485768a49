#pragma once

#include <memory>
#include <utility>

#include "smx/gmm.hpp"
#include "smx/scorenet.hpp"

namespace smx {

/// Score field used by the augmentation optimizer: either a trained
/// ScoreNetwork evaluated at the smallest scale, or an analytic
/// mixture oracle.
class ScoreField {
 public:
  virtual ~ScoreField() = default;
  virtual int dimension() const = 0;
  virtual SampleVec score(const SampleVec& x) const = 0;
  /// J^T cotangent for J = dS/dx.
  virtual SampleVec score_input_grad(const SampleVec& x,
                                     const SampleVec& cotangent) const = 0;
  /// Learned fields support the score-based denoising finetune;
  /// analytic fields do not (no schedule to map t0 onto).
  virtual const ScoreNetwork* network() const { return nullptr; }
};

/// Exact mixture score; input gradients via central finite differences of
/// the oracle score (a Hessian-vector product of the log-density).
class AnalyticScoreField : public ScoreField {
 public:
  explicit AnalyticScoreField(GaussianMixture gmm, double fd_step = 1e-5)
      : gmm_(std::move(gmm)), fd_step_(fd_step) {}
  int dimension() const override { return gmm_.dimension(); }
  SampleVec score(const SampleVec& x) const override {
    return gmm_.analytic_score(x);
  }
  SampleVec score_input_grad(const SampleVec& x,
                             const SampleVec& cotangent) const override;
  const GaussianMixture& gmm() const { return gmm_; }

 private:
  GaussianMixture gmm_;
  double fd_step_;
};

/// Trained network evaluated at the smallest noise scale sigma_N.
class LearnedScoreField : public ScoreField {
 public:
  explicit LearnedScoreField(ScoreNetwork net) : net_(std::move(net)) {}
  int dimension() const override { return net_.dimension(); }
  SampleVec score(const SampleVec& x) const override {
    return eval_score(net_, x, net_.schedule.scale_count());
  }
  SampleVec score_input_grad(const SampleVec& x,
                             const SampleVec& cotangent) const override {
    return eval_score_input_grad(net_, x, net_.schedule.scale_count(),
                                 cotangent);
  }
  const ScoreNetwork* network() const override { return &net_; }

 private:
  ScoreNetwork net_;
};

}  // namespace smx
