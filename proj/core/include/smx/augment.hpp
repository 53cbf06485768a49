#pragma once

#include <string>
#include <utility>
#include <vector>

#include "smx/dataset.hpp"
#include "smx/field.hpp"

namespace smx {

struct MixConfig {
  double alpha = 0.2;   // Beta(alpha, alpha) shape
  double eta = 0.005;   // initial step size, linearly decayed
  int steps = 100;
  double t0 = 0.25;     // remaining-noise fraction for the denoising finetune
  bool clamp01 = false;
  std::uint64_t seed = 0;
};

/// Full audit trail of one augmentation.
struct AugmentationRecord {
  SampleVec x1, x2;
  double lambda = 0.0;
  SampleVec x_mixed;
  SampleVec x_star;
  double initial_score_norm = 0.0;
  double final_score_norm = 0.0;
  int steps_run = 0;
};

/// lambda ~ Beta(alpha, alpha), deterministic per seed.
double sample_lambda(double alpha, std::uint64_t seed);

/// lambda * x1 + (1 - lambda) * x2.
SampleVec mixup(const SampleVec& x1, const SampleVec& x2, double lambda);

/// L(x) = ||S(x)||^2 and its gradient 2 J^T S(x).
std::pair<double, SampleVec> score_norm_objective(const ScoreField& field,
                                                  const SampleVec& x);

/// Single corrector step x <- x + sigma_{i0}^2 S(x, sigma_{i0}) with
/// i0 = max(1, round((1 - t0) * (N - 1)) + 1).
SampleVec denoise_finetune(const SampleVec& x, const ScoreNetwork& net,
                           double t0, bool clamp01 = false);

/// Algorithm: sample lambda, mix, run `steps` safeguarded descent steps on
/// ||S(x)||^2 with step size eta * (1 - t/steps) and backtracking halving
/// (max 10, step skipped if still ascending), then the denoising finetune
/// when the field is a trained network.
AugmentationRecord scoremix(const SampleVec& x1, const SampleVec& x2,
                            const ScoreField& field, const MixConfig& config);

/// ceil(mu * n) augmented samples from uniformly drawn distinct-index
/// pairs (within-class when labels exist; labels inherited). Each output
/// owns RNG substream seed+index, so ordering is reproducible.
struct AugmentResult {
  Dataset augmented;
  std::vector<AugmentationRecord> records;
  std::vector<std::pair<std::size_t, std::size_t>> parents;
};
AugmentResult augment_batch(const Dataset& dataset, const ScoreField& field,
                            const MixConfig& config, double mu,
                            std::uint64_t seed);

// SMXA v1 sidecar audit: header `SMXA 1 <count>`, then one line per sample:
// parent1 parent2 lambda initial_norm final_norm steps_run.
void save_smxa(const AugmentResult& result, const std::string& path);

}  // namespace smx
