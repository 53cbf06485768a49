#pragma once

#include <string>
#include <utility>
#include <vector>

#include "smx/dataset.hpp"
#include "smx/mlp.hpp"
#include "smx/schedule.hpp"

namespace smx {

/// Noise-conditional score network S_theta(x, sigma_i). Scale conditioning
/// is by integer index into the schedule via learned per-scale gain/shift
/// tables on each hidden layer.
struct ScoreNetwork {
  FeedForward net;
  NoiseSchedule schedule;

  int dimension() const { return net.input_dim(); }
};

struct ScoreTrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 32;
  long steps = 20000;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  /// When true the DSM loss sums over all scales per sample instead of
  /// drawing one scale uniformly (slower, lower-variance estimator).
  bool sum_all_scales = false;
  /// Start from the moment-matched Gaussian score (see make_scorenet)
  /// instead of a random network.
  bool warm_start = true;
  std::vector<int> hidden_widths = {128, 128, 128};
};

/// `data_variance`, when positive, seeds the last hidden layer's gain table
/// with the perturbation-amplitude ladder of a moment-matched Gaussian,
/// (tau^2 + sigma_N^2) / (tau^2 + sigma_i^2). The ladder collapses every
/// scale onto one shared regression target for near-Gaussian data, so the
/// gradient-starved small scales inherit the fit of the large ones.
/// `data_mean`, when non-empty (size `dimension`), centers that Gaussian via
/// the last hidden layer's per-scale shift table.
ScoreNetwork make_scorenet(int dimension, const NoiseSchedule& schedule,
                           const std::vector<int>& hidden_widths,
                           std::uint64_t seed, double data_variance = 0.0,
                           const SampleVec& data_mean = {});

/// Forward pass at one scale (1-based index into the schedule).
SampleVec eval_score(const ScoreNetwork& net, const SampleVec& x,
                     int scale_index);

/// J^T cotangent where J = dS_theta(x, sigma_i)/dx.
SampleVec eval_score_input_grad(const ScoreNetwork& net, const SampleVec& x,
                                int scale_index, const SampleVec& cotangent);

/// Multi-scale weighted DSM loss and its exact parameter gradient.
/// Per sample: draw scale i (uniform, or all when sum_all_scales), draw
/// x~ = x + sigma_i z, accumulate sigma_i^2 ||S(x~, i) + (x~ - x)/sigma_i^2||^2;
/// loss is the batch mean. Deterministic for fixed seed.
std::pair<double, std::vector<double>> dsm_loss(const ScoreNetwork& net,
                                                const std::vector<SampleVec>& batch,
                                                std::uint64_t seed,
                                                bool sum_all_scales = false);

struct ScoreTrainResult {
  ScoreNetwork net;
  std::vector<double> loss_trajectory;
};

/// Adam over dsm_loss minibatches. Throws TrainingDivergedError on NaN loss.
ScoreTrainResult train_scorenet(const Dataset& dataset,
                                const NoiseSchedule& schedule,
                                const ScoreTrainConfig& config);

// SMXN v1 checkpoint: header `SMXN 1 <d> <n_scales> <widths...>`, the sigma
// list, then all parameters in flat layout order, 17 significant digits.
void save_smxn(const ScoreNetwork& net, const std::string& path);
ScoreNetwork load_smxn(const std::string& path);

}  // namespace smx
