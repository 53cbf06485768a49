#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smx/adam.hpp"
#include "smx/augment.hpp"
#include "smx/metrics.hpp"
#include "smx/mlp.hpp"

namespace smx {

enum class Pipeline {
  no_augmentation,
  unconditional_aug_real,   // augmented pool joins D's ground-truth stream
  conditional_aug_input,    // augmented pool feeds the generator conditioning
  mixup_baseline,           // mixup on both real and fake D batches
};

Pipeline pipeline_from_string(const std::string& name);
std::string pipeline_to_string(Pipeline p);

/// Generator z [+ one-hot label] -> sample, discriminator sample
/// [+ one-hot label] -> logit. n_classes == 0 means unconditional.
struct GanModel {
  FeedForward generator;
  FeedForward discriminator;
  int latent_dim = 8;
  int n_classes = 0;
  int data_dim = 0;
};

GanModel make_gan(int data_dim, int latent_dim, int n_classes,
                  const std::vector<int>& hidden_widths, std::uint64_t seed);

struct GanTrainConfig {
  Pipeline pipeline = Pipeline::no_augmentation;
  double mu = 0.0;
  bool growing = false;           // mu grows without bound during training
  double grow_probability = 0.0;  // per-element augmentation chance (growing)
  int epochs = 200;
  int batch_size = 32;
  int eval_every = 10;            // epochs between metric evaluations
  double lr_g = 1e-3;
  double lr_d = 1e-3;
  int early_stop_patience = 5;
  std::uint64_t seed = 0;
  int latent_dim = 8;
  std::vector<int> hidden_widths = {64, 64, 64};
  int eval_samples = 4096;
};

struct GanStepResult {
  double d_loss = 0.0;
  double g_loss = 0.0;
  double d_acc_real = 0.0;
  double d_acc_fake = 0.0;
};

/// One discriminator update (saturating cross-entropy objective) followed by
/// one non-saturating generator update, both by Adam. `fake_labels` supplies
/// conditioning classes for generated samples (conditional models only).
/// `mixup_alpha`, when set, mixes real-real and fake-fake D batches with a
/// shared per-pair lambda (the mixup baseline).
GanStepResult gan_step(GanModel& model, const std::vector<SampleVec>& real_batch,
                       const std::vector<int>* real_labels,
                       const std::vector<int>* fake_labels,
                       AdamOptimizer& opt_d, AdamOptimizer& opt_g, Rng& rng,
                       std::optional<double> mixup_alpha = std::nullopt);

/// Shared-lambda mixup over paired real-real and fake-fake batches.
std::pair<std::vector<SampleVec>, std::vector<SampleVec>> mixup_baseline_batch(
    const std::vector<SampleVec>& real_batch,
    const std::vector<SampleVec>& fake_batch, double alpha,
    std::uint64_t seed);

/// Generate `count` samples from the model; labels drawn uniformly when the
/// model is conditional.
std::vector<SampleVec> generate_samples(const GanModel& model,
                                        std::size_t count, std::uint64_t seed);

struct TraceRow {
  long step = 0;
  int epoch = 0;
  double frechet = 0.0;
  double coverage = 0.0;
  double high_quality_fraction = 0.0;
  double mean_log_density = 0.0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double d_acc_real = 0.0;
  double d_acc_fake = 0.0;
  double aug_share = 0.0;  // fraction of D's "real" stream that was augmented
};

struct TrainingTrace {
  std::vector<TraceRow> rows;
  GanModel best_checkpoint;
  double best_metric = 0.0;
  int best_epoch = 0;
  int stopped_at = 0;  // last epoch trained
};

/// Trains per the configured pipeline; evaluates against `oracle` every
/// eval_every epochs on eval_samples generated points (the Frechet
/// reference is a fixed-seed oracle draw); early-stops after
/// early_stop_patience consecutive metric increases and returns the trace
/// with the best (minimum Frechet) checkpoint.
TrainingTrace train_gan(const Dataset& dataset, const ScoreField* field,
                        const MixConfig& mix_config, const GanTrainConfig& config,
                        const GaussianMixture& oracle);

void save_trace_csv(const TrainingTrace& trace, const std::string& path);

/// Early-stopping decision logic, exposed for unit testing on scripted
/// metric sequences: returns the 0-based index of the evaluation after
/// which training stops, or -1 if the sequence never triggers.
int early_stop_index(const std::vector<double>& metrics, int patience);

}  // namespace smx
