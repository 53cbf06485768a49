#include "smx/gan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

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

std::vector<double> with_onehot(const SampleVec& x, int label, int n_classes) {
  std::vector<double> v(x);
  if (n_classes > 0) {
    v.resize(x.size() + n_classes, 0.0);
    v[x.size() + label] = 1.0;
  }
  return v;
}

std::vector<double> latent_with_onehot(Rng& rng, int latent_dim, int label,
                                       int n_classes) {
  std::vector<double> z(latent_dim + n_classes, 0.0);
  for (int i = 0; i < latent_dim; ++i) z[i] = rng.normal();
  if (n_classes > 0) z[latent_dim + label] = 1.0;
  return z;
}

}  // namespace

Pipeline pipeline_from_string(const std::string& name) {
  if (name == "no_augmentation") return Pipeline::no_augmentation;
  if (name == "unconditional_aug_real") return Pipeline::unconditional_aug_real;
  if (name == "conditional_aug_input") return Pipeline::conditional_aug_input;
  if (name == "mixup_baseline") return Pipeline::mixup_baseline;
  throw PreconditionError("unknown pipeline: " + name);
}

std::string pipeline_to_string(Pipeline p) {
  switch (p) {
    case Pipeline::no_augmentation: return "no_augmentation";
    case Pipeline::unconditional_aug_real: return "unconditional_aug_real";
    case Pipeline::conditional_aug_input: return "conditional_aug_input";
    case Pipeline::mixup_baseline: return "mixup_baseline";
  }
  return "?";
}

GanModel make_gan(int data_dim, int latent_dim, int n_classes,
                  const std::vector<int>& hidden_widths, std::uint64_t seed) {
  GanModel m;
  m.latent_dim = latent_dim;
  m.n_classes = n_classes;
  m.data_dim = data_dim;
  Rng rng(seed);
  m.generator = FeedForward(latent_dim + n_classes, hidden_widths, data_dim, 0,
                            rng.next_u64());
  m.discriminator = FeedForward(data_dim + n_classes, hidden_widths, 1, 0,
                                rng.next_u64());
  return m;
}

std::pair<std::vector<SampleVec>, std::vector<SampleVec>> mixup_baseline_batch(
    const std::vector<SampleVec>& real_batch,
    const std::vector<SampleVec>& fake_batch, double alpha,
    std::uint64_t seed) {
  if (real_batch.size() != fake_batch.size())
    throw SchemaError("mixup_baseline_batch: batch size mismatch");
  const std::size_t n = real_batch.size();
  Rng rng(seed);
  std::vector<SampleVec> mixed_real(n), mixed_fake(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t partner = i;
    if (n > 1)
      do {
        partner = rng.uniform_int(n);
      } while (partner == i);
    const double lambda = rng.beta(alpha, alpha);  // shared per pair
    mixed_real[i] = mixup(real_batch[i], real_batch[partner], lambda);
    mixed_fake[i] = mixup(fake_batch[i], fake_batch[partner], lambda);
  }
  return {std::move(mixed_real), std::move(mixed_fake)};
}

GanStepResult gan_step(GanModel& model, const std::vector<SampleVec>& real_batch,
                       const std::vector<int>* real_labels,
                       const std::vector<int>* fake_labels,
                       AdamOptimizer& opt_d, AdamOptimizer& opt_g, Rng& rng,
                       std::optional<double> mixup_alpha) {
  if (real_batch.empty()) throw PreconditionError("gan_step: empty batch");
  if (model.n_classes > 0 && (!real_labels || !fake_labels))
    throw SchemaError("gan_step: conditional model requires labels");
  const std::size_t n = real_batch.size();
  GanStepResult res;
  FeedForward::Workspace ws_g, ws_d;

  // --- discriminator update ---
  std::vector<SampleVec> fakes(n);
  std::vector<int> fl(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (model.n_classes > 0) fl[i] = (*fake_labels)[i % fake_labels->size()];
    const std::vector<double> z =
        latent_with_onehot(rng, model.latent_dim, fl[i], model.n_classes);
    fakes[i] = model.generator.forward(z, 1, ws_g);
  }
  std::vector<SampleVec> d_real = real_batch;
  std::vector<SampleVec> d_fake = fakes;
  if (mixup_alpha) {
    std::tie(d_real, d_fake) =
        mixup_baseline_batch(real_batch, fakes, *mixup_alpha, rng.next_u64());
  }

  std::vector<double> grad_d(model.discriminator.param_count(), 0.0);
  double d_loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = model.n_classes > 0 ? (*real_labels)[i] : 0;
    const std::vector<double> in = with_onehot(d_real[i], label, model.n_classes);
    const double logit = model.discriminator.forward(in, 1, ws_d)[0];
    d_loss += inv_n * softplus(-logit);           // -log D(x)
    if (sigmoid(logit) > 0.5) res.d_acc_real += inv_n;
    model.discriminator.backward(ws_d, {inv_n * (sigmoid(logit) - 1.0)}, &grad_d);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> in = with_onehot(d_fake[i], fl[i], model.n_classes);
    const double logit = model.discriminator.forward(in, 1, ws_d)[0];
    d_loss += inv_n * softplus(logit);            // -log(1 - D(G(z)))
    if (sigmoid(logit) < 0.5) res.d_acc_fake += inv_n;
    model.discriminator.backward(ws_d, {inv_n * sigmoid(logit)}, &grad_d);
  }
  if (!std::isfinite(d_loss))
    throw TrainingDivergedError("gan_step: non-finite discriminator loss", 0);
  opt_d.step(model.discriminator.params(), grad_d);
  res.d_loss = d_loss;

  // --- generator update (non-saturating) ---
  std::vector<double> grad_g(model.generator.param_count(), 0.0);
  double g_loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = model.n_classes > 0 ? (*fake_labels)[i % fake_labels->size()] : 0;
    const std::vector<double> z =
        latent_with_onehot(rng, model.latent_dim, label, model.n_classes);
    const SampleVec fake = model.generator.forward(z, 1, ws_g);
    const std::vector<double> in = with_onehot(fake, label, model.n_classes);
    const double logit = model.discriminator.forward(in, 1, ws_d)[0];
    g_loss += inv_n * softplus(-logit);           // -log D(G(z))
    const std::vector<double> dx =
        model.discriminator.backward(ws_d, {inv_n * (sigmoid(logit) - 1.0)},
                                     nullptr);
    model.generator.backward(
        ws_g, std::vector<double>(dx.begin(), dx.begin() + model.data_dim),
        &grad_g);
  }
  if (!std::isfinite(g_loss))
    throw TrainingDivergedError("gan_step: non-finite generator loss", 0);
  opt_g.step(model.generator.params(), grad_g);
  res.g_loss = g_loss;
  return res;
}

std::vector<SampleVec> generate_samples(const GanModel& model,
                                        std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  FeedForward::Workspace ws;
  std::vector<SampleVec> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int label = model.n_classes > 0
        ? static_cast<int>(rng.uniform_int(model.n_classes)) : 0;
    out[i] = model.generator.forward(
        latent_with_onehot(rng, model.latent_dim, label, model.n_classes), 1, ws);
  }
  return out;
}

int early_stop_index(const std::vector<double>& metrics, int patience) {
  int consecutive = 0;
  for (std::size_t i = 1; i < metrics.size(); ++i) {
    if (metrics[i] > metrics[i - 1]) {
      if (++consecutive >= patience) return static_cast<int>(i);
    } else {
      consecutive = 0;
    }
  }
  return -1;
}

TrainingTrace train_gan(const Dataset& dataset, const ScoreField* field,
                        const MixConfig& mix_config, const GanTrainConfig& config,
                        const GaussianMixture& oracle) {
  dataset.validate();
  if (dataset.samples.empty()) throw PreconditionError("train_gan: empty dataset");
  const bool conditional = config.pipeline == Pipeline::conditional_aug_input;
  if (conditional && !dataset.has_labels())
    throw SchemaError("train_gan: conditional pipeline requires labels");
  const bool needs_field =
      (config.pipeline == Pipeline::unconditional_aug_real ||
       config.pipeline == Pipeline::conditional_aug_input) &&
      (config.mu > 0.0 || config.growing);
  if (needs_field && !field)
    throw SchemaError("train_gan: pipeline requires a score field");

  int n_classes = 0;
  if (conditional)
    n_classes = 1 + *std::max_element(dataset.labels.begin(), dataset.labels.end());

  Rng root(config.seed);
  GanModel model = make_gan(dataset.dimension, config.latent_dim, n_classes,
                            config.hidden_widths, root.next_u64());
  AdamOptimizer opt_d(model.discriminator.param_count(), config.lr_d);
  AdamOptimizer opt_g(model.generator.param_count(), config.lr_g);

  // Static augmented pool, materialized once before training.
  std::vector<SampleVec> pool;
  std::vector<int> pool_labels;
  if (needs_field && !config.growing && config.mu > 0.0) {
    AugmentResult aug =
        augment_batch(dataset, *field, mix_config, config.mu, root.next_u64());
    pool = std::move(aug.augmented.samples);
    pool_labels = std::move(aug.augmented.labels);
  }

  // Union stream for D's ground truth: real samples plus the static pool.
  std::vector<SampleVec> union_samples = dataset.samples;
  std::vector<int> union_labels = dataset.labels;
  if (config.pipeline == Pipeline::unconditional_aug_real) {
    union_samples.insert(union_samples.end(), pool.begin(), pool.end());
    if (dataset.has_labels())
      union_labels.insert(union_labels.end(), pool_labels.begin(),
                          pool_labels.end());
  }
  // Conditioning-label stream for the generator.
  std::vector<int> cond_labels = dataset.labels;
  if (conditional)
    cond_labels.insert(cond_labels.end(), pool_labels.begin(), pool_labels.end());

  const std::size_t epoch_data =
      config.pipeline == Pipeline::unconditional_aug_real ? union_samples.size()
                                                          : dataset.samples.size();
  const long steps_per_epoch = std::max<long>(
      1, static_cast<long>(epoch_data) / config.batch_size);

  const std::uint64_t ref_seed = 0x5eedf00dULL;  // shared across runs
  std::vector<SampleVec> reference;
  {
    Rng ref_rng(ref_seed);
    reference.reserve(config.eval_samples);
    for (int i = 0; i < config.eval_samples; ++i)
      reference.push_back(oracle.draw(ref_rng));
  }

  TrainingTrace trace;
  trace.best_metric = std::numeric_limits<double>::infinity();
  Rng train_rng(root.next_u64());
  Rng aug_rng(root.next_u64());
  long global_step = 0;
  int consecutive_increases = 0;
  double prev_metric = std::numeric_limits<double>::infinity();
  bool have_prev = false;

  // per-class index lists for growing-mode pair draws
  std::unordered_map<int, std::vector<std::size_t>> by_class;
  if (dataset.has_labels()) {
    for (std::size_t i = 0; i < dataset.samples.size(); ++i)
      by_class[dataset.labels[i]].push_back(i);
    if (config.growing) {
      bool pairable = false;
      for (const auto& [label, members] : by_class)
        if (members.size() >= 2) pairable = true;
      if (!pairable)
        throw PreconditionError("train_gan: no class has 2+ samples to pair");
    }
  }

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    GanStepResult last;
    double aug_hits = 0.0, aug_total = 0.0;
    for (long s = 0; s < steps_per_epoch; ++s, ++global_step) {
      std::vector<SampleVec> batch(config.batch_size);
      std::vector<int> batch_labels(config.batch_size, 0);
      for (int i = 0; i < config.batch_size; ++i) {
        const std::size_t idx = train_rng.uniform_int(union_samples.size());
        batch[i] = union_samples[idx];
        if (!union_labels.empty()) batch_labels[i] = union_labels[idx];
        aug_total += 1.0;
        if (idx >= dataset.samples.size()) aug_hits += 1.0;
        if (config.growing &&
            config.pipeline == Pipeline::unconditional_aug_real &&
            train_rng.uniform() < config.grow_probability) {
          // fresh augmentation replaces this element; singleton classes
          // cannot form a within-class pair, so redraw the anchor
          std::size_t a = aug_rng.uniform_int(dataset.samples.size());
          if (dataset.has_labels())
            while (by_class[dataset.labels[a]].size() < 2)
              a = aug_rng.uniform_int(dataset.samples.size());
          std::size_t b;
          if (dataset.has_labels()) {
            const std::vector<std::size_t>& members = by_class[dataset.labels[a]];
            do { b = members[aug_rng.uniform_int(members.size())]; } while (b == a);
          } else {
            do { b = aug_rng.uniform_int(dataset.samples.size()); } while (b == a);
          }
          MixConfig mc = mix_config;
          mc.seed = aug_rng.next_u64();
          batch[i] = scoremix(dataset.samples[a], dataset.samples[b], *field, mc)
                         .x_star;
          if (dataset.has_labels()) batch_labels[i] = dataset.labels[a];
          aug_hits += 1.0;
        }
      }
      std::vector<int> fake_labels(config.batch_size, 0);
      if (conditional)
        for (int i = 0; i < config.batch_size; ++i)
          fake_labels[i] = cond_labels[train_rng.uniform_int(cond_labels.size())];
      std::optional<double> mixup_alpha;
      if (config.pipeline == Pipeline::mixup_baseline)
        mixup_alpha = mix_config.alpha;
      last = gan_step(model, batch,
                      conditional ? &batch_labels : nullptr,
                      conditional ? &fake_labels : nullptr, opt_d, opt_g,
                      train_rng, mixup_alpha);
    }

    trace.stopped_at = epoch;
    if (epoch % config.eval_every == 0 || epoch == config.epochs) {
      const std::vector<SampleVec> generated =
          generate_samples(model, config.eval_samples, Rng(ref_seed).substream(epoch).next_u64());
      const MetricReport report = evaluate_samples(generated, oracle, reference);
      TraceRow row;
      row.step = global_step;
      row.epoch = epoch;
      row.frechet = report.frechet;
      row.coverage = report.mode_coverage;
      row.high_quality_fraction = report.high_quality_fraction;
      row.mean_log_density = report.mean_log_density;
      row.d_loss = last.d_loss;
      row.g_loss = last.g_loss;
      row.d_acc_real = last.d_acc_real;
      row.d_acc_fake = last.d_acc_fake;
      row.aug_share = aug_total > 0.0 ? aug_hits / aug_total : 0.0;
      trace.rows.push_back(row);

      if (report.frechet < trace.best_metric) {
        trace.best_metric = report.frechet;
        trace.best_checkpoint = model;
        trace.best_epoch = epoch;
      }
      if (have_prev && report.frechet > prev_metric) {
        if (++consecutive_increases >= config.early_stop_patience) break;
      } else {
        consecutive_increases = 0;
      }
      prev_metric = report.frechet;
      have_prev = true;
    }
  }
  if (trace.rows.empty()) {
    trace.best_checkpoint = model;
    trace.best_metric = 0.0;
  }
  return trace;
}

void save_trace_csv(const TrainingTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("save_trace_csv: cannot open " + path);
  out << "step,epoch,frechet,mode_coverage,high_quality_fraction,"
         "mean_log_density,d_loss,g_loss,d_acc_real,d_acc_fake,aug_share\n";
  char buf[512];
  for (const TraceRow& r : trace.rows) {
    std::snprintf(buf, sizeof buf,
                  "%ld,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.step, r.epoch, r.frechet, r.coverage,
                  r.high_quality_fraction, r.mean_log_density, r.d_loss,
                  r.g_loss, r.d_acc_real, r.d_acc_fake, r.aug_share);
    out << buf;
  }
  if (!out) throw SchemaError("save_trace_csv: write failed for " + path);
}

}  // namespace smx
