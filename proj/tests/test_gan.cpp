#include <cmath>

#include "doctest.h"
#include "smx/errors.hpp"
#include "smx/gan.hpp"

using namespace smx;

namespace {

// forces the discriminator output to a constant logit
void rig_constant_logit(GanModel& model, double logit) {
  FeedForward& d = model.discriminator;
  const int last = d.layer_count() - 1;
  double* w = d.params().data() + d.weight_offset(last);
  for (int c = 0; c < d.layer_in(last); ++c) w[c] = 0.0;
  d.params()[d.bias_offset(last)] = logit;
}

double d_loss_of(GanModel model, const std::vector<SampleVec>& batch,
                 std::uint64_t seed) {
  AdamOptimizer od(model.discriminator.param_count(), 0.0);
  AdamOptimizer og(model.generator.param_count(), 0.0);
  Rng rng(seed);
  return gan_step(model, batch, nullptr, nullptr, od, og, rng).d_loss;
}

}  // namespace

TEST_CASE("gan_step: constant D(x)=0.5 gives d_loss = 2 ln 2") {
  GanModel model = make_gan(2, 4, 0, {8, 8}, 3);
  rig_constant_logit(model, 0.0);  // sigmoid(0) = 0.5
  const double loss = d_loss_of(model, {{0.1, 0.2}, {0.5, -0.5}}, 7);
  CHECK(loss == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("gan_step: near-perfect discriminator drives d_loss to 0") {
  // rigged fixture: D ignores input and outputs a huge logit for everything;
  // instead rig separated supports by a linear probe on the first coordinate.
  GanModel model = make_gan(1, 2, 0, {4}, 5);
  // generator collapses to large negative values; reals are large positive.
  FeedForward& g = model.generator;
  for (std::size_t i = 0; i < g.param_count(); ++i) g.params()[i] = 0.0;
  g.params()[g.bias_offset(g.layer_count() - 1)] = -50.0;
  // discriminator: logit = 1 * x (first-layer passthrough via large weights)
  FeedForward& d = model.discriminator;
  for (std::size_t i = 0; i < d.param_count(); ++i) d.params()[i] = 0.0;
  // single hidden layer width 4: softplus(w x), then linear. Use
  // logit ~ softplus(x) - softplus(-x) = x, scaled up.
  double* w0 = d.params().data() + d.weight_offset(0);
  w0[0] = 5.0;   // unit 0 sees +5x
  w0[1] = -5.0;  // unit 1 sees -5x
  double* w1 = d.params().data() + d.weight_offset(1);
  w1[0] = 1.0;
  w1[1] = -1.0;
  const double loss = d_loss_of(model, {{50.0}, {60.0}}, 11);
  CHECK(loss < 0.01);
}

TEST_CASE("gan_step: discriminator gradient matches finite differences") {
  GanModel model = make_gan(2, 3, 0, {6, 5}, 17);
  const std::vector<SampleVec> batch{{0.4, -0.2}, {1.1, 0.6}, {-0.8, 0.3}};

  // compute the analytic D gradient by replaying the loss manually
  auto d_loss_at = [&](const std::vector<double>& params, std::uint64_t seed) {
    GanModel m = model;
    m.discriminator.params() = params;
    return d_loss_of(m, batch, seed);
  };
  // capture the implementation gradient via a zero-lr Adam probe:
  // instead, recompute by hand with backward()
  const std::uint64_t seed = 23;
  // regenerate the same fakes the step would produce
  Rng rng(seed);
  FeedForward::Workspace wsg, wsd;
  std::vector<SampleVec> fakes;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::vector<double> z(3);
    for (double& v : z) v = rng.normal();
    fakes.push_back(model.generator.forward(z, 1, wsg));
  }
  std::vector<double> grad(model.discriminator.param_count(), 0.0);
  const double inv_n = 1.0 / batch.size();
  auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  for (const SampleVec& x : batch) {
    const double logit = model.discriminator.forward(x, 1, wsd)[0];
    model.discriminator.backward(wsd, {inv_n * (sigmoid(logit) - 1.0)}, &grad);
  }
  for (const SampleVec& x : fakes) {
    const double logit = model.discriminator.forward(x, 1, wsd)[0];
    model.discriminator.backward(wsd, {inv_n * sigmoid(logit)}, &grad);
  }
  Rng pick(99);
  for (int t = 0; t < 20; ++t) {
    const std::size_t i = pick.uniform_int(model.discriminator.param_count());
    const double h = 1e-6;
    std::vector<double> p = model.discriminator.params(), m = p;
    p[i] += h;
    m[i] -= h;
    const double fd = (d_loss_at(p, seed) - d_loss_at(m, seed)) / (2.0 * h);
    CHECK(std::abs(grad[i] - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("mixup_baseline_batch properties") {
  Rng rng(4);
  std::vector<SampleVec> real(6), fake(6);
  for (int i = 0; i < 6; ++i) {
    real[i] = {rng.normal(), rng.normal()};
    fake[i] = {rng.normal(), rng.normal()};
  }
  SUBCASE("size mismatch rejected") {
    CHECK_THROWS_AS((void)mixup_baseline_batch(real, {fake[0]}, 0.2, 1),
                    SchemaError);
  }
  SUBCASE("mixed_real stays in the componentwise hull of the real batch") {
    auto [mr, mf] = mixup_baseline_batch(real, fake, 0.2, 2);
    double lo0 = 1e9, hi0 = -1e9, lo1 = 1e9, hi1 = -1e9;
    for (const SampleVec& x : real) {
      lo0 = std::min(lo0, x[0]); hi0 = std::max(hi0, x[0]);
      lo1 = std::min(lo1, x[1]); hi1 = std::max(hi1, x[1]);
    }
    for (const SampleVec& x : mr) {
      CHECK(x[0] >= lo0 - 1e-12);
      CHECK(x[0] <= hi0 + 1e-12);
      CHECK(x[1] >= lo1 - 1e-12);
      CHECK(x[1] <= hi1 + 1e-12);
    }
  }
  SUBCASE("alpha -> infinity limit: lambda concentrates at 0.5") {
    auto [mr, mf] = mixup_baseline_batch(real, fake, 1e6, 3);
    // with lambda ~= 0.5 each mixed sample is close to a pair average
    for (std::size_t i = 0; i < mr.size(); ++i) {
      bool matched = false;
      for (std::size_t j = 0; j < real.size(); ++j) {
        if (j == i) continue;
        const double a0 = 0.5 * (real[i][0] + real[j][0]);
        const double a1 = 0.5 * (real[i][1] + real[j][1]);
        if (std::abs(mr[i][0] - a0) < 0.01 && std::abs(mr[i][1] - a1) < 0.01)
          matched = true;
      }
      CHECK(matched);
    }
  }
}

TEST_CASE("early stopping fires exactly at the patience-th increase") {
  // scripted metric sequences
  CHECK(early_stop_index({5, 4, 3, 2, 1}, 5) == -1);
  CHECK(early_stop_index({5, 4, 5, 6, 7, 8, 9}, 5) == 6);
  CHECK(early_stop_index({1, 2, 3, 4, 5, 6}, 5) == 5);
  // a single non-increase resets the streak
  CHECK(early_stop_index({1, 2, 3, 4, 3, 4, 5, 6, 7, 8}, 5) == 9);
  CHECK(early_stop_index({1, 2, 3, 4, 3, 4, 5, 6, 7}, 5) == -1);
  CHECK(early_stop_index({1, 2}, 1) == 1);
}

TEST_CASE("train_gan: mu=0 unconditional_aug_real equals no_augmentation") {
  GaussianMixture ring = preset_ring8();
  Dataset ds = sample_gmm(ring, 32, 6);
  AnalyticScoreField field(ring);
  MixConfig mix;
  GanTrainConfig cfg;
  cfg.epochs = 6;
  cfg.eval_every = 2;
  cfg.batch_size = 8;
  cfg.eval_samples = 64;
  cfg.seed = 5;
  cfg.pipeline = Pipeline::unconditional_aug_real;
  cfg.mu = 0.0;
  TrainingTrace a = train_gan(ds, &field, mix, cfg, ring);
  cfg.pipeline = Pipeline::no_augmentation;
  TrainingTrace b = train_gan(ds, nullptr, mix, cfg, ring);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].frechet == b.rows[i].frechet);
    CHECK(a.rows[i].d_loss == b.rows[i].d_loss);
    CHECK(a.rows[i].g_loss == b.rows[i].g_loss);
  }
  CHECK(a.best_checkpoint.generator.params() ==
        b.best_checkpoint.generator.params());
}

TEST_CASE("train_gan: growing mode with probability 1 augments every element") {
  GaussianMixture ring = preset_ring8();
  Dataset ds = sample_gmm(ring, 16, 8);
  AnalyticScoreField field(ring);
  MixConfig mix;
  mix.steps = 5;
  GanTrainConfig cfg;
  cfg.epochs = 2;
  cfg.eval_every = 1;
  cfg.batch_size = 8;
  cfg.eval_samples = 32;
  cfg.seed = 2;
  cfg.pipeline = Pipeline::unconditional_aug_real;
  cfg.growing = true;
  cfg.grow_probability = 1.0;
  TrainingTrace trace = train_gan(ds, &field, mix, cfg, ring);
  for (const TraceRow& row : trace.rows) CHECK(row.aug_share == 1.0);
}

TEST_CASE("train_gan: best checkpoint metric bounds the trace") {
  GaussianMixture ring = preset_ring8();
  Dataset ds = sample_gmm(ring, 32, 9);
  MixConfig mix;
  GanTrainConfig cfg;
  cfg.epochs = 10;
  cfg.eval_every = 2;
  cfg.batch_size = 8;
  cfg.eval_samples = 64;
  cfg.seed = 11;
  TrainingTrace trace = train_gan(ds, nullptr, mix, cfg, ring);
  for (const TraceRow& row : trace.rows)
    CHECK(trace.best_metric <= row.frechet);
}

TEST_CASE("train_gan: conditional pipeline requires labels") {
  GaussianMixture ring = preset_ring8();
  Dataset ds = sample_gmm(ring, 32, 10);
  ds.labels.clear();
  AnalyticScoreField field(ring);
  MixConfig mix;
  GanTrainConfig cfg;
  cfg.pipeline = Pipeline::conditional_aug_input;
  CHECK_THROWS_AS((void)train_gan(ds, &field, mix, cfg, ring), SchemaError);
}

TEST_CASE("train_gan: conditional smoke run with labeled data") {
  GaussianMixture ring = preset_ring8();
  Dataset ds = sample_gmm(ring, 64, 13);
  AnalyticScoreField field(ring);
  MixConfig mix;
  mix.steps = 5;
  GanTrainConfig cfg;
  cfg.pipeline = Pipeline::conditional_aug_input;
  cfg.mu = 1.0;
  cfg.epochs = 4;
  cfg.eval_every = 2;
  cfg.batch_size = 16;
  cfg.eval_samples = 64;
  cfg.seed = 3;
  TrainingTrace trace = train_gan(ds, &field, mix, cfg, ring);
  CHECK(!trace.rows.empty());
  for (double p : trace.best_checkpoint.generator.params())
    CHECK(std::isfinite(p));
}

TEST_CASE("parameters stay finite over a 200-step smoke run per preset") {
  for (const char* preset : {"gauss1", "ring8", "grid25"}) {
    GaussianMixture g = preset_by_name(preset);
    Dataset ds = sample_gmm(g, 64, 14);
    MixConfig mix;
    GanTrainConfig cfg;
    cfg.epochs = 100;  // 2 steps/epoch at batch 32 over 64 samples
    cfg.eval_every = 50;
    cfg.batch_size = 32;
    cfg.eval_samples = 64;
    cfg.seed = 15;
    TrainingTrace trace = train_gan(ds, nullptr, mix, cfg, g);
    for (double p : trace.best_checkpoint.generator.params())
      CHECK(std::isfinite(p));
    for (double p : trace.best_checkpoint.discriminator.params())
      CHECK(std::isfinite(p));
  }
}
