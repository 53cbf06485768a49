#include <cmath>

#include "doctest.h"
#include "smx/augment.hpp"
#include "smx/errors.hpp"

using namespace smx;

namespace {

double norm2(const SampleVec& v) {
  double acc = 0.0;
  for (double c : v) acc += c * c;
  return std::sqrt(acc);
}

// oracle network S(x, sigma) = -(x - mu) / sigma^2, built as a linear
// FeedForward with no hidden layers so the denoising step is exact
ScoreNetwork oracle_denoiser(const SampleVec& mu, const NoiseSchedule& sched,
                             int scale_for_step) {
  const int d = static_cast<int>(mu.size());
  ScoreNetwork net = make_scorenet(d, sched, {}, 0);
  const double sigma = sched.sigma(scale_for_step);
  double* w = net.net.params().data() + net.net.weight_offset(0);
  double* b = net.net.params().data() + net.net.bias_offset(0);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) w[r * d + c] = r == c ? -1.0 / (sigma * sigma) : 0.0;
    b[r] = mu[r] / (sigma * sigma);
  }
  return net;
}

}  // namespace

TEST_CASE("sample_lambda: support and Beta(0.2, 0.2) moments") {
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double l = sample_lambda(0.2, 1000 + i);
    CHECK(l >= 0.0);
    CHECK(l <= 1.0);
    sum += l;
    sq += l * l;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean - 0.5) <= 0.005);
  // Var Beta(a,a) = 1/(4(2a+1)); 3 standard errors of the sample variance
  const double true_var = 1.0 / (4.0 * (2.0 * 0.2 + 1.0));
  CHECK(true_var == doctest::Approx(0.17857142857).epsilon(1e-9));
  // fourth-moment-based SE bound, conservative for a bounded variable
  const double se = std::sqrt(2.0) * true_var / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(var - true_var) <= 3.0 * 2.0 * se);
  CHECK_THROWS_AS((void)sample_lambda(0.0, 1), PreconditionError);
}

TEST_CASE("sample_lambda is deterministic per seed") {
  CHECK(sample_lambda(0.2, 42) == sample_lambda(0.2, 42));
}

TEST_CASE("mixup: endpoints, arithmetic, swap symmetry, errors") {
  const SampleVec x1{0.0, 0.0}, x2{2.0, 4.0};
  CHECK(mixup(x1, x2, 1.0) == x1);
  CHECK(mixup(x1, x2, 0.0) == x2);
  const SampleVec m = mixup(x1, x2, 0.25);
  CHECK(m[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(m[1] == doctest::Approx(3.0).epsilon(1e-15));
  for (double l : {0.0, 0.3, 0.71, 1.0})
    CHECK(mixup(x1, x2, l) == mixup(x2, x1, 1.0 - l));
  CHECK_THROWS_AS((void)mixup({1.0}, {1.0, 2.0}, 0.5), SchemaError);
  CHECK_THROWS_AS((void)mixup(x1, x2, 1.5), PreconditionError);
}

TEST_CASE("mixup hull property") {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    SampleVec a{rng.normal(), rng.normal()}, b{rng.normal(), rng.normal()};
    const SampleVec m = mixup(a, b, rng.uniform());
    for (int i = 0; i < 2; ++i) {
      CHECK(m[i] >= std::min(a[i], b[i]) - 1e-12);
      CHECK(m[i] <= std::max(a[i], b[i]) + 1e-12);
    }
  }
}

TEST_CASE("score_norm_objective on analytic fields") {
  SUBCASE("stationary at the single-gaussian mode") {
    AnalyticScoreField field(preset_gauss1(0.7, 2));
    auto [value, grad] = score_norm_objective(field, {0.0, 0.0});
    CHECK(value <= 1e-12);
    CHECK(std::abs(grad[0]) <= 1e-12);
    CHECK(std::abs(grad[1]) <= 1e-12);
  }
  SUBCASE("1-D standard normal closed form: L(x)=x^2, grad=2x") {
    AnalyticScoreField field(preset_gauss1(1.0, 1));
    auto [value, grad] = score_norm_objective(field, {3.0});
    CHECK(value == doctest::Approx(9.0).epsilon(1e-9));
    CHECK(grad[0] == doctest::Approx(6.0).epsilon(1e-6));
  }
  SUBCASE("learned field gradient matches finite differences") {
    NoiseSchedule sched;
    sched.sigmas = {0.5, 0.1};
    sched.weights = {0.25, 0.01};
    sched.gamma = 0.2;
    LearnedScoreField field(make_scorenet(2, sched, {6, 6}, 33));
    Rng rng(9);
    for (int t = 0; t < 10; ++t) {
      SampleVec x{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
      auto [value, grad] = score_norm_objective(field, x);
      for (int i = 0; i < 2; ++i) {
        SampleVec xp(x), xm(x);
        xp[i] += 1e-5;
        xm[i] -= 1e-5;
        const double fd = (score_norm_objective(field, xp).first -
                           score_norm_objective(field, xm).first) / 2e-5;
        CHECK(std::abs(grad[i] - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("scoremix: fixed point at a mode") {
  AnalyticScoreField field(preset_gauss1(0.5, 2));
  MixConfig cfg;
  cfg.seed = 3;
  const SampleVec mode{0.0, 0.0};
  AugmentationRecord rec = scoremix(mode, mode, field, cfg);
  CHECK(std::abs(rec.x_star[0]) <= 1e-9);
  CHECK(std::abs(rec.x_star[1]) <= 1e-9);
  CHECK(rec.initial_score_norm <= 1e-9);
}

TEST_CASE("scoremix: symmetric midpoint is stationary initialization") {
  Eigen::VectorXd m1(1), m2(1);
  m1 << -2.0;
  m2 << 2.0;
  Eigen::MatrixXd cov(1, 1);
  cov << 1.0;
  GaussianMixture g({0.5, 0.5}, {m1, m2}, {cov, cov});
  AnalyticScoreField field(g);
  // force lambda = 0.5 by passing identical "mixed" endpoints: the midpoint
  // of the two modes, where S = 0 by symmetry
  MixConfig cfg;
  cfg.seed = 1;
  AugmentationRecord rec = scoremix({0.0}, {0.0}, field, cfg);
  CHECK(std::abs(rec.x_star[0] - 0.0) <= 1e-9);
  CHECK(rec.final_score_norm <= rec.initial_score_norm + 1e-9);
}

TEST_CASE("scoremix: adjacent ring8 modes, lambda 0.3") {
  GaussianMixture ring = preset_ring8();
  AnalyticScoreField field(ring);
  const Eigen::VectorXd& e1 = ring.component(0).mean;
  const Eigen::VectorXd& e2 = ring.component(1).mean;
  const SampleVec m1{e1[0], e1[1]}, m2{e2[0], e2[1]};
  const SampleVec mixed = mixup(m1, m2, 0.3);
  // run the documented update rule from the forced initialization by
  // optimizing from the mixed point directly
  MixConfig cfg;
  cfg.seed = 77;
  // find a seed-free route: scoremix(x, x, ...) starts exactly at x
  AugmentationRecord rec = scoremix(mixed, mixed, field, cfg);
  CHECK(rec.final_score_norm <= 0.01 * rec.initial_score_norm);
  CHECK(ring.log_density(rec.x_star) >= ring.log_density(mixed));
}

TEST_CASE("scoremix invariants on analytic fields") {
  GaussianMixture ring = preset_ring8();
  AnalyticScoreField field(ring);
  Dataset modes;
  modes.dimension = 2;
  for (int k = 0; k < 8; ++k) {
    const Eigen::VectorXd& m = ring.component(k).mean;
    modes.samples.push_back({m[0], m[1]});
  }
  Rng rng(55);
  int density_gain = 0, trials = 200;
  for (int t = 0; t < trials; ++t) {
    const std::size_t a = rng.uniform_int(8);
    std::size_t b;
    do { b = rng.uniform_int(8); } while (b == a);
    MixConfig cfg;
    cfg.seed = rng.next_u64();
    AugmentationRecord rec =
        scoremix(modes.samples[a], modes.samples[b], field, cfg);
    // convex-hull initialization
    for (int i = 0; i < 2; ++i) {
      CHECK(rec.x_mixed[i] >= std::min(modes.samples[a][i], modes.samples[b][i]) - 1e-12);
      CHECK(rec.x_mixed[i] <= std::max(modes.samples[a][i], modes.samples[b][i]) + 1e-12);
    }
    // safeguarded descent never increases the score norm
    CHECK(rec.final_score_norm <= rec.initial_score_norm + 1e-9);
    // stationarity or step exhaustion
    auto [v, grad] = score_norm_objective(field, rec.x_star);
    const bool stationary = norm2(grad) <= 1e-3;
    CHECK((stationary || rec.steps_run == cfg.steps));
    if (ring.log_density(rec.x_star) >= ring.log_density(rec.x_mixed) - 1e-9)
      ++density_gain;
  }
  CHECK(density_gain >= static_cast<int>(0.95 * trials));
}

TEST_CASE("scoremix determinism: identical seeds, identical records") {
  AnalyticScoreField field(preset_ring8());
  MixConfig cfg;
  cfg.seed = 31337;
  const SampleVec a{4.0, 0.0}, b{0.0, 4.0};
  AugmentationRecord r1 = scoremix(a, b, field, cfg);
  AugmentationRecord r2 = scoremix(a, b, field, cfg);
  CHECK(r1.lambda == r2.lambda);
  CHECK(r1.x_star == r2.x_star);
  CHECK(r1.final_score_norm == r2.final_score_norm);
  CHECK(r1.steps_run == r2.steps_run);
}

TEST_CASE("denoise_finetune: oracle network denoises exactly") {
  NoiseSchedule sched;
  sched.sigmas = {1.0, 0.5, 0.25, 0.1};
  sched.weights = {1.0, 0.25, 0.0625, 0.01};
  sched.gamma = 0.5;
  // t0 = 0.25 -> i0 = round(0.75 * 3) + 1 = 3
  const SampleVec mu{1.5, -0.5};
  ScoreNetwork net = oracle_denoiser(mu, sched, 3);
  const SampleVec out = denoise_finetune({7.0, 3.0}, net, 0.25);
  CHECK(out[0] == doctest::Approx(mu[0]).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(mu[1]).epsilon(1e-12));
}

TEST_CASE("denoise_finetune: smallest-scale displacement is negligible") {
  NoiseSchedule sched;
  sched.sigmas = {1.0, 0.1, 0.01};
  sched.weights = {1.0, 0.01, 0.0001};
  sched.gamma = 0.1;
  ScoreNetwork net = make_scorenet(2, sched, {8}, 13);
  // t0 -> 0+ maps to the last scale i0 = N
  const SampleVec x{0.3, 0.4};
  const SampleVec out = denoise_finetune(x, net, 1e-9);
  const SampleVec s = eval_score(net, x, 3);
  const double bound = 0.01 * 0.01 * norm2(s) + 1e-15;
  CHECK(norm2({out[0] - x[0], out[1] - x[1]}) <= bound);
}

TEST_CASE("denoise_finetune: trained-field Monte-Carlo handled in acceptance") {
  // the statistical denoising check needs the A1-trained network; the
  // acceptance suite covers it. Here: argument validation only.
  NoiseSchedule sched;
  sched.sigmas = {1.0, 0.1};
  sched.weights = {1.0, 0.01};
  sched.gamma = 0.1;
  ScoreNetwork net = make_scorenet(2, sched, {4}, 1);
  CHECK_THROWS_AS((void)denoise_finetune({0.0, 0.0}, net, 0.0),
                  PreconditionError);
  CHECK_THROWS_AS((void)denoise_finetune({0.0}, net, 0.25), SchemaError);
}

TEST_CASE("augment_batch: counts, labels, determinism") {
  GaussianMixture ring = preset_ring8();
  AnalyticScoreField field(ring);
  Dataset ds = sample_gmm(ring, 100, 12);
  MixConfig cfg;
  cfg.steps = 20;  // short runs; counting behavior under test here
  SUBCASE("mu = 0 gives an empty set") {
    AugmentResult r = augment_batch(ds, field, cfg, 0.0, 5);
    CHECK(r.augmented.samples.empty());
  }
  SUBCASE("mu = 10 on 100 samples gives exactly 1000") {
    AugmentResult r = augment_batch(ds, field, cfg, 10.0, 5);
    CHECK(r.augmented.samples.size() == 1000);
    CHECK(r.records.size() == 1000);
  }
  SUBCASE("labels inherited from both parents (within-class pairing)") {
    AugmentResult r = augment_batch(ds, field, cfg, 1.0, 5);
    REQUIRE(r.augmented.labels.size() == r.augmented.samples.size());
    for (std::size_t i = 0; i < r.parents.size(); ++i) {
      CHECK(ds.labels[r.parents[i].first] == ds.labels[r.parents[i].second]);
      CHECK(r.augmented.labels[i] == ds.labels[r.parents[i].first]);
      CHECK(r.parents[i].first != r.parents[i].second);
    }
  }
  SUBCASE("identical seeds give bit-identical outputs") {
    AugmentResult a = augment_batch(ds, field, cfg, 0.5, 9);
    AugmentResult b = augment_batch(ds, field, cfg, 0.5, 9);
    REQUIRE(a.augmented.samples.size() == b.augmented.samples.size());
    for (std::size_t i = 0; i < a.augmented.samples.size(); ++i)
      CHECK(a.augmented.samples[i] == b.augmented.samples[i]);
  }
  SUBCASE("fewer than 2 samples rejected") {
    Dataset one;
    one.dimension = 2;
    one.samples = {{0.0, 0.0}};
    CHECK_THROWS_AS((void)augment_batch(one, field, cfg, 1.0, 1),
                    PreconditionError);
  }
  SUBCASE("singleton class rejected under labeled pairing") {
    Dataset bad = ds;
    bad.samples.push_back({0.0, 0.0});
    bad.labels.push_back(99);
    CHECK_THROWS_AS((void)augment_batch(bad, field, cfg, 1.0, 1),
                    PreconditionError);
  }
}

TEST_CASE("grid25 density-gain property with clamped iterates") {
  GaussianMixture grid = preset_grid25();
  AnalyticScoreField field(grid);
  Dataset ds = sample_gmm(grid, 200, 21);
  ds.range_bounded = true;
  MixConfig cfg;
  cfg.clamp01 = true;
  Rng rng(2);
  int gain = 0, near_stationary_exceptions = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const std::size_t a = rng.uniform_int(ds.samples.size());
    std::size_t b;
    do { b = rng.uniform_int(ds.samples.size()); } while (b == a);
    MixConfig c = cfg;
    c.seed = rng.next_u64();
    AugmentationRecord rec = scoremix(ds.samples[a], ds.samples[b], field, c);
    for (double v : rec.x_star) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    if (grid.log_density(rec.x_star) >= grid.log_density(rec.x_mixed) - 1e-9)
      ++gain;
    else if (rec.initial_score_norm <= 1e-3)
      ++near_stationary_exceptions;
  }
  CHECK(gain + near_stationary_exceptions >= static_cast<int>(0.95 * trials));
}
