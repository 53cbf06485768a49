#include "smx/scorenet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "smx/adam.hpp"
#include "smx/errors.hpp"

namespace smx {

ScoreNetwork make_scorenet(int dimension, const NoiseSchedule& schedule,
                           const std::vector<int>& hidden_widths,
                           std::uint64_t seed, double data_variance,
                           const SampleVec& data_mean) {
  ScoreNetwork sn;
  sn.net = FeedForward(dimension, hidden_widths, dimension,
                       schedule.scale_count(), seed);
  sn.schedule = schedule;

  // Moment-matched warm start. Units (2j, 2j+1) of every hidden layer carry
  // the antisymmetric pair (softplus(u), softplus(-u)) whose difference is
  // exactly u, so the pairs pass +-x_j through the stack with no linearizing
  // offsets. The last layer's designated gains hold the attenuation ladder
  //   g_i = (tau^2 + sigma_N^2) / (tau^2 + sigma_i^2)  <= 1,
  // and the output taps read off -x_j g_i / (tau^2 + sigma_N^2): the score
  // of the moment-matched Gaussian at every scale, undersized by 10% so
  // training descends toward it (the correction is a shared amplitude,
  // which the ladder passes to every scale at once). Attenuation (rather than
  // amplification at the fine scales) matters: the fine scales carry almost
  // no loss weight, so they cannot relearn what optimizer noise on shared
  // parameters perturbs, and any gain > 1 would magnify that noise.
  // A non-zero data mean enters through the last layer's shift table,
  //   s_i = -/+ g_i mu_j, so the pair difference is g_i (x_j - mu_j) exactly.
  const int d = dimension;
  const bool fits = !hidden_widths.empty() &&
                    *std::min_element(hidden_widths.begin(),
                                      hidden_widths.end()) >= 2 * d;
  if (data_variance > 0.0 && fits) {
    const double sN = schedule.smallest();
    const double denom = data_variance + sN * sN;
    std::vector<double>& p = sn.net.params();
    const FeedForward& net = sn.net;
    const int layers = net.layer_count();
    for (int l = 0; l + 1 < layers; ++l) {  // hidden layers
      const int in = net.layer_in(l);
      const std::size_t w = net.weight_offset(l);
      const std::size_t b = net.bias_offset(l);
      for (int j = 0; j < d; ++j) {
        for (int u = 2 * j; u <= 2 * j + 1; ++u) {
          for (int k = 0; k < in; ++k) p[w + u * in + k] = 0.0;
          p[b + u] = 0.0;
        }
        const double sign = 1.0;
        if (l == 0) {
          p[w + (2 * j) * in + j] = sign;        // +x_j
          p[w + (2 * j + 1) * in + j] = -sign;   // -x_j
        } else {
          p[w + (2 * j) * in + 2 * j] = sign;    // softplus pair difference
          p[w + (2 * j) * in + 2 * j + 1] = -sign;
          p[w + (2 * j + 1) * in + 2 * j] = -sign;
          p[w + (2 * j + 1) * in + 2 * j + 1] = sign;
        }
      }
    }
    const int last = layers - 1;
    const std::size_t wo = net.weight_offset(last);
    const std::size_t bo = net.bias_offset(last);
    const int in_o = net.layer_in(last);
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < in_o; ++k) p[wo + j * in_o + k] = 0.0;
      p[wo + j * in_o + 2 * j] = -0.9 / denom;
      p[wo + j * in_o + 2 * j + 1] = 0.9 / denom;
      p[bo + j] = 0.0;
    }
    if (!data_mean.empty() && static_cast<int>(data_mean.size()) != d)
      throw PreconditionError("make_scorenet: data_mean dimension mismatch");
    for (int i = 1; i <= schedule.scale_count(); ++i) {
      const double s = schedule.sigma(i);
      const double g = denom / (data_variance + s * s);
      const std::size_t go = net.gain_offset(last - 1, i);
      const std::size_t so = net.shift_offset(last - 1, i);
      for (int j = 0; j < 2 * d; ++j) p[go + j] = g;
      for (int j = 0; j < d && !data_mean.empty(); ++j) {
        p[so + 2 * j] = -g * data_mean[j];
        p[so + 2 * j + 1] = g * data_mean[j];
      }
    }
  }
  return sn;
}

SampleVec eval_score(const ScoreNetwork& net, const SampleVec& x,
                     int scale_index) {
  FeedForward::Workspace ws;
  return net.net.forward(x, scale_index, ws);
}

SampleVec eval_score_input_grad(const ScoreNetwork& net, const SampleVec& x,
                                int scale_index, const SampleVec& cotangent) {
  FeedForward::Workspace ws;
  net.net.forward(x, scale_index, ws);
  return net.net.backward(ws, cotangent, nullptr);
}

namespace {

// Accumulates one (sample, scale) DSM term and its parameter gradient,
// both scaled by `scale_factor` (the averaging weight).
double dsm_term(const ScoreNetwork& net, const SampleVec& x, int scale,
                Rng& rng, double scale_factor, FeedForward::Workspace& ws,
                std::vector<double>& grad) {
  const int d = net.dimension();
  const double sigma = net.schedule.sigma(scale);
  SampleVec noisy(d);
  SampleVec target(d);  // (x~ - x)/sigma^2 = z/sigma
  for (int j = 0; j < d; ++j) {
    const double z = rng.normal();
    noisy[j] = x[j] + sigma * z;
    target[j] = z / sigma;
  }
  const SampleVec out = net.net.forward(noisy, scale, ws);
  double term = 0.0;
  SampleVec cot(d);
  const double w = sigma * sigma;  // omega_i
  for (int j = 0; j < d; ++j) {
    const double r = out[j] + target[j];
    term += w * r * r;
    cot[j] = scale_factor * 2.0 * w * r;
  }
  net.net.backward(ws, cot, &grad);
  return scale_factor * term;
}

}  // namespace

std::pair<double, std::vector<double>> dsm_loss(const ScoreNetwork& net,
                                                const std::vector<SampleVec>& batch,
                                                std::uint64_t seed,
                                                bool sum_all_scales) {
  if (batch.empty()) throw PreconditionError("dsm_loss: empty batch");
  const int n_scales = net.schedule.scale_count();
  std::vector<double> grad(net.net.param_count(), 0.0);
  FeedForward::Workspace ws;
  Rng rng(seed);
  double loss = 0.0;
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (const SampleVec& x : batch) {
    if (static_cast<int>(x.size()) != net.dimension())
      throw SchemaError("dsm_loss: sample dimension mismatch");
    if (sum_all_scales) {
      for (int s = 1; s <= n_scales; ++s)
        loss += dsm_term(net, x, s, rng, inv_b, ws, grad);
    } else {
      const int s = 1 + static_cast<int>(rng.uniform_int(n_scales));
      loss += dsm_term(net, x, s, rng, inv_b, ws, grad);
    }
  }
  return {loss, std::move(grad)};
}

ScoreTrainResult train_scorenet(const Dataset& dataset,
                                const NoiseSchedule& schedule,
                                const ScoreTrainConfig& config) {
  if (dataset.samples.empty())
    throw PreconditionError("train_scorenet: empty dataset");
  ScoreTrainResult res;
  // per-coordinate mean and variance of the data, for the moment-matched
  // warm start
  const double n = static_cast<double>(dataset.samples.size());
  SampleVec mean(dataset.dimension, 0.0);
  double variance = 0.0;
  for (int j = 0; j < dataset.dimension; ++j) {
    double sq = 0.0;
    for (const SampleVec& s : dataset.samples) mean[j] += s[j];
    mean[j] /= n;
    for (const SampleVec& s : dataset.samples)
      sq += (s[j] - mean[j]) * (s[j] - mean[j]);
    variance += sq / n;
  }
  variance /= dataset.dimension;
  res.net = make_scorenet(dataset.dimension, schedule, config.hidden_widths,
                          config.seed, config.warm_start ? variance : 0.0,
                          mean);
  AdamOptimizer adam(res.net.net.param_count(), config.learning_rate,
                     config.adam_beta1, config.adam_beta2, config.adam_epsilon);
  res.loss_trajectory.reserve(config.steps);
  Rng batch_rng(Rng(config.seed).substream(1).next_u64());
  std::vector<SampleVec> batch(config.batch_size);
  for (long step = 0; step < config.steps; ++step) {
    for (int i = 0; i < config.batch_size; ++i)
      batch[i] = dataset.samples[batch_rng.uniform_int(dataset.samples.size())];
    const std::uint64_t noise_seed = batch_rng.next_u64();
    auto [loss, grad] =
        dsm_loss(res.net, batch, noise_seed, config.sum_all_scales);
    if (!std::isfinite(loss))
      throw TrainingDivergedError("train_scorenet: non-finite loss", step);
    adam.step(res.net.net.params(), grad);
    res.loss_trajectory.push_back(loss);
  }
  for (double p : res.net.net.params())
    if (!std::isfinite(p))
      throw TrainingDivergedError("train_scorenet: non-finite parameter",
                                  config.steps);
  return res;
}

void save_smxn(const ScoreNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("save_smxn: cannot open " + path);
  out << "SMXN 1 " << net.dimension() << ' ' << net.schedule.scale_count();
  for (int w : net.net.hidden_widths()) out << ' ' << w;
  out << '\n';
  char buf[64];
  auto emit = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << '\n';
  };
  for (double s : net.schedule.sigmas) emit(s);
  for (double p : net.net.params()) emit(p);
  if (!out) throw SchemaError("save_smxn: write failed for " + path);
}

ScoreNetwork load_smxn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("load_smxn: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("load_smxn: empty file");
  std::istringstream header(line);
  std::string magic;
  int version = 0, d = 0, n_scales = 0;
  header >> magic >> version >> d >> n_scales;
  if (magic != "SMXN" || version != 1 || d < 1 || n_scales < 1)
    throw SchemaError("load_smxn: bad header in " + path);
  std::vector<int> widths;
  for (int w; header >> w;) widths.push_back(w);

  NoiseSchedule sched;
  sched.sigmas.resize(n_scales);
  sched.weights.resize(n_scales);
  for (int i = 0; i < n_scales; ++i) {
    if (!(in >> sched.sigmas[i]))
      throw SchemaError("load_smxn: truncated sigma list in " + path);
    sched.weights[i] = sched.sigmas[i] * sched.sigmas[i];
  }
  sched.gamma = n_scales > 1
      ? std::pow(sched.sigmas.back() / sched.sigmas.front(), 1.0 / (n_scales - 1))
      : 1.0;

  ScoreNetwork net = make_scorenet(d, sched, widths, 0);
  for (double& p : net.net.params())
    if (!(in >> p))
      throw SchemaError("load_smxn: parameter count mismatch in " + path);
  double extra;
  if (in >> extra) throw SchemaError("load_smxn: trailing data in " + path);
  return net;
}

}  // namespace smx
