#include "smx/augment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "smx/errors.hpp"

namespace smx {

namespace {
constexpr int kMaxHalvings = 10;
constexpr double kStationaryGradNorm = 1e-3;

void clamp_unit(SampleVec& x) {
  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
}

double norm2(const SampleVec& v) {
  double acc = 0.0;
  for (double c : v) acc += c * c;
  return std::sqrt(acc);
}
}  // namespace

double sample_lambda(double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw PreconditionError("sample_lambda: alpha must be > 0");
  Rng rng(seed);
  return rng.beta(alpha, alpha);
}

SampleVec mixup(const SampleVec& x1, const SampleVec& x2, double lambda) {
  if (x1.size() != x2.size())
    throw SchemaError("mixup: dimension mismatch");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw PreconditionError("mixup: lambda must lie in [0,1]");
  SampleVec out(x1.size());
  for (std::size_t i = 0; i < x1.size(); ++i)
    out[i] = lambda * x1[i] + (1.0 - lambda) * x2[i];
  return out;
}

std::pair<double, SampleVec> score_norm_objective(const ScoreField& field,
                                                  const SampleVec& x) {
  if (static_cast<int>(x.size()) != field.dimension())
    throw SchemaError("score_norm_objective: dimension mismatch");
  const SampleVec s = field.score(x);
  double value = 0.0;
  for (double c : s) value += c * c;
  SampleVec cot(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) cot[i] = 2.0 * s[i];
  return {value, field.score_input_grad(x, cot)};
}

SampleVec denoise_finetune(const SampleVec& x, const ScoreNetwork& net,
                           double t0, bool clamp01) {
  if (!(t0 > 0.0 && t0 <= 1.0))
    throw PreconditionError("denoise_finetune: t0 must lie in (0, 1]");
  if (static_cast<int>(x.size()) != net.dimension())
    throw SchemaError("denoise_finetune: dimension mismatch");
  const int n = net.schedule.scale_count();
  const int i0 = std::max(
      1, static_cast<int>(std::lround((1.0 - t0) * (n - 1))) + 1);
  const double sigma = net.schedule.sigma(i0);
  const SampleVec s = eval_score(net, x, i0);
  SampleVec out(x);
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] += sigma * sigma * s[j];
  if (clamp01) clamp_unit(out);
  return out;
}

AugmentationRecord scoremix(const SampleVec& x1, const SampleVec& x2,
                            const ScoreField& field, const MixConfig& config) {
  if (x1.size() != x2.size() ||
      static_cast<int>(x1.size()) != field.dimension())
    throw SchemaError("scoremix: dimension mismatch");
  AugmentationRecord rec;
  rec.x1 = x1;
  rec.x2 = x2;
  rec.lambda = sample_lambda(config.alpha, config.seed);
  rec.x_mixed = mixup(x1, x2, rec.lambda);

  SampleVec x = rec.x_mixed;
  if (config.clamp01) clamp_unit(x);
  auto [value, grad] = score_norm_objective(field, x);
  rec.initial_score_norm = std::sqrt(value);

  for (int t = 0; t < config.steps; ++t) {
    if (norm2(grad) <= kStationaryGradNorm) break;  // stationary point reached
    const double eta_t =
        config.eta * (1.0 - static_cast<double>(t) / config.steps);
    double trial = eta_t;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      SampleVec candidate(x.size());
      for (std::size_t j = 0; j < x.size(); ++j)
        candidate[j] = x[j] - trial * grad[j];
      if (config.clamp01) clamp_unit(candidate);
      for (double v : candidate)
        if (!std::isfinite(v))
          throw AugmentationDivergedError("scoremix: non-finite iterate", t);
      auto [cand_value, cand_grad] = score_norm_objective(field, candidate);
      if (cand_value <= value) {
        x = std::move(candidate);
        value = cand_value;
        grad = std::move(cand_grad);
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    rec.steps_run = t + 1;
    if (!accepted) continue;  // step skipped; objective never increases
  }

  rec.final_score_norm = std::sqrt(value);
  rec.x_star = x;
  if (const ScoreNetwork* net = field.network())
    rec.x_star = denoise_finetune(rec.x_star, *net, config.t0, config.clamp01);
  return rec;
}

AugmentResult augment_batch(const Dataset& dataset, const ScoreField& field,
                            const MixConfig& config, double mu,
                            std::uint64_t seed) {
  if (!(mu >= 0.0)) throw PreconditionError("augment_batch: mu must be >= 0");
  if (dataset.samples.size() < 2)
    throw PreconditionError("augment_batch: need at least 2 samples");

  std::unordered_map<int, std::vector<std::size_t>> by_class;
  if (dataset.has_labels()) {
    for (std::size_t i = 0; i < dataset.samples.size(); ++i)
      by_class[dataset.labels[i]].push_back(i);
    for (const auto& [label, members] : by_class)
      if (members.size() < 2)
        throw PreconditionError("augment_batch: class " +
                                std::to_string(label) +
                                " has fewer than 2 samples");
  }

  const std::size_t count = static_cast<std::size_t>(
      std::ceil(mu * static_cast<double>(dataset.samples.size())));
  AugmentResult result;
  result.augmented.dimension = dataset.dimension;
  result.augmented.range_bounded = dataset.range_bounded;
  result.augmented.samples.reserve(count);
  result.records.reserve(count);
  result.parents.reserve(count);

  const Rng base(seed);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = base.substream(i);
    const std::size_t a = rng.uniform_int(dataset.samples.size());
    std::size_t b;
    if (dataset.has_labels()) {
      const std::vector<std::size_t>& members = by_class[dataset.labels[a]];
      do {
        b = members[rng.uniform_int(members.size())];
      } while (b == a);
    } else {
      do {
        b = rng.uniform_int(dataset.samples.size());
      } while (b == a);
    }
    MixConfig per_sample = config;
    per_sample.seed = rng.next_u64();
    AugmentationRecord rec =
        scoremix(dataset.samples[a], dataset.samples[b], field, per_sample);
    result.augmented.samples.push_back(rec.x_star);
    if (dataset.has_labels())
      result.augmented.labels.push_back(dataset.labels[a]);
    result.parents.emplace_back(a, b);
    result.records.push_back(std::move(rec));
  }
  return result;
}

void save_smxa(const AugmentResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("save_smxa: cannot open " + path);
  out << "SMXA 1 " << result.records.size() << '\n';
  char buf[256];
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const AugmentationRecord& r = result.records[i];
    std::snprintf(buf, sizeof buf, "%zu %zu %.17g %.17g %.17g %d\n",
                  result.parents[i].first, result.parents[i].second, r.lambda,
                  r.initial_score_norm, r.final_score_norm, r.steps_run);
    out << buf;
  }
  if (!out) throw SchemaError("save_smxa: write failed for " + path);
}

}  // namespace smx
