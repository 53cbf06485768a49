#include "smx/schedule.hpp"

#include <cmath>

#include "smx/errors.hpp"

namespace smx {

namespace {
constexpr double kSigmaN = 0.01;
constexpr double kNominalGamma = 0.99;
}  // namespace

NoiseSchedule make_schedule_from_sigma1(double sigma1) {
  if (!(sigma1 > kSigmaN))
    throw DegenerateScheduleError(
        "make_schedule: max pairwise distance must exceed sigma_N = 0.01");
  const int n = 1 + static_cast<int>(
      std::ceil(std::log(kSigmaN / sigma1) / std::log(kNominalGamma)));
  NoiseSchedule sched;
  sched.gamma = std::pow(kSigmaN / sigma1, 1.0 / (n - 1));
  sched.sigmas.resize(n);
  sched.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    sched.sigmas[i] = sigma1 * std::pow(sched.gamma, i);
    sched.weights[i] = sched.sigmas[i] * sched.sigmas[i];
  }
  sched.sigmas[0] = sigma1;       // endpoint-exact
  sched.sigmas[n - 1] = kSigmaN;
  sched.weights[0] = sigma1 * sigma1;
  sched.weights[n - 1] = kSigmaN * kSigmaN;
  return sched;
}

NoiseSchedule make_schedule(const Dataset& dataset) {
  if (dataset.samples.size() < 2)
    throw PreconditionError("make_schedule: need at least 2 samples");
  return make_schedule_from_sigma1(max_pairwise_distance(dataset));
}

}  // namespace smx
