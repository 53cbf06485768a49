#pragma once

#include <vector>

#include "smx/dataset.hpp"

namespace smx {

/// Geometric noise schedule sigma_1 > ... > sigma_N with per-scale
/// weights omega_i = sigma_i^2.
struct NoiseSchedule {
  std::vector<double> sigmas;
  std::vector<double> weights;
  double gamma = 0.0;

  int scale_count() const { return static_cast<int>(sigmas.size()); }
  double sigma(int index_1based) const { return sigmas[index_1based - 1]; }
  double smallest() const { return sigmas.back(); }
};

/// sigma_1 = max pairwise distance, sigma_N = 0.01,
/// N = 1 + ceil(ln(sigma_N/sigma_1)/ln(0.99)), then gamma is re-fit as
/// (sigma_N/sigma_1)^{1/(N-1)} so both endpoints hold exactly.
NoiseSchedule make_schedule(const Dataset& dataset);

/// Same construction from an explicit sigma_1 (used when loading checkpoints
/// or overriding the data-derived value).
NoiseSchedule make_schedule_from_sigma1(double sigma1);

}  // namespace smx
