#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smx/gmm.hpp"

namespace smx {

/// Sample collection; all samples share dimension d, labels (when present)
/// are contiguous class ids starting at 0.
struct Dataset {
  int dimension = 0;
  std::vector<SampleVec> samples;
  std::vector<int> labels;  // empty when unlabeled
  bool range_bounded = false;  // components constrained to [0,1]

  bool has_labels() const { return !labels.empty(); }
  std::size_t size() const { return samples.size(); }
  void validate() const;
};

/// Draw `count` i.i.d. samples; labels record the source component.
/// Deterministic for fixed seed.
Dataset sample_gmm(const GaussianMixture& gmm, std::size_t count,
                   std::uint64_t seed);

// SMXD v1 text format:
//   SMXD 1 <d> <count> <has_labels:0|1>
// then one sample per line, d floats at 17 significant digits, trailing
// integer label when has_labels=1.
void save_smxd(const Dataset& ds, const std::string& path);
Dataset load_smxd(const std::string& path);

/// Max pairwise Euclidean distance, exact O(n^2) scan.
double max_pairwise_distance(const Dataset& ds);

}  // namespace smx
