#include "smx/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "smx/errors.hpp"

namespace smx {

void Dataset::validate() const {
  if (dimension < 1) throw SchemaError("Dataset: dimension must be >= 1");
  for (const SampleVec& s : samples) {
    if (static_cast<int>(s.size()) != dimension)
      throw SchemaError("Dataset: sample dimension mismatch");
    for (double v : s)
      if (!std::isfinite(v)) throw SchemaError("Dataset: non-finite component");
  }
  if (!labels.empty()) {
    if (labels.size() != samples.size())
      throw SchemaError("Dataset: label count != sample count");
    for (int l : labels)
      if (l < 0) throw SchemaError("Dataset: negative label");
  }
}

Dataset sample_gmm(const GaussianMixture& gmm, std::size_t count,
                   std::uint64_t seed) {
  if (count < 1) throw PreconditionError("sample_gmm: count must be >= 1");
  Dataset ds;
  ds.dimension = gmm.dimension();
  ds.samples.reserve(count);
  ds.labels.reserve(count);
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    int label = 0;
    ds.samples.push_back(gmm.draw(rng, &label));
    ds.labels.push_back(label);
  }
  return ds;
}

void save_smxd(const Dataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream out(path);
  if (!out) throw SchemaError("save_smxd: cannot open " + path);
  out << "SMXD 1 " << ds.dimension << ' ' << ds.samples.size() << ' '
      << (ds.has_labels() ? 1 : 0) << '\n';
  char buf[64];
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    for (int j = 0; j < ds.dimension; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", ds.samples[i][j]);
      if (j) out << ' ';
      out << buf;
    }
    if (ds.has_labels()) out << ' ' << ds.labels[i];
    out << '\n';
  }
  if (!out) throw SchemaError("save_smxd: write failed for " + path);
}

Dataset load_smxd(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("load_smxd: cannot open " + path);
  std::string magic;
  int version = 0, d = 0, has_labels = 0;
  std::size_t count = 0;
  in >> magic >> version >> d >> count >> has_labels;
  if (!in || magic != "SMXD" || version != 1)
    throw SchemaError("load_smxd: bad header in " + path);
  if (d < 1) throw SchemaError("load_smxd: invalid dimension");
  Dataset ds;
  ds.dimension = d;
  ds.samples.reserve(count);
  if (has_labels) ds.labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SampleVec s(d);
    for (int j = 0; j < d; ++j) in >> s[j];
    if (has_labels) {
      int l;
      in >> l;
      ds.labels.push_back(l);
    }
    if (!in) throw SchemaError("load_smxd: truncated sample data in " + path);
    ds.samples.push_back(std::move(s));
  }
  ds.validate();
  return ds;
}

double max_pairwise_distance(const Dataset& ds) {
  double best = 0.0;
  const std::size_t n = ds.samples.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < ds.dimension; ++k) {
        const double diff = ds.samples[i][k] - ds.samples[j][k];
        acc += diff * diff;
      }
      best = std::max(best, acc);
    }
  return std::sqrt(best);
}

}  // namespace smx
