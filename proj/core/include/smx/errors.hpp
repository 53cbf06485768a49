#pragma once

#include <stdexcept>
#include <string>

namespace smx {

/// Malformed data: dimension mismatches, bad file headers, invalid
/// covariances, incompatible model/dataset pairs.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Caller violated a documented precondition (empty batch, bad range, ...).
struct PreconditionError : std::invalid_argument {
  explicit PreconditionError(const std::string& msg)
      : std::invalid_argument(msg) {}
};

/// The noise schedule cannot be built (max pairwise distance <= sigma_N).
struct DegenerateScheduleError : std::runtime_error {
  explicit DegenerateScheduleError(const std::string& msg)
      : std::runtime_error(msg) {}
};

/// Training produced a non-finite loss; carries the offending step.
struct TrainingDivergedError : std::runtime_error {
  TrainingDivergedError(const std::string& msg, long step_index)
      : std::runtime_error(msg + " (step " + std::to_string(step_index) + ")"),
        step(step_index) {}
  long step;
};

/// An augmentation iterate became non-finite; carries the offending step.
struct AugmentationDivergedError : std::runtime_error {
  AugmentationDivergedError(const std::string& msg, long step_index)
      : std::runtime_error(msg + " (step " + std::to_string(step_index) + ")"),
        step(step_index) {}
  long step;
};

struct UnsupportedError : std::runtime_error {
  explicit UnsupportedError(const std::string& msg)
      : std::runtime_error(msg) {}
};

}  // namespace smx
