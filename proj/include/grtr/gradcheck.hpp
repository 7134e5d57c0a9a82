#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace grtr {

struct GradcheckOptions {
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  double tolerance = 1e-4;  // on the relative error of each gradient block
  double step = 1e-5;       // central-difference step
  // Scales the analytic factor gradient by 1.01 so the detector can be tested.
  bool corrupt_gradient = false;
};

struct GradcheckTrial {
  std::string description;
  double max_relative_error = 0.0;
  bool passed = false;
};

struct GradcheckReport {
  std::vector<GradcheckTrial> trials;
  std::size_t failures = 0;
  double max_relative_error = 0.0;
};

/// Compares grad_factor and grad_bias with central differences of loss on
/// random instances: order 2 or 3, mode sizes 1..4, rank 1..3, 1..8 samples,
/// lambda 0 or 0.5 with kernel-graph Laplacians on every mode. Relative error
/// is ||analytic - numeric|| / max(||analytic||, ||numeric||, 1e-8).
GradcheckReport run_gradcheck(const GradcheckOptions& options);

}  // namespace grtr
