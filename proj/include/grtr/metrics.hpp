#pragma once

#include <optional>
#include <span>

#include "grtr/tensor.hpp"

namespace grtr {

struct Metrics {
  double mse = 0.0;
  // Undefined when the targets have zero variance.
  std::optional<double> explained_variance;
  double directional_accuracy = 0.0;
};

/// mse, 1 - Var(y - ŷ)/Var(y), and the fraction of matching signs (0 counts
/// as positive).
Metrics compute_metrics(std::span<const double> y_true, std::span<const double> y_pred);

/// Mean squared elementwise difference.
double weight_mse(const Vector& estimate, const Vector& truth);

double median(std::vector<double> values);

}  // namespace grtr
