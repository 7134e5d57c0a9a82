#pragma once

#include <vector>

#include "grtr/model.hpp"
#include "grtr/tensor.hpp"

namespace grtr {

/// y = w^T vec(X) + b, with vec() as in vectorize().
struct LinearModel {
  Vector weights;
  double bias = 0.0;
  double l2 = 0.0;

  std::size_t parameter_count() const { return static_cast<std::size_t>(weights.size()); }
  double predict(const DenseTensor& x) const;
  std::vector<double> predict(const Dataset& data) const;
};

enum class LinearFlavor { Plain, Ridge };

/// Least squares on vectorized inputs with an unpenalized bias (handled by
/// centering). Ridge solves the normal equations with +λI, in the primal or,
/// when features outnumber samples, the equivalent dual (Gram) form. Plain
/// returns the minimum-norm least-squares solution and rejects overdetermined
/// problems whose normal equations are singular.
LinearModel train_linear(const Dataset& data, double l2, LinearFlavor flavor);

}  // namespace grtr
