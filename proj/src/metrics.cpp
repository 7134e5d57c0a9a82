#include "grtr/metrics.hpp"

#include <algorithm>

namespace grtr {

namespace {

double variance(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return var / static_cast<double>(v.size());
}

}  // namespace

Metrics compute_metrics(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw DimensionError("metrics need equal lengths, got " + std::to_string(y_true.size()) + " and " +
                         std::to_string(y_pred.size()));
  }
  if (y_true.empty()) throw DataError("metrics need at least one sample");
  const auto n = y_true.size();
  std::vector<double> resid(n);
  Metrics out;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    resid[i] = y_true[i] - y_pred[i];
    out.mse += resid[i] * resid[i];
    if ((y_true[i] >= 0.0) == (y_pred[i] >= 0.0)) ++hits;
  }
  out.mse /= static_cast<double>(n);
  out.directional_accuracy = static_cast<double>(hits) / static_cast<double>(n);
  const double var_y = variance(y_true);
  if (var_y > 0.0) out.explained_variance = 1.0 - variance(resid) / var_y;
  return out;
}

double weight_mse(const Vector& estimate, const Vector& truth) {
  if (estimate.size() != truth.size()) throw DimensionError("weight vectors differ in length");
  return (estimate - truth).squaredNorm() / static_cast<double>(truth.size());
}

double median(std::vector<double> values) {
  if (values.empty()) throw DataError("median of an empty list");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace grtr
