#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grtr/cpd.hpp"
#include "grtr/tensor.hpp"

namespace grtr {

/// Labelled tensor samples sharing one shape.
struct Dataset {
  std::vector<DenseTensor> inputs;
  std::vector<double> labels;

  std::size_t size() const { return inputs.size(); }
  bool empty() const { return inputs.empty(); }
  const Shape& shape() const;

  /// Throws unless inputs and labels pair up and every input has the same shape.
  void validate() const;
  Dataset subset(std::span<const std::size_t> rows) const;
  Dataset range(std::size_t begin, std::size_t end) const;
};

/// One Laplacian per mode; std::nullopt means the mode is unregularized.
using ModeLaplacians = std::vector<std::optional<Matrix>>;

enum class BiasUpdate { PerMode, PerEpoch };

/// Symmetric draws factors from [-s, s]; Positive from [0, s).
enum class InitRange { Symmetric, Positive };

struct GrtrConfig {
  std::size_t rank = 1;
  std::vector<double> lambdas;  // one per mode
  double learning_rate = 1e-2;
  double tolerance = 0.0;
  std::size_t max_steps = 1000;
  std::uint64_t seed = 0;
  double init_scale = 0.1;
  InitRange init_range = InitRange::Symmetric;
  BiasUpdate bias_update = BiasUpdate::PerMode;
  // Accepted for interface completeness; no term of the loss uses it.
  std::vector<double> rho;

  /// Throws DataError on invalid values or a lambda list that does not match `order`.
  void validate(std::size_t order) const;
};

struct GrtrModel {
  CpdFactors factors;
  double bias = 0.0;
  GrtrConfig config;

  std::size_t parameter_count() const { return factors.parameter_count(); }
};

struct TrainTrace {
  std::vector<double> mse;   // training MSE at the start of each iteration
  std::vector<double> loss;  // full regularized loss at the same point
  std::size_t iterations = 0;  // completed update sweeps; equals mse.size()
  bool converged = false;      // training MSE reached the tolerance
  double final_mse = 0.0;      // at the last check, after the final sweep
  double final_loss = 0.0;
};

struct TrainResult {
  GrtrModel model;
  TrainTrace trace;
};

enum class TensorBaseline { TR, L2TR };

/// Draws factors i.i.d. uniform over the configured init range and the bias
/// uniform on [-init_scale, init_scale].
GrtrModel initialize_model(const Shape& shape, const GrtrConfig& config);

/// ⟨reconstruct(W), X⟩ + b.
double predict_materialized(const GrtrModel& m, const DenseTensor& x);
/// Σ_r X ×_1 u_r^(1) ... ×_N u_r^(N) + b, without building W.
double predict_factored(const GrtrModel& m, const DenseTensor& x);

std::vector<double> predict(const GrtrModel& m, const Dataset& data);

/// (1/M)Σ ½(y - ⟨W,X⟩ - b)² + (1/N)Σ_n ½ λ_n tr(U_n^T L_n U_n).
double loss(const GrtrModel& m, const Dataset& data, const ModeLaplacians& laplacians);

/// ∂L/∂b = -(1/M)Σ ε_m.
double grad_bias(const GrtrModel& m, const Dataset& data);

/// ∂L/∂U_n = -(1/M)Σ ε_m X_m(n) U^(-n) + (1/N) λ_n L_n U_n.
Matrix grad_factor(const GrtrModel& m, const Dataset& data, const ModeLaplacians& laplacians,
                   std::size_t mode);

/// Alternating sweep of per-mode gradient steps. Each mode's gradient is taken
/// at the current, partially updated factors. Before every sweep the training
/// MSE is checked against the tolerance; a non-finite value throws
/// DivergenceError.
TrainResult train(const Dataset& data, const ModeLaplacians& laplacians, const GrtrConfig& config);
/// Same loop starting from a given model; its config drives the run.
TrainResult train_from(GrtrModel start, const Dataset& data, const ModeLaplacians& laplacians);

/// TR: no penalty. L2TR: ½λ_n||U_n||², i.e. identity Laplacians.
TrainResult train_tensor_baseline(const Dataset& data, const GrtrConfig& config, TensorBaseline flavor);

/// Per rank term r, the chain X ×_1 u_r^(1), then ×_2 u_r^(2), ... The last
/// entry of each chain is the scalar contribution of term r.
std::vector<std::vector<Contraction>> modewise_breakdown(const GrtrModel& m, const DenseTensor& x);

}  // namespace grtr
