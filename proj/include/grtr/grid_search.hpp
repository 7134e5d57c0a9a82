#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grtr/model.hpp"

namespace grtr {

struct GridCell {
  std::size_t rank = 1;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> validation_mse;  // empty when training failed
  std::optional<double> train_mse;
  std::string error;
};

struct GridResult {
  std::vector<GridCell> cells;  // ranks outer, lambdas inner
  std::size_t best = 0;         // index into cells
  GrtrModel best_model;
  TrainTrace best_trace;

  const GridCell& best_cell() const { return cells.at(best); }
};

/// Trains one model per (rank, lambda) cell on `train` and scores it by MSE on
/// `validation`. Cell k is seeded with base.seed + k. Lambda is applied to
/// every mode that has a Laplacian and is 0 elsewhere. Ties go to the smaller
/// rank, then the smaller lambda. A failing cell is recorded with its message;
/// DataError is thrown only if every cell fails.
GridResult grid_search(const Dataset& train, const Dataset& validation, std::span<const std::size_t> ranks,
                       std::span<const double> lambdas, const GrtrConfig& base, const ModeLaplacians& laplacians);

}  // namespace grtr
