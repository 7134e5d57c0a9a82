#include "grtr/grid_search.hpp"

#include <limits>

#include "grtr/metrics.hpp"

namespace grtr {

GridResult grid_search(const Dataset& train, const Dataset& validation, std::span<const std::size_t> ranks,
                       std::span<const double> lambdas, const GrtrConfig& base, const ModeLaplacians& laplacians) {
  if (ranks.empty() || lambdas.empty()) throw DataError("grid search needs at least one rank and one lambda");
  if (validation.empty()) throw DataError("grid search needs a nonempty validation set");
  const std::size_t order = train.shape().size();

  GridResult out;
  std::optional<TrainResult> best;
  for (std::size_t r : ranks) {
    for (double l : lambdas) {
      GridCell cell;
      cell.rank = r;
      cell.lambda = l;
      cell.seed = base.seed + out.cells.size();
      GrtrConfig c = base;
      c.rank = r;
      c.seed = cell.seed;
      c.lambdas.assign(order, 0.0);
      for (std::size_t n = 0; n < order && n < laplacians.size(); ++n) {
        if (laplacians[n]) c.lambdas[n] = l;
      }
      try {
        TrainResult res = grtr::train(train, laplacians, c);
        const auto pred = predict(res.model, validation);
        cell.validation_mse = compute_metrics(validation.labels, pred).mse;
        cell.train_mse = compute_metrics(train.labels, predict(res.model, train)).mse;
        const bool better = [&] {
          if (!best) return true;
          const GridCell& b = out.cells[out.best];
          if (*cell.validation_mse != *b.validation_mse) return *cell.validation_mse < *b.validation_mse;
          if (cell.rank != b.rank) return cell.rank < b.rank;
          return cell.lambda < b.lambda;
        }();
        if (better) {
          out.best = out.cells.size();
          best = std::move(res);
        }
      } catch (const Error& e) {
        cell.error = e.what();
      }
      out.cells.push_back(std::move(cell));
    }
  }
  if (!best) throw DataError("every grid cell failed; first error: " + out.cells.front().error);
  out.best_model = std::move(best->model);
  out.best_trace = std::move(best->trace);
  return out;
}

}  // namespace grtr
