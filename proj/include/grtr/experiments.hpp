#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grtr/finance.hpp"
#include "grtr/model.hpp"
#include "grtr/synthetic.hpp"

namespace grtr {

enum class ModelKind { LR, L2LR, TR, L2TR, GRTR };

inline const std::vector<ModelKind> kAllModels = {ModelKind::LR, ModelKind::L2LR, ModelKind::TR, ModelKind::L2TR,
                                                  ModelKind::GRTR};

std::string model_name(ModelKind kind);
/// Comma-separated, case-insensitive names, or "all". Throws
/// std::invalid_argument on an unknown or repeated name.
std::vector<ModelKind> parse_models(const std::string& csv);

/// Receives plot-ready side outputs (file name relative to the export
/// directory, contents).
using ExportSink = std::function<void(const std::string& name, const std::string& contents)>;

struct SyntheticOptions {
  SyntheticSpec spec;  // spec.seed is the base seed; run k uses base + k
  std::size_t seeds = 1;
  std::vector<ModelKind> models = kAllModels;
  std::size_t rank = 5;
  std::vector<double> grtr_lambdas = {100.0, 100.0, 100.0, 100.0};
  double l2tr_lambda = 45.0;
  double ridge = 10.0;
  double learning_rate = 1e-3;
  double tolerance = 0.0;
  std::size_t max_steps = 300;
  double init_scale = 0.5;
  InitRange init_range = InitRange::Positive;
  BiasUpdate bias_update = BiasUpdate::PerMode;
};

/// Generates, splits and trains every requested model once per seed. The
/// report's "models" hold medians over seeds; "seeds" holds each run.
nlohmann::json run_synthetic_experiment(const SyntheticOptions& options, const ExportSink& sink = {});

struct FinanceOptions {
  std::optional<std::filesystem::path> prices, sectors, index;
  bool fixture = false;
  std::size_t fixture_stocks = 20, fixture_sectors = 4, fixture_dates = 500;
  WindowOptions window;
  std::vector<ModelKind> models = kAllModels;
  std::vector<std::size_t> ranks = {1, 2, 4};
  std::vector<double> lambdas = {0.0, 1.0, 10.0};
  std::vector<double> ridges = {1.0, 10.0, 100.0, 1000.0, 10000.0};
  double beta = 1.0;  // weight of each same-sector edge
  double learning_rate = 5e-2;
  double tolerance = 0.0;
  std::size_t max_steps = 300;
  double init_scale = 0.3;
  InitRange init_range = InitRange::Symmetric;
  BiasUpdate bias_update = BiasUpdate::PerMode;
  std::uint64_t seed = 0;
};

struct FinanceOutcome {
  nlohmann::json report;
  std::optional<GrtrModel> grtr_model;
  WindowedDataset windows;
  std::vector<std::string> tickers, sectors;
};

/// Ingests (or generates) the panel, windows it, selects each model's
/// hyper-parameters on the validation range and reports all three ranges.
FinanceOutcome run_finance_experiment(const FinanceOptions& options, const ExportSink& sink = {});

/// Drops every "wall_time_s" key, recursively.
nlohmann::json strip_wall_times(nlohmann::json report);

}  // namespace grtr
