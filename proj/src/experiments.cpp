#include "grtr/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <stdexcept>

#include <fmt/format.h>

#include "grtr/graph.hpp"
#include "grtr/grid_search.hpp"
#include "grtr/linear.hpp"
#include "grtr/metrics.hpp"
#include "grtr/serialization.hpp"

namespace grtr {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json metrics_json(const Metrics& m) {
  return {{"mse", m.mse},
          {"explained_variance", optional_json(m.explained_variance)},
          {"directional_accuracy", m.directional_accuracy}};
}

std::size_t linear_parameter_count(const Shape& shape) { return element_count(shape); }

ModeLaplacians identity_laplacians(const Shape& shape) {
  ModeLaplacians out;
  for (auto d : shape) {
    const auto n = static_cast<Eigen::Index>(d);
    out.emplace_back(Matrix::Identity(n, n));
  }
  return out;
}

// Median of each numeric leaf across runs; null if any run has null there.
json median_of(const std::vector<json>& runs, const std::vector<std::string>& path) {
  std::vector<double> values;
  for (const auto& r : runs) {
    const json* node = &r;
    for (const auto& key : path) node = &node->at(key);
    if (node->is_null()) return nullptr;
    values.push_back(node->get<double>());
  }
  return median(values);
}

json median_model(const std::vector<json>& runs) {
  const json& first = runs.front();
  json out = {{"name", first.at("name")}, {"params", first.at("params")},
              {"params_with_bias", first.at("params_with_bias")}};
  if (first.contains("weight_mse")) out["weight_mse"] = median_of(runs, {"weight_mse"});
  for (const char* split : {"train", "test"}) {
    json m;
    for (const char* key : {"mse", "explained_variance", "directional_accuracy"}) {
      m[key] = median_of(runs, {split, key});
    }
    out[split] = m;
  }
  out["wall_time_s"] = median_of(runs, {"wall_time_s"});
  return out;
}

GrtrConfig base_config(std::size_t rank, std::size_t order, double lr, double tol, std::size_t steps, double scale,
                       InitRange range, BiasUpdate bias, std::uint64_t seed) {
  GrtrConfig c;
  c.rank = rank;
  c.lambdas.assign(order, 0.0);
  c.learning_rate = lr;
  c.tolerance = tol;
  c.max_steps = steps;
  c.init_scale = scale;
  c.init_range = range;
  c.bias_update = bias;
  c.seed = seed;
  return c;
}

}  // namespace

std::string model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::LR: return "LR";
    case ModelKind::L2LR: return "L2LR";
    case ModelKind::TR: return "TR";
    case ModelKind::L2TR: return "L2TR";
    case ModelKind::GRTR: return "GRTR";
  }
  return "?";
}

std::vector<ModelKind> parse_models(const std::string& csv) {
  if (lower(csv) == "all") return kAllModels;
  std::vector<ModelKind> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto comma = std::min(csv.find(',', start), csv.size());
    const std::string name = lower(csv.substr(start, comma - start));
    bool found = false;
    for (auto k : kAllModels) {
      if (lower(model_name(k)) != name) continue;
      if (std::find(out.begin(), out.end(), k) != out.end()) {
        throw std::invalid_argument("model '" + name + "' listed twice");
      }
      out.push_back(k);
      found = true;
    }
    if (!found) throw std::invalid_argument("unknown model '" + name + "' (expected lr, l2lr, tr, l2tr, grtr or all)");
    start = comma + 1;
  }
  return out;
}

json strip_wall_times(json report) {
  if (report.is_object()) {
    report.erase("wall_time_s");
    for (auto& [key, value] : report.items()) value = strip_wall_times(value);
  } else if (report.is_array()) {
    for (auto& value : report) value = strip_wall_times(value);
  }
  return report;
}

json run_synthetic_experiment(const SyntheticOptions& options, const ExportSink& sink) {
  options.spec.validate();
  if (options.seeds < 1) throw DataError("need at least one seed");
  if (options.models.empty()) throw DataError("no models requested");
  if (options.grtr_lambdas.size() != options.spec.order) {
    throw DataError("expected " + std::to_string(options.spec.order) + " GRTR lambdas (one per mode), got " +
                    std::to_string(options.grtr_lambdas.size()));
  }

  std::vector<std::vector<json>> per_model(options.models.size());
  json seeds = json::array();
  for (std::size_t k = 0; k < options.seeds; ++k) {
    SyntheticSpec spec = options.spec;
    spec.seed = options.spec.seed + k;
    const SyntheticData data = generate_synthetic(spec);
    const TrainTestSplit split = split_synthetic(data.samples, spec.seed);
    const Shape shape = data.samples.shape();
    const Vector truth = cpd_vectorize(data.truth);
    const std::string prefix = fmt::format("seed{}_", spec.seed);
    if (sink) {
      for (std::size_t n = 0; n < data.graphs.size(); ++n) {
        sink(fmt::format("{}graph_mode{}_laplacian.csv", prefix, n + 1), matrix_to_csv(data.graphs[n].laplacian));
      }
    }

    json run = {{"seed", spec.seed}, {"noise_std", data.noise_std}, {"label_std", data.label_std}};
    json models = json::array();
    for (std::size_t i = 0; i < options.models.size(); ++i) {
      const ModelKind kind = options.models[i];
      const auto start = Clock::now();
      json entry = {{"name", model_name(kind)}};
      std::vector<double> train_pred, test_pred;
      Vector estimate;
      if (kind == ModelKind::LR || kind == ModelKind::L2LR) {
        const bool ridge = kind == ModelKind::L2LR;
        const LinearModel m = train_linear(split.train, ridge ? options.ridge : 0.0,
                                           ridge ? LinearFlavor::Ridge : LinearFlavor::Plain);
        train_pred = m.predict(split.train);
        test_pred = m.predict(split.test);
        estimate = m.weights;
        entry["params"] = linear_parameter_count(shape);
        entry["params_with_bias"] = linear_parameter_count(shape) + 1;
        entry["l2"] = m.l2;
      } else {
        GrtrConfig c = base_config(options.rank, spec.order, options.learning_rate, options.tolerance,
                                   options.max_steps, options.init_scale, options.init_range, options.bias_update,
                                   spec.seed);
        ModeLaplacians laplacians;
        if (kind == ModelKind::L2TR) {
          laplacians = identity_laplacians(shape);
          c.lambdas.assign(spec.order, options.l2tr_lambda);
        } else if (kind == ModelKind::GRTR) {
          for (const auto& g : data.graphs) laplacians.emplace_back(g.laplacian);
          c.lambdas = options.grtr_lambdas;
        }
        const TrainResult res = train(split.train, laplacians, c);
        train_pred = predict(res.model, split.train);
        test_pred = predict(res.model, split.test);
        estimate = cpd_vectorize(res.model.factors);
        entry["params"] = res.model.parameter_count();
        entry["params_with_bias"] = res.model.parameter_count() + 1;
        entry["lambdas"] = c.lambdas;
        entry["iterations"] = res.trace.iterations;
        entry["converged"] = res.trace.converged;
        if (sink) {
          const std::string name = prefix + lower(model_name(kind)) + "_trace.csv";
          sink(name, trace_to_csv(res.trace));
          entry["trace"] = name;
        }
      }
      entry["weight_mse"] = weight_mse(estimate, truth);
      entry["train"] = metrics_json(compute_metrics(split.train.labels, train_pred));
      entry["test"] = metrics_json(compute_metrics(split.test.labels, test_pred));
      entry["wall_time_s"] = seconds_since(start);
      per_model[i].push_back(entry);
      models.push_back(std::move(entry));
    }
    run["models"] = std::move(models);
    seeds.push_back(std::move(run));
  }

  json medians = json::array();
  for (const auto& runs : per_model) medians.push_back(median_model(runs));

  std::vector<std::string> names;
  for (auto k : options.models) names.push_back(model_name(k));
  json config = {{"order", options.spec.order},
                 {"mode_size", options.spec.mode_size},
                 {"true_rank", options.spec.true_rank},
                 {"samples", options.spec.samples},
                 {"noise_ratio", options.spec.noise_ratio},
                 {"beta", options.spec.beta},
                 {"base_seed", options.spec.seed},
                 {"seeds", options.seeds},
                 {"models", names},
                 {"rank", options.rank},
                 {"grtr_lambdas", options.grtr_lambdas},
                 {"l2tr_lambda", options.l2tr_lambda},
                 {"ridge", options.ridge},
                 {"learning_rate", options.learning_rate},
                 {"tolerance", options.tolerance},
                 {"max_steps", options.max_steps},
                 {"init_scale", options.init_scale},
                 {"init_range", options.init_range == InitRange::Positive ? "positive" : "symmetric"},
                 {"bias_update", options.bias_update == BiasUpdate::PerEpoch ? "per_epoch" : "per_mode"}};
  return {{"schema_version", 1},
          {"experiment", "synthetic"},
          {"aggregate", "median"},
          {"config", std::move(config)},
          {"models", std::move(medians)},
          {"seeds", std::move(seeds)}};
}

namespace {

struct Ranges {
  Dataset train, validation, test;
};

json finance_split_json(const WindowedDataset& w, SplitRange range, const std::vector<double>& pred) {
  std::vector<double> y(w.data.labels.begin() + static_cast<std::ptrdiff_t>(range.begin),
                        w.data.labels.begin() + static_cast<std::ptrdiff_t>(range.end));
  std::vector<double> raw(w.raw_labels.begin() + static_cast<std::ptrdiff_t>(range.begin),
                          w.raw_labels.begin() + static_cast<std::ptrdiff_t>(range.end));
  std::vector<double> raw_pred;
  for (double p : pred) raw_pred.push_back(w.destandardize(p));
  json out = metrics_json(compute_metrics(raw, raw_pred));
  out["standardized"] = metrics_json(compute_metrics(y, pred));
  out["samples"] = range.size();
  return out;
}

json grid_json(const GridResult& g) {
  json cells = json::array();
  for (const auto& c : g.cells) {
    json cell = {{"rank", c.rank},
                 {"lambda", c.lambda},
                 {"seed", c.seed},
                 {"validation_mse", optional_json(c.validation_mse)},
                 {"train_mse", optional_json(c.train_mse)}};
    if (!c.error.empty()) cell["error"] = c.error;
    cells.push_back(std::move(cell));
  }
  return {{"cells", std::move(cells)}, {"best", g.best}};
}

}  // namespace

FinanceOutcome run_finance_experiment(const FinanceOptions& options, const ExportSink& sink) {
  if (options.models.empty()) throw DataError("no models requested");
  if (!(options.beta > 0.0)) throw DataError("beta must be positive");
  if (options.ridges.empty()) throw DataError("ridge grid is empty");

  PanelDataset panel;
  if (options.fixture) {
    const FixtureFiles files = generate_financial_fixture(options.fixture_stocks, options.fixture_sectors,
                                                          options.fixture_dates, options.seed);
    panel = ingest_prices_text(files.prices_csv, files.sectors_csv);
    if (sink) {
      sink("fixture_prices.csv", files.prices_csv);
      sink("fixture_sectors.csv", files.sectors_csv);
    }
  } else {
    if (!options.prices || !options.sectors) throw DataError("finance needs --prices and --sectors, or --fixture");
    panel = ingest_prices(*options.prices, *options.sectors);
  }
  if (options.index) attach_index(panel, read_text_file(*options.index));

  FinanceOutcome out;
  out.windows = build_windows(panel, options.window);
  out.tickers = panel.tickers;
  out.sectors = panel.sectors;
  const WindowedDataset& w = out.windows;
  const Ranges r{w.data.range(w.train.begin, w.train.end), w.data.range(w.validation.begin, w.validation.end),
                 w.data.range(w.test.begin, w.test.end)};
  const Shape shape = w.data.shape();

  const GraphSpec sector_graph = laplacian_from_adjacency(options.beta * sector_adjacency(panel.sectors));
  if (sink) sink("sector_laplacian.csv", matrix_to_csv(sector_graph.laplacian));

  const GrtrConfig base = base_config(1, shape.size(), options.learning_rate, options.tolerance, options.max_steps,
                                      options.init_scale, options.init_range, options.bias_update, options.seed);
  const std::vector<double> no_lambda = {0.0};

  json models = json::array();
  json grids = json::array();
  for (const ModelKind kind : options.models) {
    const auto start = Clock::now();
    json entry = {{"name", model_name(kind)}};
    std::function<std::vector<double>(const Dataset&)> predictor;
    if (kind == ModelKind::LR || kind == ModelKind::L2LR) {
      LinearModel best;
      if (kind == ModelKind::LR) {
        best = train_linear(r.train, 0.0, LinearFlavor::Plain);
      } else {
        double best_mse = 0.0;
        json cells = json::array();
        for (std::size_t i = 0; i < options.ridges.size(); ++i) {
          LinearModel m = train_linear(r.train, options.ridges[i], LinearFlavor::Ridge);
          const double mse = compute_metrics(r.validation.labels, m.predict(r.validation)).mse;
          cells.push_back({{"l2", options.ridges[i]}, {"validation_mse", mse}});
          if (i == 0 || mse < best_mse || (mse == best_mse && m.l2 < best.l2)) {
            best_mse = mse;
            best = std::move(m);
          }
        }
        grids.push_back({{"model", "L2LR"}, {"cells", std::move(cells)}});
      }
      entry["params"] = linear_parameter_count(shape);
      entry["params_with_bias"] = linear_parameter_count(shape) + 1;
      entry["selected"] = {{"l2", best.l2}};
      predictor = [best](const Dataset& d) { return best.predict(d); };
    } else {
      ModeLaplacians laplacians(shape.size());
      if (kind == ModelKind::L2TR) laplacians = identity_laplacians(shape);
      if (kind == ModelKind::GRTR) laplacians[1] = sector_graph.laplacian;
      const std::vector<double>& lambdas = kind == ModelKind::TR ? no_lambda : options.lambdas;
      GridResult g = grid_search(r.train, r.validation, options.ranks, lambdas, base, laplacians);
      const GrtrModel model = g.best_model;
      entry["params"] = model.parameter_count();
      entry["params_with_bias"] = model.parameter_count() + 1;
      entry["selected"] = {{"rank", g.best_cell().rank}, {"lambda", g.best_cell().lambda}};
      entry["iterations"] = g.best_trace.iterations;
      json grid = grid_json(g);
      grid["model"] = model_name(kind);
      grids.push_back(std::move(grid));
      if (sink) {
        const std::string name = lower(model_name(kind)) + "_trace.csv";
        sink(name, trace_to_csv(g.best_trace));
        entry["trace"] = name;
      }
      if (kind == ModelKind::GRTR) {
        out.grtr_model = model;
        if (sink) {
          sink("grtr_time_factor.csv", matrix_to_csv(model.factors.factor(0)));
          sink("grtr_stock_factor.csv", matrix_to_csv(model.factors.factor(1)));
          sink("grtr_feature_factor.csv", matrix_to_csv(model.factors.factor(2)));
        }
      }
      predictor = [model](const Dataset& d) { return predict(model, d); };
    }
    entry["train"] = finance_split_json(w, w.train, predictor(r.train));
    entry["validation"] = finance_split_json(w, w.validation, predictor(r.validation));
    entry["test"] = finance_split_json(w, w.test, predictor(r.test));
    entry["wall_time_s"] = seconds_since(start);
    models.push_back(std::move(entry));
  }

  std::vector<std::string> names;
  for (auto k : options.models) names.push_back(model_name(k));
  json config = {{"fixture", options.fixture},
                 {"window", options.window.window},
                 {"volume", options.window.volume == VolumeTransform::Raw ? "raw" : "log_difference"},
                 {"models", names},
                 {"ranks", options.ranks},
                 {"lambdas", options.lambdas},
                 {"ridges", options.ridges},
                 {"beta", options.beta},
                 {"learning_rate", options.learning_rate},
                 {"tolerance", options.tolerance},
                 {"max_steps", options.max_steps},
                 {"init_scale", options.init_scale},
                 {"init_range", options.init_range == InitRange::Positive ? "positive" : "symmetric"},
                 {"bias_update", options.bias_update == BiasUpdate::PerEpoch ? "per_epoch" : "per_mode"},
                 {"seed", options.seed}};
  json data = {{"stocks", panel.stock_count()},
               {"dates", panel.date_count()},
               {"windows", w.data.size()},
               {"shape", shape},
               {"train", w.train.size()},
               {"validation", w.validation.size()},
               {"test", w.test.size()},
               {"label_mean", w.label_mean},
               {"label_std", w.label_std},
               {"index", panel.index_levels ? "supplied" : "equal_weighted"},
               {"warnings", panel.warnings}};
  out.report = {{"schema_version", 1},
                {"experiment", "finance"},
                {"config", std::move(config)},
                {"data", std::move(data)},
                {"models", std::move(models)},
                {"grid", std::move(grids)}};
  return out;
}

}  // namespace grtr
