#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "grtr/cpd.hpp"
#include "grtr/experiments.hpp"
#include "grtr/gradcheck.hpp"
#include "grtr/serialization.hpp"

namespace grtr::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Buffers side outputs so nothing lands on disk unless the run succeeds.
struct PendingFiles {
  std::map<std::string, std::string> files;

  ExportSink sink() {
    return [this](const std::string& name, const std::string& contents) { files[name] = contents; };
  }
  void flush(const fs::path& dir) const {
    if (files.empty()) return;
    fs::create_directories(dir);
    for (const auto& [name, contents] : files) write_file_atomic(dir / name, contents);
  }
};

void emit(const json& report, const std::string& output, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (output.empty()) {
    out << text;
  } else {
    write_file_atomic(output, text);
  }
}

std::string flag_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string joined;
    for (const auto& e : v) joined += (joined.empty() ? "" : ",") + flag_value(e);
    return joined;
  }
  return v.dump();
}

bool present(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Splices the keys of a --config JSON object into the argument list as flags,
// skipping any flag given explicitly so that command-line values win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  auto it = std::find_if(args.begin(), args.end(),
                         [](const std::string& a) { return a == "--config" || a.rfind("--config=", 0) == 0; });
  if (it == args.end()) return args;
  std::string path;
  if (*it == "--config") {
    if (std::next(it) == args.end()) throw CLI::ArgumentMismatch("--config needs a path");
    path = *std::next(it);
    it = args.erase(it, std::next(it, 2));
  } else {
    path = it->substr(std::string("--config=").size());
    it = args.erase(it);
  }
  json config;
  try {
    config = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw DataError("cannot parse config " + path + ": " + e.what());
  }
  if (!config.is_object()) throw DataError("config " + path + " must hold a JSON object");
  std::vector<std::string> injected;
  for (const auto& [key, value] : config.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (present(args, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back(flag);
      continue;
    }
    injected.push_back(flag);
    injected.push_back(flag_value(value));
  }
  args.insert(args.end(), injected.begin(), injected.end());
  return args;
}

std::vector<std::size_t> parse_index(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = std::min(text.find(',', start), text.size());
    const std::string field = text.substr(start, comma - start);
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != field.size() || v < 1) {
      throw DataError("bad index '" + text + "': expected comma-separated 1-based integers");
    }
    out.push_back(static_cast<std::size_t>(v - 1));
    start = comma + 1;
  }
  return out;
}

InitRange parse_init_range(const std::string& s) {
  return s == "positive" ? InitRange::Positive : InitRange::Symmetric;
}

BiasUpdate parse_bias_update(const std::string& s) {
  return s == "per_epoch" ? BiasUpdate::PerEpoch : BiasUpdate::PerMode;
}

struct SyntheticFlags {
  SyntheticOptions options;
  std::string models = "all";
  std::string init_range = "positive";
  std::string bias_update = "per_mode";
  std::string output, export_dir;
};

struct FinanceFlags {
  FinanceOptions options;
  std::string prices, sectors, index;
  std::string models = "all";
  std::string init_range = "symmetric";
  std::string bias_update = "per_mode";
  bool raw_volume = false;
  std::string output, model_output, export_dir;
};

struct GradcheckFlags {
  GradcheckOptions options;
  std::string output;
};

struct InspectFlags {
  std::string model;
  std::vector<std::string> coefs;
  std::string factors_dir;
  std::vector<std::string> mode_names;
  std::string input;
};

void add_training_flags(CLI::App* sub, double& lr, double& tol, std::size_t& steps, double& init_scale,
                        std::string& init_range, std::string& bias_update) {
  sub->add_option("--lr", lr, "Gradient-descent step size")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--tol", tol, "Stop once training MSE falls to this value")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--max-steps", steps, "Maximum outer iterations")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--init-scale", init_scale, "Half-width of the uniform factor initialization")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--init-range", init_range, "Factor initialization range: symmetric [-s,s] or positive [0,s)")
      ->capture_default_str()
      ->check(CLI::IsMember({"symmetric", "positive"}));
  sub->add_option("--bias-update", bias_update, "Bias update schedule")
      ->capture_default_str()
      ->check(CLI::IsMember({"per_mode", "per_epoch"}));
}

int cmd_synthetic(SyntheticFlags& f, std::ostream& out) {
  SyntheticOptions& o = f.options;
  o.models = parse_models(f.models);
  o.init_range = parse_init_range(f.init_range);
  o.bias_update = parse_bias_update(f.bias_update);
  if (o.grtr_lambdas.size() == 1) o.grtr_lambdas.assign(o.spec.order, o.grtr_lambdas.front());
  PendingFiles pending;
  const json report = run_synthetic_experiment(o, f.export_dir.empty() ? ExportSink{} : pending.sink());
  emit(report, f.output, out);
  if (!f.export_dir.empty()) pending.flush(f.export_dir);
  return kExitSuccess;
}

int cmd_finance(FinanceFlags& f, std::ostream& out, std::ostream& err) {
  FinanceOptions& o = f.options;
  o.models = parse_models(f.models);
  o.init_range = parse_init_range(f.init_range);
  o.bias_update = parse_bias_update(f.bias_update);
  o.window.volume = f.raw_volume ? VolumeTransform::Raw : VolumeTransform::LogDifference;
  if (!o.fixture) {
    if (f.prices.empty() || f.sectors.empty()) {
      throw CLI::ValidationError("--prices/--sectors", "required unless --fixture is set");
    }
    o.prices = f.prices;
    o.sectors = f.sectors;
  }
  if (!f.index.empty()) o.index = f.index;
  PendingFiles pending;
  FinanceOutcome outcome = run_finance_experiment(o, f.export_dir.empty() ? ExportSink{} : pending.sink());
  for (const auto& w : outcome.report.at("data").at("warnings")) err << "warning: " << w.get<std::string>() << "\n";
  emit(outcome.report, f.output, out);
  if (!f.model_output.empty()) {
    if (!outcome.grtr_model) throw CLI::ValidationError("--model-output", "needs GRTR among --models");
    write_file_atomic(f.model_output, model_to_json(*outcome.grtr_model).dump(2) + "\n");
  }
  if (!f.export_dir.empty()) pending.flush(f.export_dir);
  return kExitSuccess;
}

int cmd_gradcheck(const GradcheckFlags& f, std::ostream& out) {
  const GradcheckReport r = run_gradcheck(f.options);
  json trials = json::array();
  for (const auto& t : r.trials) {
    trials.push_back(
        {{"instance", t.description}, {"max_relative_error", t.max_relative_error}, {"passed", t.passed}});
  }
  const json report = {{"schema_version", 1},
                       {"experiment", "gradcheck"},
                       {"trials", r.trials.size()},
                       {"failures", r.failures},
                       {"tolerance", f.options.tolerance},
                       {"max_relative_error", r.max_relative_error},
                       {"instances", std::move(trials)}};
  if (f.output.empty()) {
    out << fmt::format("gradcheck: {} of {} trials passed, max relative error {:.3e} (tolerance {:.0e})\n",
                       r.trials.size() - r.failures, r.trials.size(), r.max_relative_error, f.options.tolerance);
    for (const auto& t : r.trials) {
      if (!t.passed) out << fmt::format("  FAIL {} relative error {:.3e}\n", t.description, t.max_relative_error);
    }
  } else {
    emit(report, f.output, out);
  }
  return r.failures == 0 ? kExitSuccess : 1;
}

int cmd_inspect(const InspectFlags& f, std::ostream& out) {
  const GrtrModel model = model_from_json(json::parse(read_text_file(f.model)));
  const CpdFactors& factors = model.factors;
  out << fmt::format("model: rank {} shape {} params {} (+1 bias) bias {}\n", factors.rank(),
                     shape_string(factors.shape()), model.parameter_count(), model.bias);

  for (const auto& text : f.coefs) {
    const auto index = parse_index(text);
    if (index.size() != factors.order()) {
      throw DimensionError(fmt::format("index {} has {} entries, model has order {}", text, index.size(),
                                       factors.order()));
    }
    for (std::size_t n = 0; n < index.size(); ++n) {
      if (index[n] >= factors.shape()[n]) {
        throw DimensionError(fmt::format("index {} out of range for mode {} of size {}", text, n + 1,
                                         factors.shape()[n]));
      }
    }
    out << fmt::format("coef[{}] = {}\n", text, coefficient_at(factors, index));
  }

  if (!f.mode_names.empty() && f.mode_names.size() != factors.order()) {
    throw CLI::ValidationError("--mode-names", fmt::format("needs {} names", factors.order()));
  }
  if (!f.factors_dir.empty()) {
    fs::create_directories(f.factors_dir);
    for (std::size_t n = 0; n < factors.order(); ++n) {
      const std::string name = f.mode_names.empty() ? fmt::format("mode{}", n + 1) : f.mode_names[n];
      const fs::path path = fs::path(f.factors_dir) / (name + "_factor.csv");
      write_file_atomic(path, matrix_to_csv(factors.factor(n)));
      out << fmt::format("factor {}: {} rows -> {}\n", name, factors.factor(n).rows(), path.string());
    }
  }

  if (!f.input.empty()) {
    const DenseTensor x = tensor_from_json(json::parse(read_text_file(f.input)));
    const auto chains = modewise_breakdown(model, x);
    double total = model.bias;
    for (std::size_t r = 0; r < chains.size(); ++r) {
      out << fmt::format("term {}:", r + 1);
      for (const auto& step : chains[r]) {
        if (const auto* t = std::get_if<DenseTensor>(&step)) {
          out << fmt::format(" {}", shape_string(t->shape()));
        } else {
          out << fmt::format(" -> {}", std::get<double>(step));
          total += std::get<double>(step);
        }
      }
      out << "\n";
    }
    out << fmt::format("bias: {}\nprediction: {}\n", model.bias, total);
  }
  return kExitSuccess;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph-regularized tensor regression: experiments, gradient checks and model inspection", "grtr"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  SyntheticFlags syn;
  auto* s = app.add_subcommand("synthetic", "Planted low-rank experiment with LR, L2LR, TR, L2TR and GRTR");
  s->add_option("--seed", syn.options.spec.seed, "Base seed; run k uses seed + k")->capture_default_str();
  s->add_option("--seeds", syn.options.seeds, "Number of seeds; the report holds per-seed runs and medians")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  s->add_option("--output", syn.output, "Report JSON path (stdout when omitted)");
  s->add_option("--export-dir", syn.export_dir, "Directory for traces and graph Laplacian CSVs");
  s->add_option("--models", syn.models, "Comma-separated subset of lr,l2lr,tr,l2tr,grtr, or all")
      ->capture_default_str();
  s->add_option("--rank", syn.options.rank, "CPD rank of the tensor models")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--lambda", syn.options.grtr_lambdas, "GRTR lambda per mode (comma list, or one value for all)")
      ->delimiter(',')
      ->capture_default_str();
  s->add_option("--l2tr-lambda", syn.options.l2tr_lambda, "L2TR lambda on every mode")->capture_default_str();
  s->add_option("--ridge", syn.options.ridge, "L2LR ridge penalty")->capture_default_str();
  s->add_option("--beta", syn.options.spec.beta, "Kernel bandwidth of the mode graphs")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  s->add_option("--order", syn.options.spec.order, "Tensor order")->capture_default_str();
  s->add_option("--mode-size", syn.options.spec.mode_size, "Size of every mode")->capture_default_str();
  s->add_option("--true-rank", syn.options.spec.true_rank, "Rank of the planted weight tensor")->capture_default_str();
  s->add_option("--samples", syn.options.spec.samples, "Number of samples")->capture_default_str();
  s->add_option("--noise-ratio", syn.options.spec.noise_ratio, "Noise std over clean-label std")->capture_default_str();
  add_training_flags(s, syn.options.learning_rate, syn.options.tolerance, syn.options.max_steps,
                     syn.options.init_scale, syn.init_range, syn.bias_update);
  s->add_option("--config", "JSON object of flag values; explicit flags win")->type_name("PATH");

  FinanceFlags fin;
  auto* fz = app.add_subcommand("finance", "Windowed market-data forecasting with sector-graph regularization");
  fz->add_option("--prices", fin.prices, "Long CSV: date,ticker,adj_close,close,high,low,open,volume");
  fz->add_option("--sectors", fin.sectors, "CSV: ticker,sector");
  fz->add_option("--index", fin.index, "Optional CSV: date,close of the index used for labels");
  fz->add_flag("--fixture", fin.options.fixture, "Use a generated 20-ticker, 4-sector, 500-date panel");
  fz->add_option("--window", fin.options.window.window, "Time steps per input window")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  fz->add_flag("--raw-volume", fin.raw_volume, "Standardize raw volume instead of its log-difference");
  fz->add_option("--beta", fin.options.beta, "Weight of each same-sector edge")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  fz->add_option("--seed", fin.options.seed, "Fixture and initialization seed")->capture_default_str();
  fz->add_option("--output", fin.output, "Report JSON path (stdout when omitted)");
  fz->add_option("--model-output", fin.model_output, "Path for the selected GRTR model JSON");
  fz->add_option("--export-dir", fin.export_dir, "Directory for traces, factor CSVs, the sector Laplacian and the fixture");
  fz->add_option("--models", fin.models, "Comma-separated subset of lr,l2lr,tr,l2tr,grtr, or all")
      ->capture_default_str();
  fz->add_option("--rank", fin.options.ranks, "Rank grid (comma list)")->delimiter(',')->capture_default_str();
  fz->add_option("--lambda", fin.options.lambdas, "Lambda grid for the regularized modes (comma list)")
      ->delimiter(',')
      ->capture_default_str();
  fz->add_option("--ridge", fin.options.ridges, "L2LR ridge grid (comma list)")->delimiter(',')->capture_default_str();
  add_training_flags(fz, fin.options.learning_rate, fin.options.tolerance, fin.options.max_steps,
                     fin.options.init_scale, fin.init_range, fin.bias_update);
  fz->add_option("--config", "JSON object of flag values; explicit flags win")->type_name("PATH");

  GradcheckFlags gc;
  auto* g = app.add_subcommand("gradcheck", "Finite-difference check of the analytic gradients");
  g->add_option("--trials", gc.options.trials, "Random instances")->capture_default_str()->check(CLI::PositiveNumber);
  g->add_option("--seed", gc.options.seed, "Instance seed")->capture_default_str();
  g->add_option("--tolerance", gc.options.tolerance, "Maximum relative error")->capture_default_str();
  g->add_option("--output", gc.output, "Write a JSON summary here instead of text to stdout");
  g->add_flag("--corrupt-gradient", gc.options.corrupt_gradient)->group("");
  g->add_option("--config", "JSON object of flag values; explicit flags win")->type_name("PATH");

  InspectFlags ins;
  auto* i = app.add_subcommand("inspect", "Coefficients, factor CSVs and mode-wise breakdowns of a saved model");
  i->add_option("--model", ins.model, "Model JSON")->required();
  i->add_option("--coef", ins.coefs, "1-based multi-index such as 1,10,2 (repeatable)");
  i->add_option("--factors-dir", ins.factors_dir, "Write one factor CSV per mode here");
  i->add_option("--mode-names", ins.mode_names, "Names for the factor CSVs, one per mode")->delimiter(',');
  i->add_option("--input", ins.input, "Input tensor JSON {shape, data} to break down");
  i->add_option("--config", "JSON object of flag values; explicit flags win")->type_name("PATH");

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
    if (*s) return cmd_synthetic(syn, out);
    if (*fz) return cmd_finance(fin, out, err);
    if (*g) return cmd_gradcheck(gc, out);
    return cmd_inspect(ins, out);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace grtr::cli
