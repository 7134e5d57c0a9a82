#include "grtr/finance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

namespace grtr {

namespace {

constexpr std::size_t kFeatureCount = 6;
constexpr std::size_t kAdjClose = 0;
constexpr std::size_t kVolume = 5;

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> read_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  // Strip a UTF-8 byte-order mark.
  if (!lines.empty() && lines.front().rfind("\xEF\xBB\xBF", 0) == 0) lines.front().erase(0, 3);
  return lines;
}

void expect_header(const std::vector<std::string>& got, const std::vector<std::string>& want,
                   const std::string& what) {
  if (got != want) {
    std::string joined;
    for (const auto& w : want) joined += (joined.empty() ? "" : ",") + w;
    throw DataError("malformed " + what + " CSV: expected header '" + joined + "'");
  }
}

bool is_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

std::optional<double> parse_value(const std::string& field, std::size_t line_no) {
  if (field.empty() || field == "NA" || field == "NaN" || field == "nan") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    throw DataError("malformed prices CSV: non-numeric value '" + field + "' on line " + std::to_string(line_no));
  }
  if (used != field.size()) {
    throw DataError("malformed prices CSV: non-numeric value '" + field + "' on line " + std::to_string(line_no));
  }
  return v;
}

using Row = std::array<std::optional<double>, kFeatureCount>;

}  // namespace

PanelDataset ingest_prices(const std::filesystem::path& prices, const std::filesystem::path& sectors) {
  auto read = [](const std::filesystem::path& p) {
    std::ostringstream ss;
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open " + p.string());
    ss << in.rdbuf();
    return ss.str();
  };
  return ingest_prices_text(read(prices), read(sectors));
}

PanelDataset ingest_prices_text(const std::string& prices_csv, const std::string& sectors_csv) {
  PanelDataset panel;
  panel.features.assign(kMarketFeatures.begin(), kMarketFeatures.end());

  const auto sector_lines = read_lines(sectors_csv);
  if (sector_lines.empty()) throw DataError("sectors CSV is empty");
  expect_header(split_row(sector_lines.front()), {"ticker", "sector"}, "sectors");
  std::map<std::string, std::string> sector_of;
  for (std::size_t i = 1; i < sector_lines.size(); ++i) {
    const auto f = split_row(sector_lines[i]);
    if (f.size() != 2 || f[0].empty()) {
      throw DataError("malformed sectors CSV on line " + std::to_string(i + 1));
    }
    sector_of[f[0]] = f[1];
  }

  const auto price_lines = read_lines(prices_csv);
  if (price_lines.empty()) throw DataError("prices CSV is empty");
  expect_header(split_row(price_lines.front()),
                {"date", "ticker", "adj_close", "close", "high", "low", "open", "volume"}, "prices");

  std::map<std::string, std::map<std::string, Row>> rows;
  std::set<std::string> all_dates;
  for (std::size_t i = 1; i < price_lines.size(); ++i) {
    const auto f = split_row(price_lines[i]);
    if (f.size() != 2 + kFeatureCount) {
      throw DataError("malformed prices CSV: expected 8 fields on line " + std::to_string(i + 1));
    }
    if (!is_iso_date(f[0])) {
      throw DataError("malformed prices CSV: bad date '" + f[0] + "' on line " + std::to_string(i + 1));
    }
    if (f[1].empty()) throw DataError("malformed prices CSV: empty ticker on line " + std::to_string(i + 1));
    Row row;
    for (std::size_t k = 0; k < kFeatureCount; ++k) row[k] = parse_value(f[2 + k], i + 1);
    auto [it, inserted] = rows[f[1]].emplace(f[0], row);
    if (!inserted) {
      throw DataError("malformed prices CSV: duplicate row for " + f[1] + " on " + f[0]);
    }
    all_dates.insert(f[0]);
  }

  panel.dates.assign(all_dates.begin(), all_dates.end());
  for (const auto& [ticker, by_date] : rows) {
    if (by_date.size() != panel.dates.size()) {
      panel.warnings.push_back("dropped " + ticker + ": missing " +
                               std::to_string(panel.dates.size() - by_date.size()) + " date(s)");
      continue;
    }
    bool bad = false;
    for (const auto& [date, row] : by_date) {
      for (const auto& v : row) {
        if (!v || !(*v > 0.0) || !std::isfinite(*v)) bad = true;
      }
    }
    if (bad) {
      panel.warnings.push_back("dropped " + ticker + ": missing or nonpositive values");
      continue;
    }
    auto sec = sector_of.find(ticker);
    if (sec == sector_of.end()) {
      panel.warnings.push_back("dropped " + ticker + ": no sector in sectors file");
      continue;
    }
    panel.tickers.push_back(ticker);
    panel.sectors.push_back(sec->second);
  }
  if (panel.tickers.empty() || panel.dates.empty()) {
    throw DataError("no usable tickers after ingestion filtering");
  }

  const std::size_t stocks = panel.tickers.size();
  const std::size_t dates = panel.dates.size();
  panel.values = DenseTensor({stocks, kFeatureCount, dates});
  auto data = panel.values.data();
  for (std::size_t s = 0; s < stocks; ++s) {
    const auto& by_date = rows.at(panel.tickers[s]);
    std::size_t t = 0;
    for (const auto& [date, row] : by_date) {
      for (std::size_t f = 0; f < kFeatureCount; ++f) data[(s * kFeatureCount + f) * dates + t] = *row[f];
      ++t;
    }
  }
  return panel;
}

void attach_index(PanelDataset& panel, const std::string& index_csv) {
  const auto lines = read_lines(index_csv);
  if (lines.empty()) throw DataError("index CSV is empty");
  expect_header(split_row(lines.front()), {"date", "close"}, "index");
  std::map<std::string, double> level;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_row(lines[i]);
    if (f.size() != 2) throw DataError("malformed index CSV on line " + std::to_string(i + 1));
    const auto v = parse_value(f[1], i + 1);
    if (!v || !(*v > 0.0)) throw DataError("index CSV has a missing or nonpositive level on " + f[0]);
    level[f[0]] = *v;
  }
  std::vector<double> aligned;
  for (const auto& d : panel.dates) {
    auto it = level.find(d);
    if (it == level.end()) throw DataError("index CSV has no level for " + d);
    aligned.push_back(it->second);
  }
  panel.index_levels = std::move(aligned);
}

WindowedDataset build_windows(const PanelDataset& panel, const WindowOptions& options) {
  const std::size_t stocks = panel.stock_count();
  const std::size_t dates = panel.date_count();
  const std::size_t window = options.window;
  if (window < 1) throw DataError("window length must be at least 1");
  if (dates < window + 2) {
    throw DataError("insufficient history: " + std::to_string(dates) + " dates for a window of " +
                    std::to_string(window) + " (need at least " + std::to_string(window + 2) + ")");
  }
  if (panel.values.shape() != Shape{stocks, kFeatureCount, dates}) {
    throw DimensionError("panel values have shape " + shape_string(panel.values.shape()));
  }

  // returns[s][f][k]: change from date k to date k+1.
  const std::size_t steps = dates - 1;
  auto values = panel.values.data();
  auto value = [&](std::size_t s, std::size_t f, std::size_t t) { return values[(s * kFeatureCount + f) * dates + t]; };
  std::vector<double> returns(stocks * kFeatureCount * steps);
  auto ret = [&](std::size_t s, std::size_t f, std::size_t k) -> double& {
    return returns[(s * kFeatureCount + f) * steps + k];
  };
  for (std::size_t s = 0; s < stocks; ++s) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      for (std::size_t k = 0; k < steps; ++k) {
        if (f == kVolume && options.volume == VolumeTransform::Raw) {
          ret(s, f, k) = value(s, f, k + 1);
        } else {
          ret(s, f, k) = std::log(value(s, f, k + 1)) - std::log(value(s, f, k));
        }
      }
    }
  }
  std::vector<double> index_returns(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    if (panel.index_levels) {
      index_returns[k] = std::log((*panel.index_levels)[k + 1]) - std::log((*panel.index_levels)[k]);
    } else {
      double sum = 0.0;
      for (std::size_t s = 0; s < stocks; ++s) sum += ret(s, kAdjClose, k);
      index_returns[k] = sum / static_cast<double>(stocks);
    }
  }

  WindowedDataset out;
  const std::size_t count = steps - window;
  const Shape shape{window, stocks, kFeatureCount};
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t last = window - 1 + j;  // most recent return in the window
    DenseTensor x(shape);
    auto xd = x.data();
    for (std::size_t tau = 0; tau < window; ++tau) {
      for (std::size_t s = 0; s < stocks; ++s) {
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
          xd[(tau * stocks + s) * kFeatureCount + f] = ret(s, f, last - tau);
        }
      }
    }
    out.data.inputs.push_back(std::move(x));
    out.raw_labels.push_back(index_returns[last + 1]);
    out.label_dates.push_back(panel.dates[last + 2]);
  }

  const auto n_train = static_cast<std::size_t>(std::floor(options.train_fraction * static_cast<double>(count)));
  const auto n_val = static_cast<std::size_t>(std::floor(options.validation_fraction * static_cast<double>(count)));
  if (n_train < 2 || n_train + n_val > count) {
    throw DataError("insufficient history: " + std::to_string(count) + " windows cannot be split");
  }
  out.train = {0, n_train};
  out.validation = {n_train, n_train + n_val};
  out.test = {n_train + n_val, count};

  const auto entries = static_cast<Eigen::Index>(element_count(shape));
  out.feature_mean = Vector::Zero(entries);
  out.feature_std = Vector::Ones(entries);
  if (options.standardize) {
    Vector sum = Vector::Zero(entries);
    for (std::size_t j = 0; j < n_train; ++j) {
      sum += Eigen::Map<const Vector>(out.data.inputs[j].data().data(), entries);
    }
    out.feature_mean = sum / static_cast<double>(n_train);
    Vector sq = Vector::Zero(entries);
    for (std::size_t j = 0; j < n_train; ++j) {
      sq += (Eigen::Map<const Vector>(out.data.inputs[j].data().data(), entries) - out.feature_mean)
                .array()
                .square()
                .matrix();
    }
    out.feature_std = (sq / static_cast<double>(n_train)).cwiseSqrt();
    for (Eigen::Index i = 0; i < entries; ++i) {
      if (!(out.feature_std[i] > 0.0)) out.feature_std[i] = 1.0;
    }
    for (auto& x : out.data.inputs) {
      Eigen::Map<Vector> v(x.data().data(), entries);
      v = (v - out.feature_mean).cwiseQuotient(out.feature_std);
    }

    double mean = 0.0;
    for (std::size_t j = 0; j < n_train; ++j) mean += out.raw_labels[j];
    mean /= static_cast<double>(n_train);
    double var = 0.0;
    for (std::size_t j = 0; j < n_train; ++j) var += (out.raw_labels[j] - mean) * (out.raw_labels[j] - mean);
    const double sd = std::sqrt(var / static_cast<double>(n_train));
    out.label_mean = mean;
    out.label_std = sd > 0.0 ? sd : 1.0;
  }
  for (double y : out.raw_labels) out.data.labels.push_back((y - out.label_mean) / out.label_std);
  return out;
}

FixtureFiles generate_financial_fixture(std::size_t stocks, std::size_t sectors, std::size_t dates,
                                        std::uint64_t seed) {
  if (stocks == 0 || sectors == 0 || stocks % sectors != 0) {
    throw DataError("fixture needs a stock count divisible by the sector count");
  }
  if (dates < 2) throw DataError("fixture needs at least two dates");
  constexpr std::size_t kLags = 5;
  const std::array<double, kLags> time_weights = {1.0, 0.6, 0.35, 0.2, 0.1};  // most recent first
  const std::array<double, kFeatureCount> feature_weights = {0.6, 0.4, 0.0, 0.0, 0.0, 0.0};
  constexpr double kIdioVol = 0.01;
  constexpr double kSignalToIndexNoise = 1.0;

  const std::size_t per_sector = stocks / sectors;
  std::vector<double> stock_weights(stocks);
  for (std::size_t s = 0; s < stocks; ++s) {
    const std::size_t g = s / per_sector;
    stock_weights[s] = sectors == 1 ? 1.0 : -1.0 + 2.0 * static_cast<double>(g) / static_cast<double>(sectors - 1);
  }
  double time_sq = 0.0, stock_sq = 0.0;
  for (double a : time_weights) time_sq += a * a;
  for (double b : stock_weights) stock_sq += b * b;
  // Scale so the planted component has roughly the spread of the
  // cross-sectional average of the idiosyncratic noise.
  const double kappa =
      kSignalToIndexNoise / (std::sqrt(static_cast<double>(stocks)) * std::sqrt(time_sq * stock_sq));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // returns[t][s][f] of the simulated log-prices; row 0 is unused.
  std::vector<std::array<double, kFeatureCount>> returns(dates * stocks);
  auto r = [&](std::size_t t, std::size_t s) -> std::array<double, kFeatureCount>& { return returns[t * stocks + s]; };

  std::vector<double> log_adj(stocks), log_close(stocks), log_volume(stocks);
  for (std::size_t s = 0; s < stocks; ++s) {
    log_adj[s] = std::log(40.0 + 5.0 * static_cast<double>(s));
    log_close[s] = log_adj[s] + 0.05;
    log_volume[s] = 13.0 + 0.5 * normal(rng);
  }

  std::string prices = "date,ticker,adj_close,close,high,low,open,volume\n";
  std::chrono::sys_days day = std::chrono::year{2010} / std::chrono::January / 4;
  std::vector<std::string> tickers(stocks);
  for (std::size_t s = 0; s < stocks; ++s) tickers[s] = fmt::format("TK{:03d}", s);

  std::vector<double> prev_log(stocks * kFeatureCount, 0.0);
  for (std::size_t t = 0; t < dates; ++t) {
    double common = 0.0;
    if (t > kLags) {
      for (std::size_t tau = 0; tau < kLags; ++tau) {
        for (std::size_t s = 0; s < stocks; ++s) {
          for (std::size_t f = 0; f < kFeatureCount; ++f) {
            common += time_weights[tau] * stock_weights[s] * feature_weights[f] * r(t - 1 - tau, s)[f];
          }
        }
      }
      common *= kappa;
    }

    const std::string date = fmt::format("{:%Y-%m-%d}", day);
    for (std::size_t s = 0; s < stocks; ++s) {
      const double prev_close = std::exp(log_close[s]);
      if (t > 0) {
        const double ra = common + kIdioVol * normal(rng);
        log_adj[s] += ra;
        log_close[s] += ra + 0.0005 * normal(rng);
        log_volume[s] = 13.0 + 0.5 * (log_volume[s] - 13.0) + 0.2 * normal(rng);
      }
      const double close = std::exp(log_close[s]);
      const double open = t > 0 ? prev_close * std::exp(0.002 * normal(rng)) : close;
      const double high = std::max(open, close) * std::exp(std::abs(0.003 * normal(rng)));
      const double low = std::min(open, close) * std::exp(-std::abs(0.003 * normal(rng)));
      const double adj = std::exp(log_adj[s]);
      const double volume = std::round(std::exp(log_volume[s]));
      prices += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.0f}\n", date, tickers[s], adj, close, high,
                            low, open, volume);

      // Returns as the ingested file will see them after rounding.
      const std::array<double, kFeatureCount> logs = {
          std::log(std::stod(fmt::format("{:.6f}", adj))),  std::log(std::stod(fmt::format("{:.6f}", close))),
          std::log(std::stod(fmt::format("{:.6f}", high))), std::log(std::stod(fmt::format("{:.6f}", low))),
          std::log(std::stod(fmt::format("{:.6f}", open))), std::log(volume)};
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        r(t, s)[f] = t > 0 ? logs[f] - prev_log[s * kFeatureCount + f] : 0.0;
        prev_log[s * kFeatureCount + f] = logs[f];
      }
    }

    do {
      day += std::chrono::days{1};
    } while (std::chrono::weekday{day} == std::chrono::Saturday || std::chrono::weekday{day} == std::chrono::Sunday);
  }

  std::string sector_csv = "ticker,sector\n";
  for (std::size_t s = 0; s < stocks; ++s) {
    sector_csv += fmt::format("{},SECTOR_{}\n", tickers[s], static_cast<char>('A' + (s / per_sector) % 26));
  }
  return {std::move(prices), std::move(sector_csv)};
}

}  // namespace grtr
