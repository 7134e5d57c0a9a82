#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grtr/model.hpp"
#include "grtr/tensor.hpp"

namespace grtr {

/// Column order of the six daily market features.
inline const std::array<std::string, 6> kMarketFeatures = {"adj_close", "close", "high", "low", "open", "volume"};

/// Raw market data pivoted to stocks × features × dates.
struct PanelDataset {
  std::vector<std::string> tickers;
  std::vector<std::string> dates;  // ISO-8601, strictly increasing
  std::vector<std::string> features;
  DenseTensor values;  // shape [S, F, T']
  std::vector<std::string> sectors;  // aligned with tickers
  std::optional<std::vector<double>> index_levels;  // aligned with dates
  std::vector<std::string> warnings;

  std::size_t stock_count() const { return tickers.size(); }
  std::size_t date_count() const { return dates.size(); }
};

/// Reads `date,ticker,adj_close,close,high,low,open,volume` and `ticker,sector`.
/// Tickers missing a date, carrying a nonpositive value, or lacking a sector
/// are dropped with a warning.
PanelDataset ingest_prices(const std::filesystem::path& prices, const std::filesystem::path& sectors);
/// Same, from in-memory CSV text.
PanelDataset ingest_prices_text(const std::string& prices_csv, const std::string& sectors_csv);

/// Optional `date,close` index series; aligns it to the panel dates.
void attach_index(PanelDataset& panel, const std::string& index_csv);

enum class VolumeTransform { LogDifference, Raw };

struct WindowOptions {
  std::size_t window = 5;
  VolumeTransform volume = VolumeTransform::LogDifference;
  double train_fraction = 0.5;
  double validation_fraction = 0.3;
  bool standardize = true;
};

struct SplitRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

/// Rolling windows of shape T × S × F (time mode most-recent-first) labelled
/// with the next-step index log-return.
struct WindowedDataset {
  Dataset data;                         // standardized inputs and labels
  std::vector<double> raw_labels;       // index log-returns before standardization
  std::vector<std::string> label_dates; // date of each label
  SplitRange train, validation, test;
  Vector feature_mean, feature_std;     // per input entry, row-major, train range only
  double label_mean = 0.0, label_std = 1.0;

  double destandardize(double y) const { return y * label_std + label_mean; }
};

/// Log-differences every feature (volume per `options.volume`), stacks
/// `window` consecutive steps ending at t, labels with the index return at
/// t+1, splits chronologically and standardizes with train statistics.
WindowedDataset build_windows(const PanelDataset& panel, const WindowOptions& options = {});

struct FixtureFiles {
  std::string prices_csv;
  std::string sectors_csv;
};

/// Synthetic geometric price paths for `stocks` tickers in `sectors` equal
/// groups over `dates` business days. Next-day returns carry a common
/// component driven by a planted rank-1 weight tensor over the past five days
/// whose stock factor is constant within each sector.
FixtureFiles generate_financial_fixture(std::size_t stocks, std::size_t sectors, std::size_t dates,
                                        std::uint64_t seed);

}  // namespace grtr
