#pragma once

#include <cstdint>
#include <vector>

#include "grtr/cpd.hpp"
#include "grtr/graph.hpp"
#include "grtr/model.hpp"

namespace grtr {

/// Planted low-rank regression problem. Defaults give the 4-way, 10-per-mode,
/// rank-5, 125-sample setup with noise at half the label standard deviation.
struct SyntheticSpec {
  std::size_t order = 4;
  std::size_t mode_size = 10;
  std::size_t true_rank = 5;
  std::size_t samples = 125;
  double noise_ratio = 0.5;  // σ_η / σ_y
  double beta = 1.0;         // kernel bandwidth for the mode graphs
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticData {
  CpdFactors truth;               // entries uniform on [0, 1)
  Dataset samples;                // X standard normal, y = ⟨W,X⟩ + η
  std::vector<GraphSpec> graphs;  // kernel graphs over the rows of each true factor
  double label_std = 0.0;         // empirical std of the noiseless labels
  double noise_std = 0.0;         // requested σ_η = ratio · label_std
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> order;  // shuffled sample indices, train first
};

/// Seeded shuffle, then the first 80% (floored) train and the rest test.
TrainTestSplit split_synthetic(const Dataset& samples, std::uint64_t seed);

}  // namespace grtr
