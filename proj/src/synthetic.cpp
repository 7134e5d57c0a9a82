#include "grtr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace grtr {

void SyntheticSpec::validate() const {
  if (order < 1 || mode_size < 1 || true_rank < 1 || samples < 1) {
    throw DataError("synthetic order, mode size, rank and sample count must be positive");
  }
  if (!(noise_ratio >= 0.0)) throw DataError("noise ratio must be nonnegative");
  if (!(beta > 0.0)) throw DataError("kernel beta must be positive");
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const Shape shape(spec.order, spec.mode_size);
  SyntheticData out;
  out.truth = CpdFactors(shape, spec.true_rank);
  for (std::size_t n = 0; n < spec.order; ++n) {
    Matrix& u = out.truth.factor(n);
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      for (Eigen::Index r = 0; r < u.cols(); ++r) u(i, r) = uniform(rng);
    }
  }
  const DenseTensor w = reconstruct(out.truth);

  std::vector<double> clean;
  for (std::size_t m = 0; m < spec.samples; ++m) {
    DenseTensor x(shape);
    for (double& v : x.data()) v = normal(rng);
    clean.push_back(inner(w, x));
    out.samples.inputs.push_back(std::move(x));
  }

  const double mean = std::accumulate(clean.begin(), clean.end(), 0.0) / static_cast<double>(clean.size());
  double var = 0.0;
  for (double y : clean) var += (y - mean) * (y - mean);
  out.label_std = std::sqrt(var / static_cast<double>(clean.size()));
  out.noise_std = spec.noise_ratio * out.label_std;

  for (double y : clean) out.samples.labels.push_back(y + out.noise_std * normal(rng));

  for (std::size_t n = 0; n < spec.order; ++n) {
    out.graphs.push_back(laplacian_from_adjacency(kernel_adjacency(out.truth.factor(n), spec.beta)));
  }
  return out;
}

TrainTestSplit split_synthetic(const Dataset& samples, std::uint64_t seed) {
  if (samples.size() < 5) {
    throw DataError("need at least 5 samples for an 80/20 split, got " + std::to_string(samples.size()));
  }
  TrainTestSplit s;
  s.order.resize(samples.size());
  std::iota(s.order.begin(), s.order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = s.order.size() - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(s.order[i], s.order[pick(rng)]);
  }
  const std::size_t n_train = samples.size() * 4 / 5;
  s.train = samples.subset(std::span(s.order).first(n_train));
  s.test = samples.subset(std::span(s.order).subspan(n_train));
  return s;
}

}  // namespace grtr
