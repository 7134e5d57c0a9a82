#include "grtr/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "grtr/graph.hpp"
#include "grtr/model.hpp"

namespace grtr {

namespace {

double relative_error(double diff_norm, double a_norm, double b_norm) {
  return diff_norm / std::max({a_norm, b_norm, 1e-8});
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckOptions& options) {
  if (options.trials < 1) throw DataError("gradcheck needs at least one trial");
  if (!(options.step > 0.0) || !(options.tolerance > 0.0)) throw DataError("step and tolerance must be positive");
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> order_dist(2, 3), size_dist(1, 4), rank_dist(1, 3), sample_dist(1, 8);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  GradcheckReport report;
  for (std::size_t t = 0; t < options.trials; ++t) {
    const std::size_t order = order_dist(rng);
    Shape shape(order);
    for (auto& d : shape) d = size_dist(rng);
    const std::size_t rank = rank_dist(rng);
    const std::size_t samples = sample_dist(rng);
    const double lambda = (rng() & 1u) ? 0.5 : 0.0;

    GrtrConfig config;
    config.rank = rank;
    config.lambdas.assign(order, lambda);
    GrtrModel model{CpdFactors(shape, rank), unit(rng), config};
    for (std::size_t n = 0; n < order; ++n) {
      Matrix& u = model.factors.factor(n);
      for (Eigen::Index i = 0; i < u.rows(); ++i) {
        for (Eigen::Index r = 0; r < u.cols(); ++r) u(i, r) = unit(rng);
      }
    }
    ModeLaplacians laplacians;
    for (std::size_t n = 0; n < order; ++n) {
      Matrix rows(static_cast<Eigen::Index>(shape[n]), 2);
      for (Eigen::Index i = 0; i < rows.size(); ++i) rows.data()[i] = unit(rng);
      laplacians.emplace_back(laplacian_from_adjacency(kernel_adjacency(rows, 1.0)).laplacian);
    }
    Dataset data;
    for (std::size_t m = 0; m < samples; ++m) {
      DenseTensor x(shape);
      for (auto& v : x.data()) v = normal(rng);
      data.inputs.push_back(std::move(x));
      data.labels.push_back(normal(rng));
    }

    const double h = options.step;
    double worst = 0.0;
    for (std::size_t n = 0; n < order; ++n) {
      Matrix analytic = grad_factor(model, data, laplacians, n);
      if (options.corrupt_gradient) analytic *= 1.01;
      Matrix numeric(analytic.rows(), analytic.cols());
      for (Eigen::Index i = 0; i < numeric.rows(); ++i) {
        for (Eigen::Index r = 0; r < numeric.cols(); ++r) {
          GrtrModel plus = model, minus = model;
          plus.factors.factor(n)(i, r) += h;
          minus.factors.factor(n)(i, r) -= h;
          numeric(i, r) = (loss(plus, data, laplacians) - loss(minus, data, laplacians)) / (2.0 * h);
        }
      }
      worst = std::max(worst, relative_error((analytic - numeric).norm(), analytic.norm(), numeric.norm()));
    }
    GrtrModel plus = model, minus = model;
    plus.bias += h;
    minus.bias -= h;
    const double numeric_bias = (loss(plus, data, laplacians) - loss(minus, data, laplacians)) / (2.0 * h);
    const double analytic_bias = grad_bias(model, data);
    worst = std::max(worst, relative_error(std::abs(analytic_bias - numeric_bias), std::abs(analytic_bias),
                                           std::abs(numeric_bias)));

    GradcheckTrial trial;
    trial.description = fmt::format("order {} shape {} rank {} samples {} lambda {}", order, shape_string(shape),
                                    rank, samples, lambda);
    trial.max_relative_error = worst;
    trial.passed = worst < options.tolerance;
    if (!trial.passed) ++report.failures;
    report.max_relative_error = std::max(report.max_relative_error, worst);
    report.trials.push_back(std::move(trial));
  }
  return report;
}

}  // namespace grtr
