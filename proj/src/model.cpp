#include "grtr/model.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "grtr/graph.hpp"

namespace grtr {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Samples stacked as rows in flat (row-major storage) order.
struct PackedSamples {
  RowMatrix x;
  Vector y;
  Shape shape;
};

PackedSamples pack(const Dataset& data) {
  data.validate();
  if (data.empty()) throw DataError("dataset is empty");
  PackedSamples p;
  p.shape = data.shape();
  const auto rows = static_cast<Eigen::Index>(data.size());
  const auto cols = static_cast<Eigen::Index>(element_count(p.shape));
  p.x.resize(rows, cols);
  p.y.resize(rows);
  for (Eigen::Index m = 0; m < rows; ++m) {
    auto d = data.inputs[static_cast<std::size_t>(m)].data();
    p.x.row(m) = Eigen::Map<const Vector>(d.data(), cols).transpose();
    p.y[m] = data.labels[static_cast<std::size_t>(m)];
  }
  return p;
}

void check_model_shape(const GrtrModel& m, const Shape& shape) {
  if (m.factors.shape() != shape) {
    throw DimensionError("model shape " + shape_string(m.factors.shape()) + " does not match input shape " +
                         shape_string(shape));
  }
}

void check_laplacians(const ModeLaplacians& laplacians, const CpdFactors& f) {
  if (!laplacians.empty() && laplacians.size() != f.order()) {
    throw DimensionError("expected " + std::to_string(f.order()) + " Laplacian slots, got " +
                         std::to_string(laplacians.size()));
  }
  for (std::size_t n = 0; n < laplacians.size(); ++n) {
    if (!laplacians[n]) continue;
    const auto rows = f.factor(n).rows();
    if (laplacians[n]->rows() != rows || laplacians[n]->cols() != rows) {
      throw DimensionError("Laplacian for mode " + std::to_string(n + 1) + " must be " + std::to_string(rows) +
                           "x" + std::to_string(rows));
    }
  }
}

void check_lambdas(const GrtrModel& m) {
  if (m.config.lambdas.size() != m.factors.order()) {
    throw DimensionError("expected " + std::to_string(m.factors.order()) + " lambdas, got " +
                         std::to_string(m.config.lambdas.size()));
  }
}

Vector residuals(const CpdFactors& f, double bias, const PackedSamples& p) {
  const DenseTensor w = reconstruct(f);
  auto wd = w.data();
  Eigen::Map<const Vector> wv(wd.data(), static_cast<Eigen::Index>(wd.size()));
  Vector eps = p.y - p.x * wv;
  eps.array() -= bias;
  return eps;
}

// Error-term part of ∂L/∂U_n: -(1/M)·(Σ_m ε_m X_m)_(n) · U^(-n).
Matrix error_gradient(const CpdFactors& f, const PackedSamples& p, const Vector& eps, std::size_t mode) {
  const Vector g = p.x.transpose() * eps / static_cast<double>(eps.size());
  const DenseTensor gt(p.shape, std::vector<double>(g.data(), g.data() + g.size()));
  return -(matricize(gt, mode) * khatri_rao_complement(f, mode));
}

double regularization(const GrtrModel& m, const ModeLaplacians& laplacians) {
  double reg = 0.0;
  for (std::size_t n = 0; n < laplacians.size(); ++n) {
    if (!laplacians[n]) continue;
    reg += 0.5 * m.config.lambdas[n] * smoothness(m.factors.factor(n), *laplacians[n]);
  }
  return reg / static_cast<double>(m.factors.order());
}

Matrix factor_gradient(const GrtrModel& m, const PackedSamples& p, const Vector& eps,
                       const ModeLaplacians& laplacians, std::size_t mode) {
  Matrix grad = error_gradient(m.factors, p, eps, mode);
  if (!laplacians.empty() && laplacians[mode]) {
    grad += (m.config.lambdas[mode] / static_cast<double>(m.factors.order())) * (*laplacians[mode]) *
            m.factors.factor(mode);
  }
  return grad;
}

}  // namespace

const Shape& Dataset::shape() const {
  if (inputs.empty()) throw DataError("dataset is empty");
  return inputs.front().shape();
}

void Dataset::validate() const {
  if (inputs.size() != labels.size()) {
    throw DataError(std::to_string(inputs.size()) + " inputs but " + std::to_string(labels.size()) + " labels");
  }
  for (std::size_t m = 1; m < inputs.size(); ++m) {
    if (inputs[m].shape() != inputs.front().shape()) {
      throw DimensionError("sample " + std::to_string(m + 1) + " has shape " + shape_string(inputs[m].shape()) +
                           ", expected " + shape_string(inputs.front().shape()));
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  for (auto r : rows) {
    out.inputs.push_back(inputs.at(r));
    out.labels.push_back(labels.at(r));
  }
  return out;
}

Dataset Dataset::range(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw DataError("dataset range out of bounds");
  Dataset out;
  out.inputs.assign(inputs.begin() + static_cast<std::ptrdiff_t>(begin),
                    inputs.begin() + static_cast<std::ptrdiff_t>(end));
  out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(begin),
                    labels.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

void GrtrConfig::validate(std::size_t order) const {
  if (rank < 1) throw DataError("rank must be at least 1");
  if (lambdas.size() != order) {
    throw DataError("expected " + std::to_string(order) + " lambdas (one per mode), got " +
                    std::to_string(lambdas.size()));
  }
  for (double l : lambdas) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw DataError("lambdas must be finite and nonnegative");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw DataError("learning rate must be positive");
  if (!(tolerance >= 0.0)) throw DataError("tolerance must be nonnegative");
  if (max_steps < 1) throw DataError("max steps must be at least 1");
  if (!(init_scale > 0.0) || !std::isfinite(init_scale)) throw DataError("init scale must be positive");
}

GrtrModel initialize_model(const Shape& shape, const GrtrConfig& config) {
  config.validate(shape.size());
  GrtrModel m{CpdFactors(shape, config.rank), 0.0, config};
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> dist(-config.init_scale, config.init_scale);
  for (std::size_t n = 0; n < m.factors.order(); ++n) {
    Matrix& u = m.factors.factor(n);
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      for (Eigen::Index r = 0; r < u.cols(); ++r) {
        const double v = dist(rng);
        u(i, r) = config.init_range == InitRange::Positive ? std::abs(v) : v;
      }
    }
  }
  m.bias = dist(rng);
  return m;
}

double predict_materialized(const GrtrModel& m, const DenseTensor& x) {
  check_model_shape(m, x.shape());
  return inner(reconstruct(m.factors), x) + m.bias;
}

double predict_factored(const GrtrModel& m, const DenseTensor& x) {
  check_model_shape(m, x.shape());
  std::vector<Vector> columns(m.factors.order());
  double y = m.bias;
  for (std::size_t r = 0; r < m.factors.rank(); ++r) {
    for (std::size_t n = 0; n < m.factors.order(); ++n) {
      columns[n] = m.factors.factor(n).col(static_cast<Eigen::Index>(r));
    }
    y += contract_all(x, columns);
  }
  return y;
}

std::vector<double> predict(const GrtrModel& m, const Dataset& data) {
  if (data.empty()) return {};
  const auto p = pack(data);
  check_model_shape(m, p.shape);
  const Vector eps = residuals(m.factors, m.bias, p);
  const Vector yhat = p.y - eps;
  return {yhat.data(), yhat.data() + yhat.size()};
}

double loss(const GrtrModel& m, const Dataset& data, const ModeLaplacians& laplacians) {
  check_lambdas(m);
  check_laplacians(laplacians, m.factors);
  const auto p = pack(data);
  check_model_shape(m, p.shape);
  const Vector eps = residuals(m.factors, m.bias, p);
  return 0.5 * eps.squaredNorm() / static_cast<double>(eps.size()) + regularization(m, laplacians);
}

double grad_bias(const GrtrModel& m, const Dataset& data) {
  const auto p = pack(data);
  check_model_shape(m, p.shape);
  return -residuals(m.factors, m.bias, p).mean();
}

Matrix grad_factor(const GrtrModel& m, const Dataset& data, const ModeLaplacians& laplacians, std::size_t mode) {
  if (mode >= m.factors.order()) {
    throw DimensionError("mode " + std::to_string(mode + 1) + " out of range for order-" +
                         std::to_string(m.factors.order()) + " model");
  }
  check_lambdas(m);
  check_laplacians(laplacians, m.factors);
  const auto p = pack(data);
  check_model_shape(m, p.shape);
  return factor_gradient(m, p, residuals(m.factors, m.bias, p), laplacians, mode);
}

TrainResult train_from(GrtrModel start, const Dataset& data, const ModeLaplacians& laplacians) {
  const auto p = pack(data);
  GrtrModel m = std::move(start);
  m.config.validate(m.factors.order());
  check_model_shape(m, p.shape);
  check_laplacians(laplacians, m.factors);

  const GrtrConfig& cfg = m.config;
  const double alpha = cfg.learning_rate;
  const auto samples = static_cast<double>(p.y.size());
  TrainTrace trace;
  while (true) {
    Vector eps = residuals(m.factors, m.bias, p);
    const double eps_mse = eps.squaredNorm() / samples;
    if (!std::isfinite(eps_mse)) {
      throw DivergenceError("training diverged after " + std::to_string(trace.iterations) +
                            " iteration(s) (non-finite training error); lower the learning rate");
    }
    trace.final_mse = eps_mse;
    trace.final_loss = 0.5 * eps_mse + regularization(m, laplacians);
    if (eps_mse <= cfg.tolerance) {
      trace.converged = true;
      break;
    }
    if (trace.iterations == cfg.max_steps) break;
    ++trace.iterations;
    trace.mse.push_back(eps_mse);
    trace.loss.push_back(trace.final_loss);

    const double epoch_bias_grad = -eps.mean();
    for (std::size_t n = 0; n < m.factors.order(); ++n) {
      if (n > 0) eps = residuals(m.factors, m.bias, p);
      const Matrix g = factor_gradient(m, p, eps, laplacians, n);
      const double gb = -eps.mean();
      m.factors.factor(n) -= alpha * g;
      if (cfg.bias_update == BiasUpdate::PerMode) m.bias -= alpha * gb;
    }
    if (cfg.bias_update == BiasUpdate::PerEpoch) m.bias -= alpha * epoch_bias_grad;
  }
  return {std::move(m), std::move(trace)};
}

TrainResult train(const Dataset& data, const ModeLaplacians& laplacians, const GrtrConfig& config) {
  data.validate();
  if (data.empty()) throw DataError("dataset is empty");
  return train_from(initialize_model(data.shape(), config), data, laplacians);
}

TrainResult train_tensor_baseline(const Dataset& data, const GrtrConfig& config, TensorBaseline flavor) {
  data.validate();
  if (data.empty()) throw DataError("dataset is empty");
  const Shape& shape = data.shape();
  ModeLaplacians laplacians;
  if (flavor == TensorBaseline::L2TR) {
    for (auto d : shape) laplacians.emplace_back(Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  }
  return train(data, laplacians, config);
}

std::vector<std::vector<Contraction>> modewise_breakdown(const GrtrModel& m, const DenseTensor& x) {
  check_model_shape(m, x.shape());
  std::vector<std::vector<Contraction>> chains;
  for (std::size_t r = 0; r < m.factors.rank(); ++r) {
    std::vector<Contraction> chain;
    Contraction current = x;
    for (std::size_t n = 0; n < m.factors.order(); ++n) {
      current = contract_vector(std::get<DenseTensor>(current), 0,
                                m.factors.factor(n).col(static_cast<Eigen::Index>(r)));
      chain.push_back(current);
    }
    chains.push_back(std::move(chain));
  }
  return chains;
}

}  // namespace grtr
