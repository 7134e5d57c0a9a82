#include "grtr/cpd.hpp"

namespace grtr {

namespace {

void check_mode(const CpdFactors& f, std::size_t mode) {
  if (mode >= f.order()) {
    throw DimensionError("mode " + std::to_string(mode + 1) + " out of range for order-" +
                         std::to_string(f.order()) + " CPD");
  }
}

}  // namespace

CpdFactors::CpdFactors(std::vector<Matrix> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw DimensionError("CPD needs at least one factor matrix");
  rank_ = static_cast<std::size_t>(factors_.front().cols());
  if (rank_ == 0) throw DimensionError("CPD rank must be at least 1");
  for (std::size_t n = 0; n < factors_.size(); ++n) {
    if (static_cast<std::size_t>(factors_[n].cols()) != rank_) {
      throw DimensionError("factor " + std::to_string(n + 1) + " has " + std::to_string(factors_[n].cols()) +
                           " columns, expected rank " + std::to_string(rank_));
    }
    if (factors_[n].rows() == 0) throw DimensionError("factor " + std::to_string(n + 1) + " has no rows");
  }
}

CpdFactors::CpdFactors(const Shape& shape, std::size_t rank) {
  if (shape.empty()) throw DimensionError("CPD needs at least one mode");
  if (rank == 0) throw DimensionError("CPD rank must be at least 1");
  for (auto d : shape) {
    if (d == 0) throw DimensionError("CPD mode sizes must be positive");
    factors_.push_back(Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(rank)));
  }
  rank_ = rank;
}

Shape CpdFactors::shape() const {
  Shape s;
  for (const auto& u : factors_) s.push_back(static_cast<std::size_t>(u.rows()));
  return s;
}

std::size_t CpdFactors::parameter_count() const {
  std::size_t rows = 0;
  for (const auto& u : factors_) rows += static_cast<std::size_t>(u.rows());
  return rows * rank_;
}

DenseTensor reconstruct(const CpdFactors& f) {
  // Row-major storage puts mode 1 slowest, so the ascending Khatri-Rao chain
  // U^(1) ⊙ ... ⊙ U^(N) summed over columns is exactly the flat data.
  Matrix chain = f.factor(0);
  for (std::size_t n = 1; n < f.order(); ++n) chain = khatri_rao(chain, f.factor(n));
  Vector flat = chain.rowwise().sum();
  return DenseTensor(f.shape(), std::vector<double>(flat.data(), flat.data() + flat.size()));
}

Matrix khatri_rao_complement(const CpdFactors& f, std::size_t mode) {
  check_mode(f, mode);
  if (f.order() == 1) return Matrix::Ones(1, static_cast<Eigen::Index>(f.rank()));
  Matrix chain;
  bool first = true;
  for (std::size_t n = f.order(); n-- > 0;) {
    if (n == mode) continue;
    if (first) {
      chain = f.factor(n);
      first = false;
    } else {
      chain = khatri_rao(chain, f.factor(n));
    }
  }
  return chain;
}

Matrix matricized(const CpdFactors& f, std::size_t mode) {
  return f.factor(mode) * khatri_rao_complement(f, mode).transpose();
}

Vector cpd_vectorize(const CpdFactors& f) {
  Matrix chain = f.factor(f.order() - 1);
  for (std::size_t n = f.order() - 1; n-- > 0;) chain = khatri_rao(chain, f.factor(n));
  return chain.rowwise().sum();
}

double coefficient_at(const CpdFactors& f, std::span<const std::size_t> index) {
  if (index.size() != f.order()) {
    throw DimensionError("index of length " + std::to_string(index.size()) + " for order-" +
                         std::to_string(f.order()) + " CPD");
  }
  for (std::size_t n = 0; n < f.order(); ++n) {
    if (index[n] >= static_cast<std::size_t>(f.factor(n).rows())) {
      throw DimensionError("index " + std::to_string(index[n] + 1) + " out of range in mode " +
                           std::to_string(n + 1) + " (size " + std::to_string(f.factor(n).rows()) + ")");
    }
  }
  double sum = 0.0;
  for (std::size_t r = 0; r < f.rank(); ++r) {
    double p = 1.0;
    for (std::size_t n = 0; n < f.order(); ++n) {
      p *= f.factor(n)(static_cast<Eigen::Index>(index[n]), static_cast<Eigen::Index>(r));
    }
    sum += p;
  }
  return sum;
}

}  // namespace grtr
