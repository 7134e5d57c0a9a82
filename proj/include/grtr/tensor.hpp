#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace grtr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Shape = std::vector<std::size_t>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes, modes or lengths that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unusable input data (files, labels, graphs).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite error.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

std::size_t element_count(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense N-way array. Storage is row-major: the last index varies fastest.
/// Modes are 0-based in code; error messages report them 1-based.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(Shape shape);
  DenseTensor(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t order() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t dim(std::size_t mode) const { return shape_.at(mode); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double operator()(std::span<const std::size_t> index) const { return data_[offset(index)]; }
  double& operator()(std::span<const std::size_t> index) { return data_[offset(index)]; }
  double at(std::span<const std::size_t> index) const;

  /// Flat storage position of a 0-based multi-index (unchecked).
  std::size_t offset(std::span<const std::size_t> index) const;
  /// Inverse of offset().
  std::vector<std::size_t> index_of(std::size_t offset) const;

  bool operator==(const DenseTensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Vectorization with the first index varying fastest, i.e. the column-major
/// flattening of the mode-1 unfolding. This is the ordering under which the
/// CPD vectorization is (U_N ⊙ ... ⊙ U_1)·1.
Vector vectorize(const DenseTensor& t);
/// Inverse of vectorize().
DenseTensor unvectorize(const Vector& v, const Shape& shape);

/// Mode-n unfolding, I_n × ∏_{k≠n} I_k. Columns follow the Kolda ordering:
/// lower non-n modes vary fastest.
Matrix matricize(const DenseTensor& t, std::size_t mode);
/// Inverse of matricize().
DenseTensor fold(const Matrix& m, std::size_t mode, const Shape& shape);

Matrix outer(const Vector& a, const Vector& b);
DenseTensor outer(std::span<const Vector> vectors);

/// c_{iK+k, jL+l} = a_{ij} b_{kl} (0-based).
Matrix kronecker(const Matrix& a, const Matrix& b);
/// Column-wise Kronecker product of matrices with equal column counts.
Matrix khatri_rao(const Matrix& a, const Matrix& b);

double inner(const DenseTensor& a, const DenseTensor& b);

/// Result of a tensor-by-vector product: order N-1 tensor, or a plain scalar
/// when an order-1 tensor is contracted.
using Contraction = std::variant<DenseTensor, double>;

/// Tensor-by-vector product over `mode`.
Contraction contract_vector(const DenseTensor& t, std::size_t mode, const Vector& v);

/// Contracts every mode in turn (mode 1 first) down to a scalar.
double contract_all(const DenseTensor& t, std::span<const Vector> vectors);

}  // namespace grtr
