#include "grtr/tensor.hpp"

#include <functional>
#include <numeric>
#include <sstream>

namespace grtr {

namespace {

void check_mode(const Shape& shape, std::size_t mode) {
  if (mode >= shape.size()) {
    throw DimensionError("mode " + std::to_string(mode + 1) + " out of range for order-" +
                         std::to_string(shape.size()) + " tensor");
  }
}

// Kolda column strides of the mode-n unfolding: stride of mode k is the
// product of the sizes of the non-n modes below k. Entry for `mode` is 0.
std::vector<std::size_t> unfolding_strides(const Shape& shape, std::size_t mode) {
  std::vector<std::size_t> strides(shape.size(), 0);
  std::size_t s = 1;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (k == mode) continue;
    strides[k] = s;
    s *= shape[k];
  }
  return strides;
}

// Advances a row-major multi-index by one position.
void increment(std::vector<std::size_t>& index, const Shape& shape) {
  for (std::size_t k = shape.size(); k-- > 0;) {
    if (++index[k] < shape[k]) return;
    index[k] = 0;
  }
}

}  // namespace

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t k = 0; k < shape.size(); ++k) os << (k ? "," : "") << shape[k];
  os << ']';
  return os.str();
}

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)) {
  if (shape_.empty()) throw DimensionError("tensor order must be at least 1");
  for (auto d : shape_) {
    if (d == 0) throw DimensionError("tensor mode sizes must be positive, got " + shape_string(shape_));
  }
  data_.assign(element_count(shape_), 0.0);
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data) : DenseTensor(std::move(shape)) {
  if (data.size() != data_.size()) {
    throw DimensionError("data length " + std::to_string(data.size()) + " does not match shape " +
                         shape_string(shape_));
  }
  data_ = std::move(data);
}

std::size_t DenseTensor::offset(std::span<const std::size_t> index) const {
  std::size_t off = 0;
  for (std::size_t k = 0; k < shape_.size(); ++k) off = off * shape_[k] + index[k];
  return off;
}

std::vector<std::size_t> DenseTensor::index_of(std::size_t offset) const {
  std::vector<std::size_t> index(shape_.size());
  for (std::size_t k = shape_.size(); k-- > 0;) {
    index[k] = offset % shape_[k];
    offset /= shape_[k];
  }
  return index;
}

double DenseTensor::at(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) {
    throw DimensionError("index of length " + std::to_string(index.size()) + " for order-" +
                         std::to_string(shape_.size()) + " tensor");
  }
  for (std::size_t k = 0; k < shape_.size(); ++k) {
    if (index[k] >= shape_[k]) {
      throw DimensionError("index " + std::to_string(index[k] + 1) + " out of range in mode " +
                           std::to_string(k + 1) + " (size " + std::to_string(shape_[k]) + ")");
    }
  }
  return data_[offset(index)];
}

Vector vectorize(const DenseTensor& t) {
  const Shape& shape = t.shape();
  // Vectorization is the column-major reading of the mode-1 unfolding.
  std::vector<std::size_t> strides(shape.size());
  std::size_t s = 1;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    strides[k] = s;
    s *= shape[k];
  }
  Vector v(static_cast<Eigen::Index>(t.size()));
  std::vector<std::size_t> index(shape.size(), 0);
  auto data = t.data();
  for (std::size_t off = 0; off < data.size(); ++off) {
    std::size_t pos = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) pos += index[k] * strides[k];
    v[static_cast<Eigen::Index>(pos)] = data[off];
    increment(index, shape);
  }
  return v;
}

DenseTensor unvectorize(const Vector& v, const Shape& shape) {
  DenseTensor t(shape);
  if (static_cast<std::size_t>(v.size()) != t.size()) {
    throw DimensionError("vector of length " + std::to_string(v.size()) + " cannot be folded into " +
                         shape_string(shape));
  }
  std::vector<std::size_t> strides(shape.size());
  std::size_t s = 1;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    strides[k] = s;
    s *= shape[k];
  }
  std::vector<std::size_t> index(shape.size(), 0);
  auto data = t.data();
  for (std::size_t off = 0; off < data.size(); ++off) {
    std::size_t pos = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) pos += index[k] * strides[k];
    data[off] = v[static_cast<Eigen::Index>(pos)];
    increment(index, shape);
  }
  return t;
}

Matrix matricize(const DenseTensor& t, std::size_t mode) {
  const Shape& shape = t.shape();
  check_mode(shape, mode);
  const auto rows = shape[mode];
  const auto cols = t.size() / rows;
  const auto strides = unfolding_strides(shape, mode);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::vector<std::size_t> index(shape.size(), 0);
  auto data = t.data();
  for (std::size_t off = 0; off < data.size(); ++off) {
    std::size_t col = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) col += index[k] * strides[k];
    m(static_cast<Eigen::Index>(index[mode]), static_cast<Eigen::Index>(col)) = data[off];
    increment(index, shape);
  }
  return m;
}

DenseTensor fold(const Matrix& m, std::size_t mode, const Shape& shape) {
  DenseTensor t(shape);
  check_mode(shape, mode);
  const auto rows = shape[mode];
  const auto cols = t.size() / rows;
  if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) != cols) {
    throw DimensionError("matrix " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         " does not fold into " + shape_string(shape) + " along mode " +
                         std::to_string(mode + 1));
  }
  const auto strides = unfolding_strides(shape, mode);
  std::vector<std::size_t> index(shape.size(), 0);
  auto data = t.data();
  for (std::size_t off = 0; off < data.size(); ++off) {
    std::size_t col = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) col += index[k] * strides[k];
    data[off] = m(static_cast<Eigen::Index>(index[mode]), static_cast<Eigen::Index>(col));
    increment(index, shape);
  }
  return t;
}

Matrix outer(const Vector& a, const Vector& b) { return a * b.transpose(); }

DenseTensor outer(std::span<const Vector> vectors) {
  if (vectors.empty()) throw DimensionError("outer product needs at least one vector");
  Shape shape;
  for (const auto& v : vectors) shape.push_back(static_cast<std::size_t>(v.size()));
  DenseTensor t(shape);
  std::vector<std::size_t> index(shape.size(), 0);
  auto data = t.data();
  for (double& x : data) {
    double p = 1.0;
    for (std::size_t k = 0; k < shape.size(); ++k) p *= vectors[k][static_cast<Eigen::Index>(index[k])];
    x = p;
    increment(index, shape);
  }
  return t;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      c.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return c;
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("Khatri-Rao product needs equal column counts, got " + std::to_string(a.cols()) +
                         " and " + std::to_string(b.cols()));
  }
  Matrix c(a.rows() * b.rows(), a.cols());
  for (Eigen::Index r = 0; r < a.cols(); ++r) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      c.col(r).segment(i * b.rows(), b.rows()) = a(i, r) * b.col(r);
    }
  }
  return c;
}

double inner(const DenseTensor& a, const DenseTensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("inner product of tensors with shapes " + shape_string(a.shape()) + " and " +
                         shape_string(b.shape()));
  }
  auto x = a.data();
  auto y = b.data();
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

Contraction contract_vector(const DenseTensor& t, std::size_t mode, const Vector& v) {
  const Shape& shape = t.shape();
  check_mode(shape, mode);
  const std::size_t len = shape[mode];
  if (static_cast<std::size_t>(v.size()) != len) {
    throw DimensionError("vector of length " + std::to_string(v.size()) + " cannot contract mode " +
                         std::to_string(mode + 1) + " of size " + std::to_string(len));
  }
  auto data = t.data();
  if (shape.size() == 1) {
    double s = 0.0;
    for (std::size_t j = 0; j < len; ++j) s += data[j] * v[static_cast<Eigen::Index>(j)];
    return s;
  }

  std::size_t before = 1;
  for (std::size_t k = 0; k < mode; ++k) before *= shape[k];
  const std::size_t after = t.size() / (before * len);

  Shape out_shape;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (k != mode) out_shape.push_back(shape[k]);
  }
  DenseTensor out(out_shape);
  auto res = out.data();
  for (std::size_t o = 0; o < before; ++o) {
    for (std::size_t j = 0; j < len; ++j) {
      const double w = v[static_cast<Eigen::Index>(j)];
      const double* src = data.data() + (o * len + j) * after;
      double* dst = res.data() + o * after;
      for (std::size_t i = 0; i < after; ++i) dst[i] += w * src[i];
    }
  }
  return out;
}

double contract_all(const DenseTensor& t, std::span<const Vector> vectors) {
  if (vectors.size() != t.order()) {
    throw DimensionError("expected " + std::to_string(t.order()) + " vectors for full contraction, got " +
                         std::to_string(vectors.size()));
  }
  Contraction current = t;
  for (const auto& v : vectors) current = contract_vector(std::get<DenseTensor>(current), 0, v);
  return std::get<double>(current);
}

}  // namespace grtr
