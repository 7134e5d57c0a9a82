#include "grtr/linear.hpp"

namespace grtr {

double LinearModel::predict(const DenseTensor& x) const {
  const Vector v = vectorize(x);
  if (v.size() != weights.size()) {
    throw DimensionError("input has " + std::to_string(v.size()) + " features, model expects " +
                         std::to_string(weights.size()));
  }
  return weights.dot(v) + bias;
}

std::vector<double> LinearModel::predict(const Dataset& data) const {
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& x : data.inputs) out.push_back(predict(x));
  return out;
}

LinearModel train_linear(const Dataset& data, double l2, LinearFlavor flavor) {
  data.validate();
  if (data.empty()) throw DataError("linear regression needs at least one sample");
  if (!(l2 >= 0.0)) throw DataError("ridge penalty must be nonnegative");
  if (flavor == LinearFlavor::Plain) l2 = 0.0;

  const auto rows = static_cast<Eigen::Index>(data.size());
  const auto cols = static_cast<Eigen::Index>(element_count(data.shape()));
  Matrix x(rows, cols);
  Vector y(rows);
  for (Eigen::Index m = 0; m < rows; ++m) {
    x.row(m) = vectorize(data.inputs[static_cast<std::size_t>(m)]).transpose();
    y[m] = data.labels[static_cast<std::size_t>(m)];
  }
  const Vector x_mean = x.colwise().mean().transpose();
  const double y_mean = y.mean();
  x.rowwise() -= x_mean.transpose();
  y.array() -= y_mean;

  LinearModel model;
  model.l2 = l2;
  if (flavor == LinearFlavor::Plain) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(x);
    // Centering costs one degree of freedom, so a full-rank overdetermined
    // design has rank == cols with cols <= rows - 1.
    if (cols < rows && cod.rank() < cols) {
      throw DataError("normal equations are singular (rank " + std::to_string(cod.rank()) + " < " +
                      std::to_string(cols) + " features); use the ridge flavor with a positive penalty");
    }
    model.weights = cod.solve(y);
  } else if (cols <= rows) {
    Matrix gram = x.transpose() * x;
    gram.diagonal().array() += l2;
    Eigen::LDLT<Matrix> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw DataError("ridge system is not positive definite; increase the penalty");
    }
    model.weights = ldlt.solve(x.transpose() * y);
  } else {
    // (X^T X + λI)^{-1} X^T y = X^T (X X^T + λI)^{-1} y
    Matrix gram = x * x.transpose();
    gram.diagonal().array() += l2;
    Eigen::LDLT<Matrix> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || l2 == 0.0) {
      throw DataError("ridge system is singular; increase the penalty");
    }
    model.weights = x.transpose() * ldlt.solve(y);
  }
  model.bias = y_mean - x_mean.dot(model.weights);
  return model;
}

}  // namespace grtr
