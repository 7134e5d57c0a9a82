#include "grtr/graph.hpp"

#include <cmath>

namespace grtr {

GraphSpec laplacian_from_adjacency(const Matrix& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw DimensionError("adjacency must be square, got " + std::to_string(adjacency.rows()) + "x" +
                         std::to_string(adjacency.cols()));
  }
  if (!adjacency.allFinite()) throw DataError("adjacency has non-finite entries");
  const double asym = (adjacency - adjacency.transpose()).cwiseAbs().maxCoeff();
  if (adjacency.size() > 0 && asym > kSymmetryTolerance) {
    throw DataError("adjacency is not symmetric (max |a_ij - a_ji| = " + std::to_string(asym) + ")");
  }
  if (adjacency.size() > 0 && adjacency.minCoeff() < 0.0) throw DataError("adjacency has negative entries");

  GraphSpec g;
  g.size = static_cast<std::size_t>(adjacency.rows());
  g.adjacency = 0.5 * (adjacency + adjacency.transpose());
  g.adjacency.diagonal().setZero();
  g.degree = g.adjacency.rowwise().sum().asDiagonal();
  g.laplacian = g.degree - g.adjacency;
  return g;
}

double smoothness(const Matrix& signals, const Matrix& laplacian) {
  if (laplacian.rows() != laplacian.cols() || signals.rows() != laplacian.rows()) {
    throw DimensionError("signals with " + std::to_string(signals.rows()) + " rows do not match a " +
                         std::to_string(laplacian.rows()) + "x" + std::to_string(laplacian.cols()) +
                         " Laplacian");
  }
  return (signals.transpose() * laplacian * signals).trace();
}

Matrix kernel_adjacency(std::span<const Vector> rows, double beta) {
  if (rows.empty()) throw DataError("kernel adjacency needs at least one vertex");
  if (!(beta > 0.0)) throw DataError("kernel bandwidth beta must be positive");
  const auto dim = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != dim) throw DimensionError("kernel adjacency rows have mismatched lengths");
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = std::exp(-beta * (rows[i] - rows[j]).norm());
      a(i, j) = w;
      a(j, i) = w;
    }
  }
  return a;
}

Matrix kernel_adjacency(const Matrix& rows, double beta) {
  std::vector<Vector> vs;
  vs.reserve(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) vs.emplace_back(rows.row(i).transpose());
  return kernel_adjacency(vs, beta);
}

Matrix sector_adjacency(std::span<const std::string> sectors) {
  const auto n = static_cast<Eigen::Index>(sectors.size());
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && sectors[i] == sectors[j]) a(i, j) = 1.0;
    }
  }
  return a;
}

}  // namespace grtr
