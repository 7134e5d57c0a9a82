#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "grtr/tensor.hpp"

namespace grtr {

/// Undirected weighted graph over one tensor mode.
struct GraphSpec {
  std::size_t size = 0;
  Matrix adjacency;  // symmetric, nonnegative, zero diagonal
  Matrix degree;     // diagonal, d_ii = Σ_j a_ij
  Matrix laplacian;  // degree - adjacency
};

inline constexpr double kSymmetryTolerance = 1e-9;

/// Builds the unnormalized Laplacian L = D - A. The input is checked for
/// squareness, symmetry within kSymmetryTolerance and nonnegativity, then
/// symmetrized as (A + A^T)/2 with the diagonal zeroed.
GraphSpec laplacian_from_adjacency(const Matrix& adjacency);

/// tr(U^T L U) = Σ_r u_r^T L u_r.
double smoothness(const Matrix& signals, const Matrix& laplacian);

/// a_ij = exp(-beta · ||r_i - r_j||_2) for i ≠ j, zero diagonal.
Matrix kernel_adjacency(std::span<const Vector> rows, double beta);
/// Same, taking the rows of a matrix as the vertex vectors.
Matrix kernel_adjacency(const Matrix& rows, double beta);

/// a_ij = 1 when labels i and j match and i ≠ j.
Matrix sector_adjacency(std::span<const std::string> sectors);

}  // namespace grtr
