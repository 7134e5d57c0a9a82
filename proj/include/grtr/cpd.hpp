#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "grtr/tensor.hpp"

namespace grtr {

/// Rank-R CPD of an order-N tensor: one I_n × R factor matrix per mode.
class CpdFactors {
 public:
  CpdFactors() = default;
  explicit CpdFactors(std::vector<Matrix> factors);
  /// All-zero factors for the given shape and rank.
  CpdFactors(const Shape& shape, std::size_t rank);

  std::size_t order() const { return factors_.size(); }
  std::size_t rank() const { return rank_; }
  Shape shape() const;

  const Matrix& factor(std::size_t mode) const { return factors_.at(mode); }
  Matrix& factor(std::size_t mode) { return factors_.at(mode); }
  const std::vector<Matrix>& factors() const { return factors_; }

  /// R·Σ I_n trainable factor entries (bias not included).
  std::size_t parameter_count() const;

 private:
  std::vector<Matrix> factors_;
  std::size_t rank_ = 0;
};

/// Σ_r u_r^(1) ∘ ... ∘ u_r^(N).
DenseTensor reconstruct(const CpdFactors& f);

/// U^(-n): Khatri-Rao chain U^(N) ⊙ ... ⊙ U^(1) with mode n skipped,
/// folded left in descending mode order.
Matrix khatri_rao_complement(const CpdFactors& f, std::size_t mode);

/// U^(n) · U^(-n)^T, the mode-n unfolding of the reconstructed tensor.
Matrix matricized(const CpdFactors& f, std::size_t mode);

/// (U^(N) ⊙ ... ⊙ U^(1))·1, matching vectorize(reconstruct(f)).
Vector cpd_vectorize(const CpdFactors& f);

/// Single entry w_{i_1..i_N} of the reconstructed tensor, without building it.
double coefficient_at(const CpdFactors& f, std::span<const std::size_t> index);

}  // namespace grtr
