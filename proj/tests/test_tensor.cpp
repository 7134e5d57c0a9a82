#include <gtest/gtest.h>

#include "grtr/tensor.hpp"
#include "oracles.hpp"

using namespace grtr;

namespace {

DenseTensor iota(const Shape& shape) {
  DenseTensor t(shape);
  double v = 1.0;
  for (auto& x : t.data()) x = v++;
  return t;
}

}  // namespace

TEST(DenseTensor, RejectsDataLengthMismatch) {
  EXPECT_THROW(DenseTensor({2, 3}, std::vector<double>(5)), DimensionError);
  EXPECT_THROW(DenseTensor(Shape{}), DimensionError);
}

TEST(DenseTensor, RowMajorOffsets) {
  const DenseTensor t = iota({2, 3, 4});
  oracle::for_each_index(t.shape(), [&](const auto& idx) {
    EXPECT_EQ(t(idx), static_cast<double>(1 + idx[0] * 12 + idx[1] * 4 + idx[2]));
    EXPECT_EQ(t.index_of(t.offset(idx)), idx);
  });
}

TEST(DenseTensor, CheckedAccessReportsOneBasedMode) {
  const DenseTensor t = iota({2, 2});
  const std::vector<std::size_t> bad = {0, 2};
  try {
    t.at(bad);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("mode 2"), std::string::npos) << e.what();
  }
}

TEST(Vectorize, OrderOneIsIdentity) {
  const DenseTensor t({2}, {3, 7});
  EXPECT_EQ(vectorize(t), (Vector(2) << 3, 7).finished());
}

TEST(Vectorize, FirstIndexFastestConvention) {
  const DenseTensor t({2, 2}, {1, 2, 3, 4});
  EXPECT_EQ(vectorize(t), (Vector(4) << 1, 3, 2, 4).finished());
  const DenseTensor u = iota({3, 2, 4});
  EXPECT_EQ(vectorize(u), oracle::vectorize(u));
}

TEST(Vectorize, RoundTrip) {
  std::mt19937_64 rng(1);
  const Vector v = Vector::Random(24);
  EXPECT_EQ(vectorize(unvectorize(v, {3, 2, 4})), v);
  const DenseTensor t = oracle::random_tensor({3, 2, 4}, rng);
  EXPECT_EQ(unvectorize(vectorize(t), t.shape()), t);
}

TEST(Matricize, OrderTwoIsMatrixOrTranspose) {
  const DenseTensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  EXPECT_EQ(matricize(t, 0), m);
  EXPECT_EQ(matricize(t, 1), m.transpose());
}

TEST(Matricize, EightEntriesModeOne) {
  const DenseTensor t = iota({2, 2, 2});
  Matrix expected(2, 4);
  // t(i,j,k) = 1 + 4i + 2j + k; columns enumerate (j,k) with j fastest.
  expected << 1, 3, 2, 4, 5, 7, 6, 8;
  EXPECT_EQ(matricize(t, 0), expected);
  EXPECT_EQ(matricize(t, 0), oracle::matricize(t, 0));
  EXPECT_EQ(fold(expected, 0, t.shape()), t);
}

TEST(Matricize, MatchesColumnFormulaAndFoldsBack) {
  std::mt19937_64 rng(2);
  for (const Shape& s : {Shape{3, 4, 2}, Shape{2, 3, 2, 3}, Shape{5}, Shape{1, 4, 1}}) {
    const DenseTensor t = oracle::random_tensor(s, rng);
    for (std::size_t n = 0; n < s.size(); ++n) {
      EXPECT_EQ(matricize(t, n), oracle::matricize(t, n));
      EXPECT_EQ(fold(matricize(t, n), n, s), t);
    }
  }
}

TEST(Matricize, Errors) {
  const DenseTensor t = iota({2, 2});
  EXPECT_THROW(matricize(t, 2), DimensionError);
  EXPECT_THROW(fold(Matrix::Zero(2, 3), 0, {2, 2}), DimensionError);
  const DenseTensor scalar = fold(Matrix::Constant(1, 1, 4.0), 0, {1});
  EXPECT_EQ(scalar.data()[0], 4.0);
}

TEST(Outer, Examples) {
  Matrix e(2, 2);
  e << 0, 1, 0, 0;
  EXPECT_EQ(outer((Vector(2) << 1, 0).finished(), (Vector(2) << 0, 1).finished()), e);
  EXPECT_EQ(outer(Vector::Constant(1, 2.0), Vector::Constant(1, 3.0)), Matrix::Constant(1, 1, 6.0));

  const std::vector<Vector> vs = {(Vector(2) << 1, 2).finished(), (Vector(2) << 1, 1).finished(),
                                  (Vector(2) << 1, 0).finished()};
  const DenseTensor t = outer(vs);
  ASSERT_EQ(t.shape(), (Shape{2, 2, 2}));
  EXPECT_EQ(t(std::vector<std::size_t>{1, 0, 0}), 2.0);
  EXPECT_EQ(t(std::vector<std::size_t>{1, 1, 1}), 0.0);
  oracle::for_each_index(t.shape(), [&](const auto& i) {
    EXPECT_EQ(t(i), vs[0][static_cast<Eigen::Index>(i[0])] * vs[1][static_cast<Eigen::Index>(i[1])] *
                        vs[2][static_cast<Eigen::Index>(i[2])]);
  });
}

TEST(Kronecker, Examples) {
  EXPECT_EQ(kronecker(Matrix::Identity(2, 2), Matrix::Identity(2, 2)), Matrix::Identity(4, 4));
  const Matrix b = Matrix::Random(3, 2);
  EXPECT_EQ(kronecker(Matrix::Ones(1, 1), b), b);
  Matrix a(2, 2), c(2, 2);
  a << 1, 2, 3, 4;
  c << 0, 1, 1, 0;
  const Matrix k = kronecker(a, c);
  ASSERT_EQ(k.rows(), 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) EXPECT_EQ(k(i * 2 + p, j * 2 + q), a(i, j) * c(p, q));
}

TEST(KhatriRao, ColumnwiseKronecker) {
  const Matrix kr = khatri_rao(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  Matrix expected = Matrix::Zero(4, 2);
  expected(0, 0) = 1;
  expected(3, 1) = 1;
  EXPECT_EQ(kr, expected);

  const Matrix a = Matrix::Random(2, 1), b = Matrix::Random(3, 1);
  EXPECT_EQ(khatri_rao(a, b), kronecker(a, b));

  const Matrix x = Matrix::Random(2, 3), y = Matrix::Random(3, 3);
  const Matrix z = khatri_rao(x, y);
  ASSERT_EQ(z.rows(), 6);
  for (int r = 0; r < 3; ++r) EXPECT_EQ(Vector(z.col(r)), oracle::kron(x.col(r), y.col(r)));
  EXPECT_THROW(khatri_rao(Matrix::Random(2, 2), Matrix::Random(2, 3)), DimensionError);
}

TEST(Inner, Examples) {
  std::mt19937_64 rng(3);
  const DenseTensor t = oracle::random_tensor({3, 2}, rng);
  EXPECT_EQ(inner(t, DenseTensor({3, 2})), 0.0);
  EXPECT_GE(inner(t, t), 0.0);
  EXPECT_EQ(inner(DenseTensor({2, 2}, {1, 2, 3, 4}), DenseTensor({2, 2}, {1, 0, 0, 1})), 5.0);
  EXPECT_THROW(inner(t, DenseTensor({2, 3})), DimensionError);
  const DenseTensor u = oracle::random_tensor({2, 3, 4}, rng), w = oracle::random_tensor({2, 3, 4}, rng);
  EXPECT_NEAR(inner(u, w), vectorize(u).dot(vectorize(w)), 1e-12 * (1.0 + std::abs(inner(u, w))));
}

TEST(ContractVector, SlicesAndSums) {
  const DenseTensor t = iota({2, 2, 2});
  const auto summed = std::get<DenseTensor>(contract_vector(t, 1, Vector::Ones(2)));
  ASSERT_EQ(summed.shape(), (Shape{2, 2}));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t k = 0; k < 2; ++k) {
      const std::vector<std::size_t> at = {i, k};
      EXPECT_EQ(summed(at), t(std::vector<std::size_t>{i, 0, k}) + t(std::vector<std::size_t>{i, 1, k}));
    }
  Vector e = Vector::Zero(2);
  e[1] = 1.0;
  const auto slice = std::get<DenseTensor>(contract_vector(t, 0, e));
  oracle::for_each_index(slice.shape(), [&](const auto& i) {
    EXPECT_EQ(slice(i), t(std::vector<std::size_t>{1, i[0], i[1]}));
  });
  const auto scalar = contract_vector(DenseTensor({3}, {1, 2, 3}), 0, Vector::Ones(3));
  EXPECT_EQ(std::get<double>(scalar), 6.0);
  EXPECT_THROW(contract_vector(t, 0, Vector::Ones(3)), DimensionError);
}

TEST(ContractAll, RankOneFactorizes) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vector> v, w;
    double expected = 1.0;
    for (int n = 0; n < 4; ++n) {
      Vector a(3 + n), b(3 + n);
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        a[i] = normal(rng);
        b[i] = normal(rng);
      }
      expected *= a.dot(b);
      v.push_back(a);
      w.push_back(b);
    }
    const double got = contract_all(outer(v), w);
    EXPECT_NEAR(got, expected, 1e-12 * std::max(1.0, std::abs(expected)));
  }
}
