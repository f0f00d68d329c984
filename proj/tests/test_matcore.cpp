#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>

#include "mgarch/matcore.hpp"
#include "test_helpers.hpp"

using mgarch::CorrelationMatrix;
using mgarch::Matrix;
using mgarch::SymmetricMatrix;
using testutil::max_abs_diff;
using testutil::random_spd;

TEST_CASE("symmetric storage mirrors writes", "[matcore]") {
  SymmetricMatrix s(3);
  s.set(0, 2, -0.25);
  REQUIRE(s(2, 0) == -0.25);
  REQUIRE(s(0, 2) == s(2, 0));

  Matrix m(2, 2);
  m << 1.0, 0.3, 0.7, 2.0;  // asymmetric on purpose
  const SymmetricMatrix t = SymmetricMatrix::from_dense(m);
  REQUIRE(t(0, 1) == t(1, 0));
  REQUIRE(t(0, 1) == 0.7);  // lower triangle wins
}

TEST_CASE("sym_sqrt identity and diagonal cases", "[matcore]") {
  const SymmetricMatrix id = SymmetricMatrix::identity(3);
  REQUIRE(max_abs_diff(mgarch::sym_sqrt(id).dense(), id.dense()) < 1e-14);

  Matrix d(2, 2);
  d << 4.0, 0.0, 0.0, 9.0;
  const SymmetricMatrix root = mgarch::sym_sqrt(SymmetricMatrix::from_dense(d));
  REQUIRE(root(0, 0) == Catch::Approx(2.0).margin(1e-12));
  REQUIRE(root(1, 1) == Catch::Approx(3.0).margin(1e-12));
  REQUIRE(std::abs(root(0, 1)) < 1e-12);
}

TEST_CASE("sym_sqrt reproduces a random SPD matrix", "[matcore]") {
  const SymmetricMatrix a = random_spd(5, 42);
  const SymmetricMatrix s = mgarch::sym_sqrt(a);
  REQUIRE(max_abs_diff(s.dense() * s.dense(), a.dense()) < 1e-10);
  REQUIRE(max_abs_diff(s.dense(), s.dense().transpose()) == 0.0);
}

TEST_CASE("sym_sqrt rejects non-positive-definite input", "[matcore]") {
  Matrix m(2, 2);
  m << 1.0, 1.0, 1.0, 1.0;  // singular
  REQUIRE_THROWS_AS(mgarch::sym_sqrt(SymmetricMatrix::from_dense(m)),
                    mgarch::NotPositiveDefinite);
}

TEST_CASE("sym_inv_sqrt basics and sandwich product", "[matcore]") {
  const SymmetricMatrix id = SymmetricMatrix::identity(2);
  REQUIRE(max_abs_diff(mgarch::sym_inv_sqrt(id).dense(), id.dense()) < 1e-14);

  Matrix d(1, 1);
  d << 4.0;
  REQUIRE(mgarch::sym_inv_sqrt(SymmetricMatrix::from_dense(d))(0, 0) ==
          Catch::Approx(0.5).margin(1e-14));

  const SymmetricMatrix a = random_spd(4, 7);
  const SymmetricMatrix s = mgarch::sym_inv_sqrt(a);
  const Matrix sandwich = s.dense() * a.dense() * s.dense();
  REQUIRE(max_abs_diff(sandwich, Matrix::Identity(4, 4)) < 1e-9);
}

TEST_CASE("sym_inv_sqrt optional ridge regularizes a near-singular input",
          "[matcore]") {
  Matrix m(2, 2);
  m << 1.0, 1.0, 1.0, 1.0;
  const SymmetricMatrix a = SymmetricMatrix::from_dense(m);
  REQUIRE_THROWS_AS(mgarch::sym_inv_sqrt(a), mgarch::NotPositiveDefinite);
  REQUIRE_NOTHROW(mgarch::sym_inv_sqrt(a, 1e-6));
}

TEST_CASE("is_positive_definite", "[matcore]") {
  REQUIRE(mgarch::is_positive_definite(SymmetricMatrix::identity(3), 1e-10));

  Matrix sing(2, 2);
  sing << 1.0, 1.0, 1.0, 1.0;
  REQUIRE_FALSE(mgarch::is_positive_definite(SymmetricMatrix::from_dense(sing),
                                             1e-10));

  // eigenvalues 0.001 and 1.999
  Matrix near(2, 2);
  near << 1.0, 0.999, 0.999, 1.0;
  REQUIRE(mgarch::is_positive_definite(SymmetricMatrix::from_dense(near),
                                       1e-10));
}

TEST_CASE("normalize_to_correlation", "[matcore]") {
  Matrix d(2, 2);
  d << 4.0, 0.0, 0.0, 9.0;
  const CorrelationMatrix r0 =
      mgarch::normalize_to_correlation(SymmetricMatrix::from_dense(d));
  REQUIRE(max_abs_diff(r0.dense(), Matrix::Identity(2, 2)) == 0.0);

  Matrix q(2, 2);
  q << 4.0, 3.0, 3.0, 9.0;
  const CorrelationMatrix r =
      mgarch::normalize_to_correlation(SymmetricMatrix::from_dense(q));
  REQUIRE(r(0, 0) == 1.0);
  REQUIRE(r(1, 1) == 1.0);
  REQUIRE(r(0, 1) == Catch::Approx(0.5).margin(1e-14));

  Matrix neg(2, 2);
  neg << -1.0, 0.0, 0.0, 1.0;
  REQUIRE_THROWS_AS(
      mgarch::normalize_to_correlation(SymmetricMatrix::from_dense(neg)),
      mgarch::NonPositiveDiagonal);
}

TEST_CASE("normalize_to_correlation is idempotent on correlation matrices",
          "[matcore]") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const int k = 2 + static_cast<int>(rng() % 5);
    const Matrix x = testutil::random_matrix(50, k, rng());
    const CorrelationMatrix r = mgarch::sample_correlation(x);
    const CorrelationMatrix again = mgarch::normalize_to_correlation(r.sym());
    REQUIRE(max_abs_diff(again.dense(), r.dense()) < 1e-15);
  }
}

TEST_CASE("sym_sqrt squares back over random SPD matrices", "[matcore]") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    const int k = 1 + static_cast<int>(rng() % 10);
    const SymmetricMatrix a = random_spd(k, rng());
    const SymmetricMatrix s = mgarch::sym_sqrt(a);
    REQUIRE(max_abs_diff(s.dense() * s.dense(), a.dense()) < 1e-10);

    const SymmetricMatrix si = mgarch::sym_inv_sqrt(a);
    const Matrix inv_of_root = s.dense().inverse();
    REQUIRE(max_abs_diff(si.dense(), inv_of_root) < 1e-9);
  }
}

TEST_CASE("sample_correlation basics", "[matcore]") {
  const Matrix col = testutil::random_matrix(40, 1, 5);
  Matrix dup(40, 2);
  dup.col(0) = col;
  dup.col(1) = col;
  REQUIRE(mgarch::sample_correlation(dup)(0, 1) ==
          Catch::Approx(1.0).margin(1e-12));

  Matrix flip(40, 2);
  flip.col(0) = col;
  flip.col(1) = -col;
  REQUIRE(mgarch::sample_correlation(flip)(0, 1) ==
          Catch::Approx(-1.0).margin(1e-12));

  const Matrix indep = testutil::random_matrix(100, 3, 2024);
  const CorrelationMatrix r = mgarch::sample_correlation(indep);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(r(i, i) == 1.0);
    for (int j = 0; j < i; ++j) REQUIRE(std::abs(r(i, j)) < 0.35);
  }

  Matrix constant = Matrix::Zero(30, 2);
  constant.col(0) = col.topRows(30);
  REQUIRE_THROWS_AS(mgarch::sample_correlation(constant),
                    mgarch::DegenerateColumn);
}

TEST_CASE("sample_correlation is PD on tall Gaussian panels", "[matcore]") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const int k = 2 + static_cast<int>(rng() % 6);
    const int t = k + 2 + static_cast<int>(rng() % 60);
    const Matrix x = testutil::random_matrix(t, k, rng());
    const CorrelationMatrix r = mgarch::sample_correlation(x);
    for (int i = 0; i < k; ++i) REQUIRE(r(i, i) == 1.0);
    REQUIRE(mgarch::is_positive_definite(r, 1e-10));
  }
}

TEST_CASE("CorrelationMatrix validates its invariants", "[matcore]") {
  Matrix bad_diag(2, 2);
  bad_diag << 1.1, 0.0, 0.0, 1.0;
  REQUIRE_THROWS_AS(
      CorrelationMatrix(SymmetricMatrix::from_dense(bad_diag)),
      mgarch::InvalidParams);

  Matrix bad_range(2, 2);
  bad_range << 1.0, 1.5, 1.5, 1.0;
  REQUIRE_THROWS_AS(
      CorrelationMatrix(SymmetricMatrix::from_dense(bad_range)),
      mgarch::InvalidParams);

  Matrix indefinite(3, 3);
  indefinite << 1.0, 0.9, -0.9, 0.9, 1.0, 0.9, -0.9, 0.9, 1.0;
  REQUIRE_THROWS_AS(
      CorrelationMatrix(SymmetricMatrix::from_dense(indefinite)),
      mgarch::NotPositiveDefinite);
}
