#pragma once

// Dense symmetric-matrix primitives: eigendecomposition-based square roots,
// positive-definiteness checks, correlation normalization.

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <utility>

#include "mgarch/errors.hpp"

namespace mgarch {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Square real matrix with exact entrywise symmetry enforced by storage:
// every write goes to both (i,j) and (j,i).
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;

  explicit SymmetricMatrix(int dim) : m_(Matrix::Zero(dim, dim)) {}

  // Mirrors the lower triangle into the upper one, so the result is
  // symmetric bit-for-bit even if the input only nearly is.
  static SymmetricMatrix from_dense(const Matrix& m) {
    if (m.rows() != m.cols()) {
      throw InvalidParams("SymmetricMatrix: input must be square");
    }
    SymmetricMatrix s(static_cast<int>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j <= i; ++j) {
        s.m_(i, j) = m(i, j);
        s.m_(j, i) = m(i, j);
      }
    }
    return s;
  }

  static SymmetricMatrix identity(int dim) {
    return from_dense(Matrix::Identity(dim, dim));
  }

  static SymmetricMatrix diagonal(const Vector& d) {
    SymmetricMatrix s(static_cast<int>(d.size()));
    for (int i = 0; i < d.size(); ++i) s.m_(i, i) = d(i);
    return s;
  }

  int dim() const { return static_cast<int>(m_.rows()); }

  double operator()(int i, int j) const { return m_(i, j); }

  void set(int i, int j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const Matrix& dense() const { return m_; }

 private:
  Matrix m_;
};

// Symmetric matrix with unit diagonal, off-diagonals in [-1, 1] and smallest
// eigenvalue >= -1e-10. The eigenvalue certificate is checked on construction
// unless the caller vouches for it (hot filter loops construct results that
// are positive definite by the recursion's algebra).
class CorrelationMatrix {
 public:
  CorrelationMatrix() = default;

  explicit CorrelationMatrix(const SymmetricMatrix& s, bool check_eigen = true)
      : s_(s) {
    validate_entries();
    if (check_eigen) validate_eigen();
  }

  static CorrelationMatrix identity(int dim) {
    return CorrelationMatrix(SymmetricMatrix::identity(dim), false);
  }

  int dim() const { return s_.dim(); }
  double operator()(int i, int j) const { return s_(i, j); }
  const Matrix& dense() const { return s_.dense(); }
  const SymmetricMatrix& sym() const { return s_; }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s_.dense(),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

 private:
  void validate_entries() const {
    const int k = dim();
    for (int i = 0; i < k; ++i) {
      if (std::abs(s_(i, i) - 1.0) >= 1e-12) {
        std::ostringstream os;
        os << "CorrelationMatrix: diagonal entry " << i << " is " << s_(i, i);
        throw InvalidParams(os.str());
      }
      for (int j = 0; j < i; ++j) {
        if (!(std::abs(s_(i, j)) <= 1.0 + 1e-12)) {
          std::ostringstream os;
          os << "CorrelationMatrix: entry (" << i << "," << j << ") = "
             << s_(i, j) << " outside [-1, 1]";
          throw InvalidParams(os.str());
        }
      }
    }
  }

  void validate_eigen() const {
    if (min_eigenvalue() < -1e-10) {
      throw NotPositiveDefinite(
          "CorrelationMatrix: smallest eigenvalue below -1e-10");
    }
  }

  SymmetricMatrix s_;
};

namespace detail {

struct EigenPair {
  Vector values;
  Matrix vectors;
};

inline EigenPair eigen_sym(const SymmetricMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.dense());
  if (es.info() != Eigen::Success) {
    throw NumericError("eigendecomposition failed to converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace detail

// Symmetric square root via the spectral decomposition, S*S == a.
// Cholesky would not do: the lower-triangular factor is not symmetric.
inline SymmetricMatrix sym_sqrt(const SymmetricMatrix& a) {
  const auto [values, vectors] = detail::eigen_sym(a);
  const double max_eig = values.maxCoeff();
  if (values.minCoeff() <= 1e-12 * max_eig || max_eig <= 0.0) {
    throw NotPositiveDefinite("sym_sqrt: matrix is not positive definite");
  }
  const Matrix s =
      vectors * values.cwiseSqrt().asDiagonal() * vectors.transpose();
  return SymmetricMatrix::from_dense(s);
}

// Symmetric root of the inverse, S*S == a^{-1}. A ridge eps*I may be added
// first; it defaults to off and near-singular inputs fail loudly.
inline SymmetricMatrix sym_inv_sqrt(const SymmetricMatrix& a,
                                    double ridge = 0.0) {
  SymmetricMatrix work = a;
  if (ridge > 0.0) {
    Matrix m = a.dense();
    m.diagonal().array() += ridge;
    work = SymmetricMatrix::from_dense(m);
  }
  const auto [values, vectors] = detail::eigen_sym(work);
  const double max_eig = values.maxCoeff();
  if (values.minCoeff() <= 1e-12 * max_eig || max_eig <= 0.0) {
    throw NotPositiveDefinite("sym_inv_sqrt: matrix is not positive definite");
  }
  const Matrix s = vectors * values.cwiseSqrt().cwiseInverse().asDiagonal() *
                   vectors.transpose();
  return SymmetricMatrix::from_dense(s);
}

inline bool is_positive_definite(const SymmetricMatrix& a,
                                 double tol = 1e-10) {
  const auto [values, vectors] = detail::eigen_sym(a);
  const double max_eig = values.maxCoeff();
  return values.minCoeff() > tol * std::max(1.0, max_eig);
}

inline bool is_positive_definite(const CorrelationMatrix& a,
                                 double tol = 1e-10) {
  return is_positive_definite(a.sym(), tol);
}

// R[i][j] = q[i][j] / sqrt(q[i][i] q[j][j]); the unit diagonal is set
// exactly and off-diagonals are clamped against last-ulp overshoot.
inline CorrelationMatrix normalize_to_correlation(const SymmetricMatrix& q) {
  const int k = q.dim();
  for (int i = 0; i < k; ++i) {
    if (!(q(i, i) > 0.0)) {
      throw NonPositiveDiagonal(
          "normalize_to_correlation: non-positive diagonal entry");
    }
  }
  SymmetricMatrix r(k);
  for (int i = 0; i < k; ++i) {
    r.set(i, i, 1.0);
    for (int j = 0; j < i; ++j) {
      double v = q(i, j) / std::sqrt(q(i, i) * q(j, j));
      if (v > 1.0) v = 1.0;
      if (v < -1.0) v = -1.0;
      r.set(i, j, v);
    }
  }
  return CorrelationMatrix(r, false);
}

// Sample covariance of the rows of x, divisor n-1.
inline SymmetricMatrix sample_covariance(const Matrix& x) {
  const auto n = x.rows();
  if (n < 2) throw TooShort("sample_covariance: need at least two rows");
  const Matrix centered = x.rowwise() - x.colwise().mean();
  const Matrix c =
      centered.transpose() * centered / static_cast<double>(n - 1);
  return SymmetricMatrix::from_dense(c);
}

// Pearson correlation of the columns of x (deviations from column means,
// divisor n-1 in the covariances, which cancels in the ratio).
inline CorrelationMatrix sample_correlation(const Matrix& x) {
  const SymmetricMatrix cov = sample_covariance(x);
  for (int i = 0; i < cov.dim(); ++i) {
    if (!(cov(i, i) > 0.0)) {
      throw DegenerateColumn("sample_correlation: column " +
                             std::to_string(i) + " has zero variance");
    }
  }
  return normalize_to_correlation(cov);
}

}  // namespace mgarch
