#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>

#include "spdkm/errors.hpp"
#include "spdkm/rng.hpp"

namespace spdkm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace detail {

// Cholesky-Banachiewicz with an explicit pivot floor: a pivot (the diagonal
// remainder before its square root) must exceed dim * eps * max|S|, so
// numerically singular inputs are rejected rather than silently factorised.
// Returns false instead of throwing so callers can probe.
inline bool cholesky_lower(const Matrix& s, Matrix& l) {
  const Eigen::Index m = s.rows();
  const double tol = static_cast<double>(m) * std::numeric_limits<double>::epsilon() *
                     s.cwiseAbs().maxCoeff();
  l = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double acc = s(i, j);
      for (Eigen::Index t = 0; t < j; ++t) acc -= l(i, t) * l(j, t);
      if (i == j) {
        if (!(acc > tol)) return false;  // also catches NaN
        l(i, i) = std::sqrt(acc);
      } else {
        l(i, j) = acc / l(j, j);
      }
    }
  }
  return true;
}

// Inverse of the triangular-number map: the m with m(m+1)/2 == len.
inline int matrix_dim_for_embedded(Eigen::Index len) {
  const auto guess = static_cast<Eigen::Index>(
      (std::sqrt(8.0 * static_cast<double>(len) + 1.0) - 1.0) / 2.0);
  for (Eigen::Index m = std::max<Eigen::Index>(1, guess - 1); m <= guess + 1; ++m) {
    if (m * (m + 1) / 2 == len) return static_cast<int>(m);
  }
  throw DimensionMismatch("coordinate vector of length " + std::to_string(len) +
                          " does not equal m(m+1)/2 for any m");
}

}  // namespace detail

// Dense symmetric positive definite matrix. Construction absorbs round-off
// asymmetry up to 1e-8 * max|S| by symmetrising, rejects anything worse, and
// verifies positive definiteness with a pivoted Cholesky pass, so every live
// instance satisfies both invariants.
class SpdMatrix {
 public:
  explicit SpdMatrix(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
      throw DimensionMismatch("SPD matrix must be square and nonempty");
    }
    if (!entries_.allFinite()) {
      throw NotPositiveDefinite("matrix has non-finite entries");
    }
    const double scale = entries_.cwiseAbs().maxCoeff();
    const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * scale) {
      throw NotPositiveDefinite("matrix is not symmetric: max asymmetry " +
                                std::to_string(asym));
    }
    Matrix sym = 0.5 * (entries_ + entries_.transpose());
    entries_ = std::move(sym);
    Matrix l;
    if (!detail::cholesky_lower(entries_, l)) {
      throw NotPositiveDefinite("matrix is not positive definite");
    }
  }

  static SpdMatrix identity(int m) { return SpdMatrix(Matrix::Identity(m, m)); }

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

// Lower triangular matrix with strictly positive diagonal (the image of the
// Cholesky map).
class CholFactor {
 public:
  explicit CholFactor(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
      throw DimensionMismatch("Cholesky factor must be square and nonempty");
    }
    if (!entries_.allFinite()) {
      throw InvalidArgument("Cholesky factor has non-finite entries");
    }
    const Eigen::Index m = entries_.rows();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!(entries_(i, i) > 0.0)) {
        throw NotPositiveDefinite("Cholesky factor needs a strictly positive diagonal");
      }
      for (Eigen::Index j = i + 1; j < m; ++j) {
        if (entries_(i, j) != 0.0) {
          throw InvalidArgument("Cholesky factor must be lower triangular");
        }
      }
    }
  }

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

// Point in R^{m(m+1)/2}: the strict lower triangle of a Cholesky factor in
// column-major order followed by the logs of its diagonal. The space where
// the log-Cholesky distance is plain Euclidean and k-means runs.
class EmbeddedPoint {
 public:
  EmbeddedPoint(int dim_m, Vector coords) : dim_m_(dim_m), coords_(std::move(coords)) {
    if (dim_m_ < 1 || coords_.size() != embedded_size(dim_m_)) {
      throw DimensionMismatch("embedded point for m=" + std::to_string(dim_m_) +
                              " needs m(m+1)/2 coordinates, got " +
                              std::to_string(coords_.size()));
    }
    if (!coords_.allFinite()) {
      throw InvalidArgument("embedded coordinates must be finite");
    }
  }

  // Infers the matrix dimension from the coordinate count.
  static EmbeddedPoint from_coords(Vector coords) {
    const int m = detail::matrix_dim_for_embedded(coords.size());
    return EmbeddedPoint(m, std::move(coords));
  }

  static constexpr Eigen::Index embedded_size(int m) {
    return static_cast<Eigen::Index>(m) * (m + 1) / 2;
  }

  int dim_m() const { return dim_m_; }
  const Vector& coords() const { return coords_; }

 private:
  int dim_m_;
  Vector coords_;
};

inline CholFactor cholesky(const SpdMatrix& s) {
  Matrix l;
  if (!detail::cholesky_lower(s.entries(), l)) {
    throw NotPositiveDefinite("Cholesky pivot at or below dim*eps*max|S|");
  }
  return CholFactor(std::move(l));
}

// L -> L L^T, mirrored from the lower triangle so the result is exactly
// symmetric by construction.
inline SpdMatrix from_cholesky(const CholFactor& l) {
  const Eigen::Index m = l.entries().rows();
  Matrix prod = Matrix::Zero(m, m);
  prod.selfadjointView<Eigen::Lower>().rankUpdate(l.entries());
  Matrix full = prod.selfadjointView<Eigen::Lower>();
  return SpdMatrix(std::move(full));
}

inline EmbeddedPoint embed(const SpdMatrix& s) {
  const CholFactor l = cholesky(s);
  const Matrix& e = l.entries();
  const int m = l.dim();
  Vector coords(EmbeddedPoint::embedded_size(m));
  Eigen::Index idx = 0;
  for (int j = 0; j < m; ++j) {
    for (int i = j + 1; i < m; ++i) coords[idx++] = e(i, j);
  }
  for (int i = 0; i < m; ++i) coords[idx++] = std::log(e(i, i));
  return EmbeddedPoint(m, std::move(coords));
}

inline SpdMatrix unembed(const EmbeddedPoint& v) {
  const int m = v.dim_m();
  const Vector& c = v.coords();
  Matrix l = Matrix::Zero(m, m);
  Eigen::Index idx = 0;
  for (int j = 0; j < m; ++j) {
    for (int i = j + 1; i < m; ++i) l(i, j) = c[idx++];
  }
  for (int i = 0; i < m; ++i) l(i, i) = std::exp(c[idx++]);
  return from_cholesky(CholFactor(std::move(l)));
}

// Log-Cholesky distance, computed on the factors: Frobenius distance of the
// strict lower parts plus Frobenius distance of the log-diagonals. Equals the
// Euclidean distance of the embeddings.
inline double log_cholesky_distance(const SpdMatrix& a, const SpdMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("distance between SPD matrices of dimension " +
                            std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
  const Matrix la = cholesky(a).entries();
  const Matrix lb = cholesky(b).entries();
  const int m = a.dim();
  double acc = 0.0;
  for (int j = 0; j < m; ++j) {
    for (int i = j + 1; i < m; ++i) {
      const double d = la(i, j) - lb(i, j);
      acc += d * d;
    }
  }
  for (int i = 0; i < m; ++i) {
    const double d = std::log(la(i, i)) - std::log(lb(i, i));
    acc += d * d;
  }
  return std::sqrt(acc);
}

// Empirical dispersion sigma^2(a, Z): sum of squared distances from a.
inline double dispersion(const SpdMatrix& a, std::span<const SpdMatrix> zs) {
  double acc = 0.0;
  for (const SpdMatrix& s : zs) {
    const double d = log_cholesky_distance(a, s);
    acc += d * d;
  }
  return acc;
}

// Closed-form Frechet mean under the log-Cholesky metric: average the strict
// lower parts of the factors and exponentiate the averaged log-diagonals.
inline SpdMatrix frechet_mean(std::span<const SpdMatrix> zs) {
  if (zs.empty()) throw EmptyInput("frechet_mean: empty input");
  const int m = zs.front().dim();
  Matrix acc = Matrix::Zero(m, m);  // strict lower: factor sums; diagonal: log sums
  for (const SpdMatrix& s : zs) {
    if (s.dim() != m) throw DimensionMismatch("frechet_mean: mixed dimensions");
    const Matrix l = cholesky(s).entries();
    for (int j = 0; j < m; ++j) {
      for (int i = j + 1; i < m; ++i) acc(i, j) += l(i, j);
      acc(j, j) += std::log(l(j, j));
    }
  }
  acc /= static_cast<double>(zs.size());
  for (int j = 0; j < m; ++j) acc(j, j) = std::exp(acc(j, j));
  return from_cholesky(CholFactor(std::move(acc)));
}

// f(S) = U f(D) U^T via the symmetric eigendecomposition, for any symmetric
// input (the matrix log of an SPD matrix is symmetric but not SPD, and still
// needs the matrix exp applied to it).
template <class F>
Matrix matrix_function_symmetric(const Matrix& s, F&& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success) {
    throw EigenFailure("symmetric eigensolver did not converge");
  }
  Vector w = es.eigenvalues();
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = f(w[i]);
  const Matrix r = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
  Matrix sym = 0.5 * (r + r.transpose());
  return sym;
}

// The result is symmetric but in general not positive definite.
template <class F>
Matrix matrix_function(const SpdMatrix& s, F&& f) {
  return matrix_function_symmetric(s.entries(), std::forward<F>(f));
}

// Deterministic SPD sampler: iid Gaussian coordinates in the embedding mapped
// back through unembed. SPD by construction for any draw, and the induced
// distribution has a density in the embedded coordinates.
inline SpdMatrix sample_spd(int m, std::uint64_t seed, double spread) {
  if (m < 1) throw InvalidArgument("sample_spd: m must be >= 1");
  if (!(spread > 0.0)) throw InvalidArgument("sample_spd: spread must be positive");
  GaussianSampler g(seed);
  Vector coords(EmbeddedPoint::embedded_size(m));
  for (Eigen::Index i = 0; i < coords.size(); ++i) coords[i] = spread * g.normal();
  return unembed(EmbeddedPoint(m, std::move(coords)));
}

}  // namespace spdkm
