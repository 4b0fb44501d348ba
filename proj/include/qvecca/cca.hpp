#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "qvecca/error.hpp"
#include "qvecca/matio.hpp"

namespace qvecca {

// First canonical correlation between the two views of an AlignedPair.
// v and w are the canonical directions over embedding dimensions and
// linguistic columns; their projections of the centered data have unit
// variance (exactly when ridge == 0).
struct CcaResult {
  double correlation = 0.0;  // in [0,1]
  Eigen::VectorXd v;         // length D
  Eigen::VectorXd w;         // length P
  Eigen::Index effective_rank_x = 0;
  Eigen::Index effective_rank_y = 0;
};

// Default regularization for qvec_cca_score. The ridge is a factor relative
// to the mean diagonal of each covariance block (embedding norms vary by
// orders of magnitude across toolkits, so an absolute ridge would not
// transfer). Spectral truncation alone handles rank deficiency, and any
// positive ridge biases a perfect self-correlation below 1, so the default
// ridge is zero.
inline constexpr double kDefaultRidge = 0.0;
inline constexpr double kDefaultRankTol = 1e-10;

// Subtracts each column's mean; rows are observations.
inline Eigen::MatrixXd center_columns(const Eigen::MatrixXd& m) {
  if (m.rows() < 2) throw Error("cca: need at least 2 observations to center");
  Eigen::MatrixXd centered = m;
  centered.rowwise() -= m.colwise().mean();
  return centered;
}

namespace detail {

struct Whitener {
  Eigen::MatrixXd transform;  // K x rank; transform^T * Sigma * transform == I
  Eigen::Index rank = 0;
};

// Symmetric-eigendecomposition whitening with relative-threshold truncation.
// Eigenvalues at or below rank_tol times the largest are discarded rather
// than inverted; sparse linguistic columns make rank deficiency routine.
inline Whitener whiten_covariance(const Eigen::MatrixXd& sigma, double ridge, double rank_tol) {
  const Eigen::Index k = sigma.rows();
  Eigen::MatrixXd regularized = sigma;
  if (ridge > 0.0) {
    const double mean_diag = sigma.trace() / static_cast<double>(k);
    regularized.diagonal().array() += ridge * mean_diag;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(regularized);
  if (solver.info() != Eigen::Success) throw Error("cca: eigendecomposition failed");
  const Eigen::VectorXd& eigenvalues = solver.eigenvalues();  // ascending

  const double largest = eigenvalues(k - 1);
  Whitener result;
  if (!(largest > 0.0)) return result;  // all-constant data: rank 0

  const double threshold = rank_tol * largest;
  Eigen::Index first_kept = k;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (eigenvalues(i) > threshold) {
      first_kept = i;
      break;
    }
  }
  result.rank = k - first_kept;
  result.transform.resize(k, result.rank);
  for (Eigen::Index i = first_kept; i < k; ++i) {
    result.transform.col(i - first_kept) =
        solver.eigenvectors().col(i) / std::sqrt(eigenvalues(i));
  }
  return result;
}

}  // namespace detail

// Computes the first canonical correlation of the pair's centered data
// matrices. The covariance blocks receive ridge * mean(diagonal) on their
// diagonals, are whitened by truncated symmetric eigendecomposition, and the
// correlation is the largest singular value of the whitened cross-covariance,
// clamped into [0,1]. The retained eigenvalue counts are reported as
// effective ranks.
inline CcaResult first_canonical_correlation(const AlignedPair& pair,
                                             double ridge = kDefaultRidge,
                                             double rank_tol = kDefaultRankTol) {
  if (ridge < 0.0) throw Error("cca: ridge must be nonnegative");
  if (!(rank_tol > 0.0)) throw Error("cca: rank_tol must be positive");
  const Eigen::Index n = pair.common_words();
  if (n < 2) throw Error("cca: need at least 2 common words");

  const Eigen::MatrixXd x = center_columns(pair.emb.transpose());   // N' x D
  const Eigen::MatrixXd s = center_columns(pair.ling.transpose());  // N' x P
  const double denom = static_cast<double>(n - 1);
  const Eigen::MatrixXd sigma_xx = (x.adjoint() * x) / denom;
  const Eigen::MatrixXd sigma_yy = (s.adjoint() * s) / denom;
  const Eigen::MatrixXd sigma_xy = (x.adjoint() * s) / denom;

  const detail::Whitener wx = detail::whiten_covariance(sigma_xx, ridge, rank_tol);
  const detail::Whitener wy = detail::whiten_covariance(sigma_yy, ridge, rank_tol);
  if (wx.rank == 0 && wy.rank == 0) {
    throw Error("cca: both sides are constant (effective rank 0)");
  }
  if (wx.rank == 0) throw Error("cca: embedding side is constant (effective rank 0)");
  if (wy.rank == 0) throw Error("cca: linguistic side is constant (effective rank 0)");

  const Eigen::MatrixXd whitened_cross = wx.transform.adjoint() * sigma_xy * wy.transform;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(whitened_cross,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);

  CcaResult result;
  result.correlation = std::clamp(svd.singularValues()(0), 0.0, 1.0);
  result.v = wx.transform * svd.matrixU().col(0);
  result.w = wy.transform * svd.matrixV().col(0);
  result.effective_rank_x = wx.rank;
  result.effective_rank_y = wy.rank;

  // Report the nonnegative correlation: flip w if the projections anti-align.
  if ((x * result.v).dot(s * result.w) < 0.0) result.w = -result.w;
  return result;
}

// The QVEC-CCA score with default regularization.
inline double qvec_cca_score(const AlignedPair& pair) {
  return first_canonical_correlation(pair).correlation;
}

}  // namespace qvecca
