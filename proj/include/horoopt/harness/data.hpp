#pragma once

// Synthetic data for the experiments. All generators are deterministic given
// their seed (std::mt19937_64 + std::normal_distribution).

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "horoopt/errors.hpp"
#include "horoopt/spd.hpp"

namespace horoopt::harness {

using Rng = std::mt19937_64;

inline constexpr const char* kRngName = "std::mt19937_64 + std::normal_distribution<double>";

/// SplitMix64 step; derives independent seeds for the sub-streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
inline Matrix random_orthogonal(Eigen::Index n, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(n, n, rng));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

/// Default ground truth: eigenvalues log-uniform in [0.5, 2], random basis.
inline SpdPoint default_sigma_true(std::size_t n, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  std::uniform_real_distribution<double> unif(std::log(0.5), std::log(2.0));
  const auto ni = static_cast<Eigen::Index>(n);
  Vector lambda(ni);
  for (Eigen::Index i = 0; i < ni; ++i) lambda(i) = std::exp(unif(rng));
  const Matrix q = random_orthogonal(ni, rng);
  return SpdPoint(symmetrize(q * lambda.asDiagonal() * q.transpose()));
}

/// a_t = Sigma_true^{1/2} z_t with z_t standard normal.
inline std::vector<Vector> gen_gaussian_samples(const SpdPoint& sigma_true, std::size_t count,
                                                std::uint64_t seed) {
  Rng rng(derive_seed(seed, 1));
  const Matrix root = matrix_fn(sigma_true, MatrixFunction::sqrt());
  const Matrix z = gaussian_matrix(root.rows(), static_cast<Eigen::Index>(count), rng);
  const Matrix a = root * z;
  std::vector<Vector> out;
  out.reserve(count);
  for (Eigen::Index j = 0; j < a.cols(); ++j) out.emplace_back(a.col(j));
  return out;
}

/// Y_t = Exp_{Sigma_true}(sigma W_t); W_t symmetric with standard normal
/// diagonal and N(0, 1/n) off-diagonal entries mirrored across the diagonal.
inline std::vector<SpdPoint> gen_spd_samples(const SpdPoint& sigma_true, double sigma,
                                             std::size_t count, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("gen_spd_samples: spread must be nonnegative and finite");
  }
  Rng rng(derive_seed(seed, 2));
  std::normal_distribution<double> normal;
  const auto n = static_cast<Eigen::Index>(sigma_true.dim());
  const double off = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<SpdPoint> out;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    Matrix w(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      w(i, i) = normal(rng);
      for (Eigen::Index j = i + 1; j < n; ++j) {
        w(i, j) = off * normal(rng);
        w(j, i) = w(i, j);
      }
    }
    out.push_back(spd_exp(sigma_true, TangentVec(sigma * w)));
  }
  return out;
}

}  // namespace horoopt::harness
