#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "bvgm/errors.hpp"

namespace bvgm {

/// Seedable random stream. One handle per chain; a given (seed, stream,
/// call sequence) replays bit-identically on the same build.
class RngHandle {
 public:
  explicit RngHandle(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Uniform draw on the open interval (0,1).
  double uniform();

  /// Uniform integer in {0, ..., n-1}.
  int uniform_int(int n);

  /// Standard normal via Box-Muller.
  double normal();

  /// Gamma(shape, rate), mean = shape/rate. Marsaglia-Tsang with the
  /// shape<1 boost.
  double gamma(double shape, double rate);

  /// Inverse Gaussian ING(mean, shape) via the Michael-Schucany-Haas
  /// transform.
  double inverse_gaussian(double mean, double shape);

  /// Generalized inverse Gaussian with index 0: density on v > 0
  /// proportional to v^{-1} exp(-(chi/v + psi*v)/2).
  double gig_zero(double chi, double psi);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_, stream_;
  std::mt19937_64 engine_;
};

enum class MatrixForm { Covariance, Precision };

/// Multivariate normal draw. `mat` is SPD (after jitter); in Precision form
/// the factorization is used directly, no explicit inverse. Throws
/// NotSpdError when the Cholesky fails after 3 jitter attempts.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& mat,
                           MatrixForm form, RngHandle& rng);

/// Cholesky with up to 3 jitter attempts (1e-10 * trace/k added each try).
/// Returns the lower factor; throws NotSpdError on failure.
Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& mat);

}  // namespace bvgm
