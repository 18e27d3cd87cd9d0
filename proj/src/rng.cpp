#include "bvgm/rng.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace bvgm {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

inline void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}
}  // namespace

RngHandle::RngHandle(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  std::seed_seq sseq{static_cast<std::uint32_t>(seed),
                     static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(stream),
                     static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(sseq);
}

double RngHandle::uniform() {
  // 53-bit mantissa, shifted to the open interval.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

int RngHandle::uniform_int(int n) {
  assert(n > 0);
  // Rejection to avoid modulo bias.
  const std::uint64_t un = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % un;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return static_cast<int>(r % un);
}

double RngHandle::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double RngHandle::gamma(double shape, double rate) {
  require_positive(shape, "gamma shape");
  require_positive(rate, "gamma rate");
  if (shape < 1.0) {
    // Boost: draw at shape+1 and scale by U^{1/shape}.
    const double g = gamma(shape + 1.0, 1.0);
    const double u = uniform();
    return g * std::pow(u, 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 ||
        std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      const double draw = d * v / rate;
      assert(draw > 0.0);
      return draw;
    }
  }
}

double RngHandle::inverse_gaussian(double mean, double shape) {
  require_positive(mean, "inverse Gaussian mean");
  require_positive(shape, "inverse Gaussian shape");
  const double nu = normal();
  const double y = nu * nu;
  const double mu2 = mean * mean;
  double w = mean + mu2 * y / (2.0 * shape) -
             mean / (2.0 * shape) * std::sqrt(4.0 * mean * shape * y + mu2 * y * y);
  if (w <= 0.0) w = std::numeric_limits<double>::min();  // fp round-off guard
  const double draw = uniform() <= mean / (mean + w) ? w : mu2 / w;
  assert(draw > 0.0);
  return draw;
}

double RngHandle::gig_zero(double chi, double psi) {
  require_positive(chi, "GIG chi");
  require_positive(psi, "GIG psi");
  // Rescale to the symmetric form: v = sqrt(chi/psi) * w with
  // w ~ GIG(0, omega, omega), omega = sqrt(chi*psi). In t = log w the
  // density is proportional to exp(-omega*cosh(t)).
  const double omega = std::sqrt(chi) * std::sqrt(psi);
  const double scale = std::sqrt(chi) / std::sqrt(psi);
  double t;
  if (omega >= 1.0) {
    // Gaussian envelope: cosh(t) >= 1 + t^2/2.
    for (;;) {
      t = normal() / std::sqrt(omega);
      const double log_acc = -omega * (std::cosh(t) - 1.0 - 0.5 * t * t);
      if (std::log(uniform()) < log_acc) break;
    }
  } else {
    // Flat center piece plus two exponential tails, tangent at t0.
    const double t0 = std::acosh(1.0 / omega);
    const double r = std::sqrt(1.0 - omega * omega);  // omega*sinh(t0)
    const double mass_center = 2.0 * t0 * std::exp(-omega);
    const double mass_tail = 2.0 * std::exp(-1.0) / r;
    const double total = mass_center + mass_tail;
    for (;;) {
      if (uniform() * total < mass_center) {
        t = (2.0 * uniform() - 1.0) * t0;
        const double log_acc = -omega * (std::cosh(t) - 1.0);
        if (std::log(uniform()) < log_acc) break;
      } else {
        const double sgn = uniform() < 0.5 ? -1.0 : 1.0;
        const double excess = -std::log(uniform()) / r;
        t = t0 + excess;
        const double log_acc = -omega * std::cosh(t) + 1.0 + r * excess;
        if (std::log(uniform()) < log_acc) {
          t *= sgn;
          break;
        }
      }
    }
  }
  double v = scale * std::exp(t);
  if (v <= 0.0) v = std::numeric_limits<double>::min();
  assert(v > 0.0);
  return v;
}

Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& mat) {
  const auto k = mat.rows();
  const double jitter = 1e-10 * mat.trace() / static_cast<double>(k);
  Eigen::MatrixXd work = mat;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    if (attempt == 3) break;
    work.diagonal().array() += jitter;
  }
  throw NotSpdError("matrix not SPD after jitter");
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& mat,
                           MatrixForm form, RngHandle& rng) {
  if (mat.rows() != mat.cols() || mat.rows() != mean.size()) {
    throw DomainError("sample_mvn: dimension mismatch");
  }
  const Eigen::MatrixXd L = cholesky_with_jitter(mat);
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  if (form == MatrixForm::Covariance) {
    return mean + L * z;
  }
  // Precision form: solve L^T x = z, so that Cov(x) = (L L^T)^{-1}.
  return mean + L.transpose().triangularView<Eigen::Upper>().solve(z);
}

}  // namespace bvgm
