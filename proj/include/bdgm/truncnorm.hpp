#ifndef BDGM_TRUNCNORM_HPP
#define BDGM_TRUNCNORM_HPP

#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>

#include "bdgm/error.hpp"
#include "bdgm/rng.hpp"

namespace bdgm {

inline constexpr double kTailCutoff = 5.0;

namespace detail {

inline const boost::math::normal_distribution<double>& unit_normal() {
  static const boost::math::normal_distribution<double> n(0.0, 1.0);
  return n;
}

inline double upper_tail(double x) { return boost::math::cdf(boost::math::complement(unit_normal(), x)); }

/// Standard normal restricted to [a, b] with a > 0, by exponential
/// proposals (or uniform ones when the interval is short).
inline double positive_tail_draw(double a, double b, Rng& rng) {
  const double width = b - a;
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  if (std::isfinite(b) && width < 1.0 / lambda) {
    for (;;) {
      const double z = a + width * uniform01(rng);
      if (std::log(uniform01(rng)) <= 0.5 * (a * a - z * z)) return z;
    }
  }
  for (;;) {
    const double z = a + exponential(rng, lambda);
    if (z > b) continue;
    const double d = z - lambda;
    if (std::log(uniform01(rng)) <= -0.5 * d * d) return z;
  }
}

/// Standard normal restricted to [a, b] by inverse CDF; picks the tail that
/// keeps the probabilities away from 1.
inline double inverse_cdf_draw(double a, double b, Rng& rng) {
  const auto& n = unit_normal();
  if (a > 0.0) {
    const double qa = upper_tail(a);
    const double qb = std::isfinite(b) ? upper_tail(b) : 0.0;
    const double u = qb + uniform01(rng) * (qa - qb);
    if (u <= 0.0 || u >= 1.0) return std::numeric_limits<double>::quiet_NaN();
    return -boost::math::quantile(n, u);
  }
  const double pa = std::isfinite(a) ? boost::math::cdf(n, a) : 0.0;
  const double pb = std::isfinite(b) ? boost::math::cdf(n, b) : 1.0;
  const double u = pa + uniform01(rng) * (pb - pa);
  if (u <= 0.0 || u >= 1.0) return std::numeric_limits<double>::quiet_NaN();
  return boost::math::quantile(n, u);
}

inline double standard_draw(double a, double b, Rng& rng) {
  if (a >= kTailCutoff) return positive_tail_draw(a, b, rng);
  if (b <= -kTailCutoff) return -positive_tail_draw(-b, -a, rng);
  return inverse_cdf_draw(a, b, rng);
}

}  // namespace detail

/// Draw from N(mean, sd^2) restricted to the open interval (lower, upper);
/// either bound may be infinite.
inline double truncated_normal(double mean, double sd, double lower, double upper, Rng& rng) {
  if (!(sd > 0.0) || !std::isfinite(mean)) throw NumericalError("truncated normal needs finite mean and sd > 0");
  if (!(lower < upper)) throw NumericalError("truncated normal interval is empty");
  const double a = (lower - mean) / sd;
  const double b = (upper - mean) / sd;
  constexpr int kAttempts = 10;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const double z = mean + sd * detail::standard_draw(a, b, rng);
    if (z > lower && z < upper) return z;
  }
  // Interval narrower than the rounding of the draw: take the midpoint when
  // it still lies strictly inside.
  const double mid = lower + 0.5 * (upper - lower);
  if (std::isfinite(mid) && mid > lower && mid < upper) return mid;
  throw NumericalError("truncated normal interval has zero numerical width");
}

}  // namespace bdgm

#endif  // BDGM_TRUNCNORM_HPP
