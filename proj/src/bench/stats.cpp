#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "vlasteer/bench.hpp"
#include "vlasteer/error.hpp"

namespace vlasteer {
namespace {

double z_for(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw InvalidArgument("confidence must be in (0,1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
}

}  // namespace

std::pair<double, double> wilson_interval(int successes, int trials, double confidence) {
  if (trials < 1 || successes < 0 || successes > trials)
    throw InvalidArgument("wilson_interval: need 0 <= successes <= trials and trials >= 1");
  const double z = z_for(confidence);
  const double n = trials;
  const double p = successes / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  double lo = centre - half;
  double hi = centre + half;
  if (successes == 0) lo = 0.0;
  if (successes == trials) hi = 1.0;
  return {std::max(0.0, lo), std::min(1.0, hi)};
}

std::pair<double, double> difference_interval(int s1, int n1, int s2, int n2, double confidence) {
  const auto [l1, u1] = wilson_interval(s1, n1, confidence);
  const auto [l2, u2] = wilson_interval(s2, n2, confidence);
  const double p1 = static_cast<double>(s1) / n1;
  const double p2 = static_cast<double>(s2) / n2;
  const double d = p1 - p2;
  return {d - std::hypot(p1 - l1, u2 - p2), d + std::hypot(u1 - p1, p2 - l2)};
}

}  // namespace vlasteer
