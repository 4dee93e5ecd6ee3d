#include "steinmc/normal_cdf.hpp"

#include <cmath>

namespace steinmc {

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double normal_cdf(double x) {
  // Abramowitz & Stegun 26.2.17 with p = 0.2316419 and
  // b = (0.319381530, -0.356563782, 1.781477937, -1.821255978, 1.330274429);
  // |error| < 7.5e-8 on x >= 0, extended by symmetry.
  const double ax = std::abs(x);
  const double t = 1.0 / (1.0 + 0.2316419 * ax);
  const double poly =
      t * (0.319381530 +
           t * (-0.356563782 +
                t * (1.781477937 + t * (-1.821255978 + t * 1.330274429))));
  const double tail = normal_pdf(ax) * poly;
  return x >= 0.0 ? 1.0 - tail : tail;
}

}  // namespace steinmc
