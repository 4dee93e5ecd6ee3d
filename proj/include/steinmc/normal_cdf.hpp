#pragma once

namespace steinmc {

// Standard normal CDF via the Hastings rational approximation
// (Abramowitz & Stegun 26.2.17), |error| < 7.5e-8.
double normal_cdf(double x);

// Standard normal density.
double normal_pdf(double x);

}  // namespace steinmc
