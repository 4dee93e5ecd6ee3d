#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "steinmc/rng.hpp"

namespace steinmc {

// Coefficients P_{i,s}(d) (0 <= i <= s <= d) for grains of radius r;
// entries below the diagonal are zero.
Eigen::MatrixXd p_coefficients(unsigned d, double r);

// Series-side coefficient P~_{s,l,i}(d) built from compositions of
// l d - s + i into l parts between 0 and d.
double p_tilde(unsigned d, double r, unsigned s, unsigned l, unsigned i);

// Residual of the alternating-series identity
//   sum_{l>=1} (-1)^{l-1}/l! sum_s P~_{s,l,i} V_s(L) - V_i(L)
//     = - sum_s V_s(L) P_{i,s}(d)
// at the given depth, for a body L described by its intrinsic volumes.
double pp_identity_residual(unsigned d, double r,
                            std::span<const double> body_intrinsics,
                            unsigned i, unsigned depth);

// (V_0, ..., V_d) of K cap (K + x_2) cap ... for a ball K of radius r;
// offsets holds the (k-1) translation vectors flattened row-major.
Eigen::VectorXd intersection_intrinsic_volumes(unsigned d, double r,
                                               std::span<const double> offsets);

struct SigmaSeriesOptions {
  std::size_t k_max = 12;
  std::size_t mc_samples = 200000;
  double eps_rel = 1e-3;  // truncation: stop once a term falls below this
                          // fraction of the running total (max entry)
  bool quasi = false;     // Halton offsets instead of pseudo-random
  unsigned workers = 1;
  // Replaces the built-in d in {1,2} geometry; lets callers evaluate the
  // series in higher dimensions with their own intersection volumes.
  std::function<Eigen::VectorXd(unsigned d, double r,
                                std::span<const double> offsets)>
      intersection_volumes;
};

struct SigmaSeries {
  Eigen::MatrixXd sigma;       // (d+1) x (d+1)
  Eigen::MatrixXd std_error;   // entrywise MC error
  std::vector<double> term_max;  // max |entry| of each evaluated k-term
  std::size_t k_used = 0;      // highest k evaluated
  std::size_t mc_samples = 0;
  std::uint64_t seed = 0;
  bool decayed = true;  // false if terms had not started decaying at k_max
};

// Evaluates the limiting covariance series: for each k >= 2, Monte-Carlo
// integration of the product integrand over offsets restricted to the ball
// of radius 2r per coordinate (the intersection is empty beyond), with the
// analytic volume factor.
SigmaSeries sigma_series(unsigned d, double r, const SigmaSeriesOptions& opts,
                         RngStream rng);

struct CovarianceGap {
  Eigen::MatrixXd entrywise;
  double max_entry = 0.0;
};

CovarianceGap covariance_gap(const Eigen::MatrixXd& sigma_n,
                             const Eigen::MatrixXd& sigma);

// Base-b van der Corput radical inverse; haltons share one index.
double radical_inverse(std::uint64_t index, unsigned base);

}  // namespace steinmc
