#pragma once

#include <Eigen/Core>
#include <functional>

#include "steinmc/bounds.hpp"
#include "steinmc/coords.hpp"
#include "steinmc/functional.hpp"

namespace steinmc {

// Draws a fresh sample batch (three independent copies) per replicate.
using BatchSampler = std::function<SampleBatch(RngStream&)>;

BatchSampler make_iid_sampler(std::size_t n, std::size_t dim,
                              CoordDraw draw_coord);
BatchSampler make_standard_normal_sampler(std::size_t n, std::size_t dim);
BatchSampler make_uniform_cube_sampler(std::size_t n, std::size_t dim);

struct Gamma12Result {
  ValueWithError gamma1;  // sum_j E||Delta_j f(X)||^3
  ValueWithError gamma2;  // sqrt of sum_j E||Delta_j f(X)||^4
};

// One replicate = fresh (X, X') and a uniform j, scaled by n.
Gamma12Result estimate_gamma12(const Functional& f, const BatchSampler& sampler,
                               std::size_t reps, RngStream rng,
                               unsigned workers = 1);

struct Gamma34Options {
  std::size_t reps_outer = 2000;
  std::size_t reps_inner = 2;  // split into two independent halves
  unsigned workers = 1;
  double zero_tolerance = 0.0;  // indicator zero test; 0 = exact
};

struct Gamma34Result {
  ValueWithError gamma3;
  ValueWithError gamma4;
  // Aggregated inner totals (before the roots), clamped at zero if the
  // unbiased estimate came out negative.
  ValueWithError gamma3_inner;
  ValueWithError gamma4_inner;
};

// Nested estimator: the outer loop draws (X, X', X~) and a uniform i; the
// inner A-sum is estimated twice independently through weighted subset
// draws and the product of the two estimates gives an unbiased estimate of
// the squared sum.
Gamma34Result estimate_gamma34(const Functional& f, const BatchSampler& sampler,
                               const Gamma34Options& opts, RngStream rng);

struct SigmaTermOptions {
  std::size_t reps_outer = 2000;
  std::size_t reps_inner = 2;
  unsigned workers = 1;
};

// sqrt of E||E[T - Sigma | X]||_HS^2 via paired inner T estimates with
// fresh X' per inner draw.
ValueWithError estimate_sigma_term(const Functional& f,
                                   const Eigen::MatrixXd& sigma,
                                   const BatchSampler& sampler,
                                   const SigmaTermOptions& opts,
                                   RngStream rng);

// Convenience bundle for report assembly.
struct GammaEstimationPlan {
  std::size_t reps12 = 20000;
  Gamma34Options g34;
  SigmaTermOptions sigma_term;
};

GammaEstimates estimate_all_gammas(const Functional& f,
                                   const Eigen::MatrixXd& sigma,
                                   const BatchSampler& sampler,
                                   const GammaEstimationPlan& plan,
                                   RngStream rng);

}  // namespace steinmc
