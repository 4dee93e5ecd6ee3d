#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "steinmc/bounds.hpp"
#include "steinmc/rng.hpp"

namespace steinmc {

// Centered Gaussian target with a spectral symmetric square root;
// rank-deficient covariances are supported (tiny negative eigenvalues are
// clamped to zero).
struct GaussianTarget {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd sqrt_sigma;

  explicit GaussianTarget(const Eigen::MatrixXd& covariance);
  int dim() const { return static_cast<int>(sigma.rows()); }
};

// count x d samples, rows = sqrt_sigma * standard normal vectors.
Eigen::MatrixXd sample_gaussian(const GaussianTarget& target,
                                std::size_t count, RngStream& rng);

enum class TestClassKind { half_spaces, axis_rectangles, centered_balls };

// Finite family of convex sets used as a computable stand-in for the full
// convex class; the resulting distance value is a lower bound.
struct TestClass {
  TestClassKind kind = TestClassKind::half_spaces;
  // half-spaces {x : <u, x> <= t}: directions x thresholds
  std::vector<Eigen::VectorXd> directions;
  std::vector<double> thresholds;  // in units of the per-direction sigma
  // axis rectangles: lower-orthant corners on a per-axis grid
  std::vector<double> corner_grid;  // in units of the per-axis sigma
  // centered balls
  std::vector<double> radii;

  std::size_t size(int dim) const;
};

TestClass default_half_spaces(int dim, std::size_t n_directions = 64,
                              std::size_t n_thresholds = 256,
                              std::uint64_t seed = 0x501f);
TestClass default_rectangles(int dim, std::size_t corners_per_axis = 16);

struct ProxyDistance {
  double value = 0.0;
  std::size_t class_size = 0;
  double gaussian_mc_stderr = 0.0;  // nonzero when member probabilities
                                    // needed Monte-Carlo integration
  std::string argmax;
};

// max over class members of |empirical P(W in C) - P(N_Sigma in C)|.
// Half-space (and diagonal-covariance rectangle) probabilities are exact
// through the normal CDF; everything else falls back to Gaussian MC with
// the error recorded.
ProxyDistance proxy_convex_distance(const Eigen::MatrixXd& samples_w,
                                    const GaussianTarget& target,
                                    const TestClass& test_class,
                                    std::size_t gaussian_mc_samples = 200000,
                                    std::uint64_t gaussian_mc_seed = 0x1ceb);

// Radial test function F(x) = exp(-||x||^2 / (2 s^2)) with certified
// derivative budgets.
struct SmoothTestFunction {
  double width = 1.0;
  SmoothnessBudget budget;
  int dim = 1;

  double operator()(const Eigen::VectorXd& x) const;
};

SmoothTestFunction make_gaussian_bump(int dim, double width);

struct SmoothDiscrepancy {
  double value = 0.0;       // |mean F(W) - mean F(N)|
  double std_error = 0.0;   // pooled two-sample error
};

SmoothDiscrepancy smooth_discrepancy(const Eigen::MatrixXd& samples_w,
                                     const GaussianTarget& target,
                                     const SmoothTestFunction& f,
                                     std::size_t gaussian_samples,
                                     RngStream rng);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;  // normal-theory 95% half-width on the slope
};

// Least squares of log(value) on log(n).
RateFit rate_fit(const std::vector<std::pair<double, double>>& pairs);

}  // namespace steinmc
