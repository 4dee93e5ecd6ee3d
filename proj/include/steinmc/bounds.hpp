#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>

namespace steinmc {

struct MatrixNorms {
  double hs_norm = 0.0;
  double op_norm = 0.0;
  double min_eig = 0.0;
  double inv_op_norm = 0.0;  // 1/min_eig when positive definite
  bool posdef = false;
  bool symmetrized = false;  // input was not symmetric within tolerance
};

// Spectral-decomposition norms of a (near-)symmetric matrix.  Inputs that
// are asymmetric beyond 1e-10 are symmetrized and flagged.
MatrixNorms matrix_norms(const Eigen::MatrixXd& sigma);

// Supremum operator norms of the test-function derivatives.
struct SmoothnessBudget {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m2_tilde = 0.0;  // sup Hessian Hilbert-Schmidt norm
};

// A Monte-Carlo estimate with its standard error.
struct ValueWithError {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
  bool clamped = false;  // negative unbiased inner estimate clamped to 0
};

struct GammaEstimates {
  ValueWithError gamma1;
  ValueWithError gamma2;
  ValueWithError gamma3;
  ValueWithError gamma4;
  ValueWithError sigma_term;  // sqrt E||E[T - Sigma | X]||_HS^2
  std::string method;         // exact | nested-mc | symmetric-lemma
  std::uint64_t seed = 0;

  double gamma_max() const;
};

// Assembled right-hand side with enough breakdown to re-derive the value.
struct BoundReport {
  double bound_value = 0.0;
  std::string theorem;  // 2.1-nonneg | 2.1-posdef | 2.2-convex | ...
  std::map<std::string, double> breakdown;
  Eigen::MatrixXd sigma;
  double sigma_inv_opnorm = 0.0;

  // Re-multiplies the breakdown; the result must match bound_value.
  double audit_value() const;
};

// Smooth-test-function bounds.  With posdef unset this is
//   m2_tilde/2 * sigma_term + m3/12 * gamma1;
// with posdef set (requires min eigenvalue > 0) it is
//   sqrt(2/pi) m1 |Sigma^-1|_op sigma_term
//   + sqrt(2 pi)/16 m2 |Sigma^-1|_op gamma1.
BoundReport assemble_smooth_bound(const GammaEstimates& gammas,
                                  const SmoothnessBudget& budget,
                                  const Eigen::MatrixXd& sigma, bool posdef);

// Convex-distance bound:
//   541 d^4 max{1, |Sigma^-1|_op^2} max{sigma_term, gamma1..gamma4}.
BoundReport assemble_convex_bound(const GammaEstimates& gammas,
                                  const Eigen::MatrixXd& sigma);

}  // namespace steinmc
