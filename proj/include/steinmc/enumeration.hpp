#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "steinmc/functional.hpp"

namespace steinmc {

// Discrete coordinate law with finite support; the enumeration oracles
// below integrate exactly against law^n (and its independent copies).
struct FiniteLaw {
  std::vector<std::vector<double>> support;  // points of equal dimension
  std::vector<double> probs;                 // same length, sums to 1

  std::size_t dim() const {
    return support.empty() ? 0 : support.front().size();
  }
  std::size_t size() const { return support.size(); }

  static FiniteLaw uniform_scalar(std::vector<double> values);
  static FiniteLaw bernoulli(double p = 0.5);
};

struct EnumerationCaps {
  std::size_t n_cap = 4;
  std::size_t support_cap = 3;
};

// Everything in this module evaluates functionals on explicitly
// materialized coordinate vectors; none of it goes through the view or
// delta machinery it is used to check.

struct LemmaDecomposition {
  double lhs = 0.0;  // Cov(g(X), h(X)) by enumeration of X
  double rhs = 0.0;  // (1/2) sum_A k_{n,A} sum_j E[Delta_j g(X) Delta_j h(X^A)]
};

LemmaDecomposition lemma_covariance_decomposition(
    const Functional& g, const Functional& h, const FiniteLaw& law,
    std::size_t n, const EnumerationCaps& caps = {});

// Covariance matrix of W = f(X).
Eigen::MatrixXd exact_covariance_matrix(const Functional& f,
                                        const FiniteLaw& law, std::size_t n,
                                        const EnumerationCaps& caps = {});

// E[T] with T the full weighted subset sum, by enumeration of (X, X').
Eigen::MatrixXd exact_expected_t(const Functional& f, const FiniteLaw& law,
                                 std::size_t n,
                                 const EnumerationCaps& caps = {});

// Exact T for a fixed batch (full subset sum, no sampling).
Eigen::MatrixXd exact_t_for_batch(const Functional& f,
                                  const SampleBatch& batch);

// Exact bound ingredients on an enumerable instance.
struct ExactGammaIngredients {
  double gamma1 = 0.0;                    // sum_j E||Delta_j f||^3
  double gamma2_sq = 0.0;                 // sum_j E||Delta_j f||^4
  std::array<double, 4> gamma3_groups{};  // inner totals, no coefficients
  std::array<double, 4> gamma4_groups{};
  double gamma3 = 0.0;
  double gamma4 = 0.0;
  double sigma_term_sq = 0.0;  // E||E[T|X] - Sigma||_HS^2 with Sigma = Cov(W)
};

ExactGammaIngredients exact_gamma_ingredients(const Functional& f,
                                              const FiniteLaw& law,
                                              std::size_t n,
                                              const EnumerationCaps& caps = {});

// E||E[T|X] - sigma||_HS^2 for a caller-supplied sigma.
double exact_sigma_term_sq(const Functional& f, const Eigen::MatrixXd& sigma,
                           const FiniteLaw& law, std::size_t n,
                           const EnumerationCaps& caps = {});

// E||Delta_1 f(X)||^4 by enumeration.
double exact_delta1_fourth(const Functional& f, const FiniteLaw& law,
                           std::size_t n, const EnumerationCaps& caps = {});

}  // namespace steinmc
