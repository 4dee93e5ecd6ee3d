#include <doctest.h>

#include <cmath>

#include "steinmc/bounds.hpp"

using namespace steinmc;

TEST_CASE("matrix norms") {
  SUBCASE("identity") {
    const MatrixNorms norms = matrix_norms(Eigen::MatrixXd::Identity(3, 3));
    CHECK(norms.hs_norm == doctest::Approx(std::sqrt(3.0)));
    CHECK(norms.op_norm == doctest::Approx(1.0));
    CHECK(norms.min_eig == doctest::Approx(1.0));
    CHECK(norms.inv_op_norm == doctest::Approx(1.0));
    CHECK(norms.posdef);
    CHECK_FALSE(norms.symmetrized);
  }
  SUBCASE("diag(4,1)") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 0) = 4.0;
    m(1, 1) = 1.0;
    const MatrixNorms norms = matrix_norms(m);
    CHECK(norms.op_norm == doctest::Approx(4.0));
    CHECK(norms.inv_op_norm == doctest::Approx(1.0));
    CHECK(norms.hs_norm == doctest::Approx(std::sqrt(17.0)));
  }
  SUBCASE("rank-deficient diag(1,0)") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 0) = 1.0;
    const MatrixNorms norms = matrix_norms(m);
    CHECK_FALSE(norms.posdef);
    CHECK(norms.inv_op_norm == 0.0);
  }
  SUBCASE("asymmetric input is symmetrized and flagged") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.3, 0.1, 1.0;
    CHECK(matrix_norms(m).symmetrized);
  }
  SUBCASE("non-square refused") {
    CHECK_THROWS_AS(matrix_norms(Eigen::MatrixXd::Zero(2, 3)),
                    std::invalid_argument);
  }
}

namespace {
GammaEstimates gammas_with(double g1, double g2, double g3, double g4,
                           double sigma_term) {
  GammaEstimates est;
  est.gamma1.value = g1;
  est.gamma2.value = g2;
  est.gamma3.value = g3;
  est.gamma4.value = g4;
  est.sigma_term.value = sigma_term;
  est.method = "exact";
  return est;
}
}  // namespace

TEST_CASE("smooth bound assembly") {
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
  SUBCASE("zero ingredients give zero") {
    SmoothnessBudget budget{1.0, 1.0, 1.0, 1.0};
    const BoundReport report = assemble_smooth_bound(
        gammas_with(0, 0, 0, 0, 0), budget, sigma, false);
    CHECK(report.bound_value == 0.0);
  }
  SUBCASE("direct arithmetic") {
    SmoothnessBudget budget;
    budget.m2_tilde = 2.0;
    budget.m3 = 12.0;
    const BoundReport report = assemble_smooth_bound(
        gammas_with(1.0, 0, 0, 0, 0.5), budget, sigma, false);
    CHECK(report.bound_value == doctest::Approx(1.5));
    CHECK(report.theorem == "2.1-nonneg");
    CHECK(report.audit_value() == doctest::Approx(report.bound_value)
                                      .epsilon(1e-10));
  }
  SUBCASE("positive-definite form uses the inverse operator norm") {
    SmoothnessBudget budget{1.0, 1.0, 1.0, 1.0};
    Eigen::MatrixXd scaled = 4.0 * sigma;
    const BoundReport report = assemble_smooth_bound(
        gammas_with(1.0, 0, 0, 0, 1.0), budget, scaled, true);
    const double expected = std::sqrt(2.0 / M_PI) * 0.25 +
                            std::sqrt(2.0 * M_PI) / 16.0 * 0.25;
    CHECK(report.bound_value == doctest::Approx(expected));
    CHECK(report.audit_value() ==
          doctest::Approx(report.bound_value).epsilon(1e-10));
  }
  SUBCASE("singular sigma with posdef flag refuses, naming the eigenvalue") {
    SmoothnessBudget budget{1.0, 1.0, 1.0, 1.0};
    Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(2, 2);
    singular(0, 0) = 1.0;
    CHECK_THROWS_WITH_AS(assemble_smooth_bound(gammas_with(1, 0, 0, 0, 1),
                                               budget, singular, true),
                         doctest::Contains("eigenvalue"),
                         std::invalid_argument);
  }
}

TEST_CASE("convex bound assembly") {
  SUBCASE("d=2 direct arithmetic") {
    const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
    const BoundReport report =
        assemble_convex_bound(gammas_with(0.1, 0.02, 0.05, 0.01, 0.0), sigma);
    CHECK(report.bound_value == doctest::Approx(541.0 * 16.0 * 0.1));
    CHECK(report.audit_value() ==
          doctest::Approx(report.bound_value).epsilon(1e-10));
  }
  SUBCASE("all-zero gammas give zero") {
    const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(1, 1);
    const BoundReport report =
        assemble_convex_bound(gammas_with(0, 0, 0, 0, 0), sigma);
    CHECK(report.bound_value == 0.0);
  }
  SUBCASE("singular sigma refused") {
    Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(
        assemble_convex_bound(gammas_with(1, 1, 1, 1, 1), singular),
        std::invalid_argument);
  }
}
