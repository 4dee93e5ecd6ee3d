#include "steinmc/bounds.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace steinmc {

MatrixNorms matrix_norms(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols())
    throw std::invalid_argument("matrix_norms: matrix must be square");
  MatrixNorms out;
  Eigen::MatrixXd sym = 0.5 * (sigma + sigma.transpose());
  if ((sigma - sym).cwiseAbs().maxCoeff() > 1e-10) out.symmetrized = true;
  out.hs_norm = sym.norm();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  const auto& eigs = solver.eigenvalues();
  out.min_eig = eigs.minCoeff();
  out.op_norm = eigs.cwiseAbs().maxCoeff();
  out.posdef = out.min_eig > 0.0;
  out.inv_op_norm = out.posdef ? 1.0 / out.min_eig : 0.0;
  return out;
}

double GammaEstimates::gamma_max() const {
  double m = sigma_term.value;
  m = std::max(m, gamma1.value);
  m = std::max(m, gamma2.value);
  m = std::max(m, gamma3.value);
  m = std::max(m, gamma4.value);
  return m;
}

double BoundReport::audit_value() const {
  if (theorem == "2.1-nonneg") {
    return breakdown.at("m2_tilde") / 2.0 * breakdown.at("sigma_term") +
           breakdown.at("m3") / 12.0 * breakdown.at("gamma1");
  }
  if (theorem == "2.1-posdef") {
    return std::sqrt(2.0 / M_PI) * breakdown.at("m1") *
               breakdown.at("sigma_inv_opnorm") * breakdown.at("sigma_term") +
           std::sqrt(2.0 * M_PI) / 16.0 * breakdown.at("m2") *
               breakdown.at("sigma_inv_opnorm") * breakdown.at("gamma1");
  }
  if (theorem == "2.2-convex") {
    return 541.0 * std::pow(breakdown.at("d"), 4.0) *
           std::max(1.0, breakdown.at("sigma_inv_opnorm") *
                             breakdown.at("sigma_inv_opnorm")) *
           breakdown.at("gamma_max");
  }
  return bound_value;
}

BoundReport assemble_smooth_bound(const GammaEstimates& gammas,
                                  const SmoothnessBudget& budget,
                                  const Eigen::MatrixXd& sigma, bool posdef) {
  BoundReport report;
  report.sigma = sigma;
  const MatrixNorms norms = matrix_norms(sigma);
  report.sigma_inv_opnorm = norms.inv_op_norm;
  if (!posdef) {
    report.theorem = "2.1-nonneg";
    report.breakdown["m2_tilde"] = budget.m2_tilde;
    report.breakdown["m3"] = budget.m3;
    report.breakdown["sigma_term"] = gammas.sigma_term.value;
    report.breakdown["gamma1"] = gammas.gamma1.value;
    report.bound_value = budget.m2_tilde / 2.0 * gammas.sigma_term.value +
                         budget.m3 / 12.0 * gammas.gamma1.value;
    return report;
  }
  if (!norms.posdef) {
    std::ostringstream msg;
    msg << "assemble_smooth_bound: positive-definite form requested but min "
           "eigenvalue is "
        << norms.min_eig;
    throw std::invalid_argument(msg.str());
  }
  report.theorem = "2.1-posdef";
  report.breakdown["m1"] = budget.m1;
  report.breakdown["m2"] = budget.m2;
  report.breakdown["sigma_inv_opnorm"] = norms.inv_op_norm;
  report.breakdown["sigma_term"] = gammas.sigma_term.value;
  report.breakdown["gamma1"] = gammas.gamma1.value;
  report.bound_value =
      std::sqrt(2.0 / M_PI) * budget.m1 * norms.inv_op_norm *
          gammas.sigma_term.value +
      std::sqrt(2.0 * M_PI) / 16.0 * budget.m2 * norms.inv_op_norm *
          gammas.gamma1.value;
  return report;
}

BoundReport assemble_convex_bound(const GammaEstimates& gammas,
                                  const Eigen::MatrixXd& sigma) {
  const MatrixNorms norms = matrix_norms(sigma);
  if (!norms.posdef) {
    std::ostringstream msg;
    msg << "assemble_convex_bound: sigma must be positive definite (min "
           "eigenvalue "
        << norms.min_eig << ")";
    throw std::invalid_argument(msg.str());
  }
  BoundReport report;
  report.sigma = sigma;
  report.sigma_inv_opnorm = norms.inv_op_norm;
  report.theorem = "2.2-convex";
  const double d = static_cast<double>(sigma.rows());
  const double gamma_max = gammas.gamma_max();
  report.breakdown["d"] = d;
  report.breakdown["sigma_inv_opnorm"] = norms.inv_op_norm;
  report.breakdown["gamma_max"] = gamma_max;
  report.breakdown["argmax_is_sigma_term"] =
      gamma_max == gammas.sigma_term.value ? 1.0 : 0.0;
  report.breakdown["gamma1"] = gammas.gamma1.value;
  report.breakdown["gamma2"] = gammas.gamma2.value;
  report.breakdown["gamma3"] = gammas.gamma3.value;
  report.breakdown["gamma4"] = gammas.gamma4.value;
  report.breakdown["sigma_term"] = gammas.sigma_term.value;
  report.bound_value = 541.0 * std::pow(d, 4.0) *
                       std::max(1.0, norms.inv_op_norm * norms.inv_op_norm) *
                       gamma_max;
  return report;
}

}  // namespace steinmc
