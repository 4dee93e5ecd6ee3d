#pragma once

#include <span>
#include <string>
#include <vector>

namespace steinmc {

// Volume of the m-dimensional unit ball.
double unit_ball_volume(unsigned m);

// c_j^m = m! kappa_m / (j! kappa_j).
double kappa_ratio(unsigned j, unsigned m);

// j-th intrinsic volume of a d-ball of radius r:
//   V_j(B_r) = C(d,j) kappa_d / kappa_{d-j} r^j.
double ball_intrinsic_volume(unsigned d, unsigned j, double r);

// Wills functional of a convex body given its intrinsic volumes:
//   sum_l kappa_{d-l} V_l.
double wills_functional(unsigned d, std::span<const double> intrinsic_volumes);

// Table of kappa_m values (testable/injectable for selftest fault paths).
struct KappaTable {
  std::vector<double> values;  // values[m] = kappa_m
  static KappaTable standard(unsigned max_m);
};

// Checks the table against the Gamma-function closed form; on failure
// fills `failure` with the offending index.
bool verify_kappa_table(const KappaTable& table, double tol,
                        std::string* failure);

}  // namespace steinmc
