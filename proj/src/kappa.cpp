#include "steinmc/kappa.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "steinmc/rational.hpp"

namespace steinmc {

double unit_ball_volume(unsigned m) {
  return std::pow(M_PI, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

namespace {
double factorial(unsigned m) { return std::tgamma(m + 1.0); }
}  // namespace

double kappa_ratio(unsigned j, unsigned m) {
  return factorial(m) * unit_ball_volume(m) /
         (factorial(j) * unit_ball_volume(j));
}

double ball_intrinsic_volume(unsigned d, unsigned j, double r) {
  if (j > d)
    throw std::invalid_argument("ball_intrinsic_volume: j exceeds dimension");
  const double binom = (d <= 64)
                           ? static_cast<double>(binomial_u64(d, j))
                           : std::exp(std::lgamma(d + 1.0) -
                                      std::lgamma(j + 1.0) -
                                      std::lgamma(d - j + 1.0));
  return binom * unit_ball_volume(d) / unit_ball_volume(d - j) *
         std::pow(r, static_cast<double>(j));
}

double wills_functional(unsigned d, std::span<const double> intrinsic_volumes) {
  if (intrinsic_volumes.size() != d + 1)
    throw std::invalid_argument(
        "wills_functional: need d+1 intrinsic volumes");
  double total = 0.0;
  for (unsigned l = 0; l <= d; ++l)
    total += unit_ball_volume(d - l) * intrinsic_volumes[l];
  return total;
}

KappaTable KappaTable::standard(unsigned max_m) {
  KappaTable table;
  table.values.reserve(max_m + 1);
  for (unsigned m = 0; m <= max_m; ++m)
    table.values.push_back(unit_ball_volume(m));
  return table;
}

bool verify_kappa_table(const KappaTable& table, double tol,
                        std::string* failure) {
  // kappa_0 = 1, kappa_1 = 2, kappa_2 = pi, and the recursion
  // kappa_m = 2 pi / m kappa_{m-2} pin the table independently of how it
  // was produced.
  for (std::size_t m = 0; m < table.values.size(); ++m) {
    double expected;
    if (m == 0) {
      expected = 1.0;
    } else if (m == 1) {
      expected = 2.0;
    } else {
      expected = 2.0 * M_PI / static_cast<double>(m) * table.values[m - 2];
    }
    if (std::abs(table.values[m] - expected) > tol) {
      if (failure) {
        std::ostringstream msg;
        msg << "kappa table entry m=" << m << " is " << table.values[m]
            << ", expected " << expected;
        *failure = msg.str();
      }
      return false;
    }
  }
  return true;
}

}  // namespace steinmc
