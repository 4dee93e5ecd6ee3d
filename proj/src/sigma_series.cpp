#include "steinmc/sigma_series.hpp"

#include <cmath>
#include <stdexcept>

#include "steinmc/geometry.hpp"
#include "steinmc/kappa.hpp"
#include "steinmc/parallel.hpp"

namespace steinmc {

namespace {

double factorial(unsigned m) { return std::tgamma(m + 1.0); }

// Coefficient extraction for sums over compositions: the inner sums of the
// P coefficients are powers of a polynomial whose r-th coefficient is
// r! kappa_r / (d! kappa_d) V_r(K).
std::vector<double> base_polynomial(unsigned d, double r, unsigned lo,
                                    unsigned hi) {
  std::vector<double> poly(hi + 1, 0.0);
  const double denom = factorial(d) * unit_ball_volume(d);
  for (unsigned m = lo; m <= hi; ++m)
    poly[m] = factorial(m) * unit_ball_volume(m) / denom *
              ball_intrinsic_volume(d, m, r);
  return poly;
}

std::vector<double> poly_multiply(const std::vector<double>& a,
                                  const std::vector<double>& b,
                                  std::size_t degree_cap) {
  std::vector<double> out(std::min(a.size() + b.size() - 1, degree_cap + 1),
                          0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < out.size(); ++j)
      out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<double> poly_power(const std::vector<double>& base, unsigned power,
                               std::size_t degree_cap) {
  std::vector<double> out{1.0};
  for (unsigned t = 0; t < power; ++t)
    out = poly_multiply(out, base, degree_cap);
  return out;
}

double coefficient(const std::vector<double>& poly, long degree) {
  if (degree < 0 || degree >= static_cast<long>(poly.size())) return 0.0;
  return poly[static_cast<std::size_t>(degree)];
}

}  // namespace

Eigen::MatrixXd p_coefficients(unsigned d, double r) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(d + 1, d + 1);
  const double damp = std::exp(-ball_intrinsic_volume(d, d, r));
  p(d, d) = damp;
  for (unsigned i = 0; i < d; ++i) {
    // Composition parts are restricted to [i, d-1].
    const std::vector<double> base =
        d >= 1 ? base_polynomial(d, r, i, d - 1) : std::vector<double>{};
    for (unsigned s = i; s <= d; ++s) {
      double sum = (s == i) ? 1.0 : 0.0;
      const double ratio = kappa_ratio(i, s);
      double sign = -1.0;
      for (unsigned t = 1; t <= s - i; ++t, sign = -sign) {
        const long degree = static_cast<long>(t) * d +
                            static_cast<long>(i) - static_cast<long>(s);
        const std::vector<double> powed =
            poly_power(base, t, static_cast<std::size_t>(t) * d);
        sum += ratio * sign / factorial(t) * coefficient(powed, degree);
      }
      p(i, s) = damp * sum;
    }
  }
  return p;
}

double p_tilde(unsigned d, double r, unsigned s, unsigned l, unsigned i) {
  const std::vector<double> base = base_polynomial(d, r, 0, d);
  const long degree = static_cast<long>(l) * d - static_cast<long>(s) +
                      static_cast<long>(i);
  const std::vector<double> powed =
      poly_power(base, l, static_cast<std::size_t>(l) * d);
  return kappa_ratio(i, s) * coefficient(powed, degree);
}

double pp_identity_residual(unsigned d, double r,
                            std::span<const double> body_intrinsics,
                            unsigned i, unsigned depth) {
  if (body_intrinsics.size() != d + 1)
    throw std::invalid_argument(
        "pp_identity_residual: need d+1 body intrinsic volumes");
  double lhs = -body_intrinsics[i];
  double sign = 1.0;
  for (unsigned l = 1; l <= depth; ++l, sign = -sign) {
    double inner = 0.0;
    for (unsigned s = i; s <= d; ++s)
      inner += p_tilde(d, r, s, l, i) * body_intrinsics[s];
    lhs += sign / factorial(l) * inner;
  }
  const Eigen::MatrixXd p = p_coefficients(d, r);
  double rhs = 0.0;
  for (unsigned s = i; s <= d; ++s) rhs -= body_intrinsics[s] * p(i, s);
  return std::abs(lhs - rhs);
}

Eigen::VectorXd intersection_intrinsic_volumes(unsigned d, double r,
                                               std::span<const double> offsets) {
  if (offsets.size() % d != 0)
    throw std::invalid_argument(
        "intersection_intrinsic_volumes: offsets not a multiple of d");
  const std::size_t extra = offsets.size() / d;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d + 1);
  if (d == 1) {
    double lo = -r, hi = r;
    for (std::size_t m = 0; m < extra; ++m) {
      lo = std::max(lo, offsets[m] - r);
      hi = std::min(hi, offsets[m] + r);
    }
    if (hi > lo) {
      v[0] = 1.0;
      v[1] = hi - lo;
    }
    return v;
  }
  if (d == 2) {
    std::vector<double> xs(extra + 1, 0.0), ys(extra + 1, 0.0);
    for (std::size_t m = 0; m < extra; ++m) {
      xs[m + 1] = offsets[2 * m];
      ys[m + 1] = offsets[2 * m + 1];
    }
    const DiscIntersection isect = disc_intersection(xs, ys, r);
    if (!isect.empty) {
      v[0] = 1.0;
      v[1] = 0.5 * isect.perimeter;
      v[2] = isect.area;
    }
    return v;
  }
  throw std::invalid_argument(
      "intersection_intrinsic_volumes: geometry kernels cover d in {1,2}");
}

double radical_inverse(std::uint64_t index, unsigned base) {
  double result = 0.0;
  double digit_value = 1.0 / base;
  while (index > 0) {
    result += static_cast<double>(index % base) * digit_value;
    index /= base;
    digit_value /= base;
  }
  return result;
}

namespace {

constexpr unsigned kHaltonPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                      23, 29, 31, 37, 41, 43, 47, 53,
                                      59, 61, 67, 71, 73, 79, 83, 89};

// Uniform point in the d-ball of radius rho from uniforms in [0,1)^d
// (d <= 2); higher dimensions fall back to rejection from the cube.
void ball_point(unsigned d, double rho, std::span<const double> u,
                std::span<double> out) {
  if (d == 1) {
    out[0] = rho * (2.0 * u[0] - 1.0);
    return;
  }
  const double rad = rho * std::sqrt(u[0]);
  const double ang = 2.0 * M_PI * u[1];
  out[0] = rad * std::cos(ang);
  out[1] = rad * std::sin(ang);
}

void ball_point_rejection(unsigned d, double rho, RngStream& stream,
                          std::span<double> out) {
  for (;;) {
    double norm_sq = 0.0;
    for (unsigned c = 0; c < d; ++c) {
      out[c] = rho * (2.0 * stream.uniform() - 1.0);
      norm_sq += out[c] * out[c];
    }
    if (norm_sq <= rho * rho) return;
  }
}

}  // namespace

SigmaSeries sigma_series(unsigned d, double r, const SigmaSeriesOptions& opts,
                         RngStream rng) {
  if (opts.k_max < 2)
    throw std::invalid_argument("sigma_series: k_max must be >= 2");
  if (opts.mc_samples == 0)
    throw std::invalid_argument("sigma_series: mc_samples must be positive");
  if (d != 1 && d != 2 && !opts.intersection_volumes)
    throw std::invalid_argument(
        "sigma_series: built-in geometry covers d in {1,2}; supply "
        "intersection_volumes for higher dimensions");

  const unsigned dim = d + 1;
  const Eigen::MatrixXd p = p_coefficients(d, r);
  const double domain_volume =
      unit_ball_volume(d) * std::pow(2.0 * r, static_cast<double>(d));

  SigmaSeries out;
  out.sigma = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd variance_acc = Eigen::MatrixXd::Zero(dim, dim);
  out.seed = rng.master_seed();
  out.mc_samples = opts.mc_samples;

  double running_max = 0.0;
  for (std::size_t k = 2; k <= opts.k_max; ++k) {
    const std::size_t n_offsets = k - 1;
    const double vol_factor =
        std::pow(domain_volume, static_cast<double>(n_offsets));
    const double k_factorial = factorial(static_cast<unsigned>(k));

    const std::size_t samples = opts.mc_samples;
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(dim, dim);
    RngStream stream = rng.substream(k);
    std::vector<double> uniforms(n_offsets * d);
    std::vector<double> offsets(n_offsets * d);
    for (std::size_t s = 0; s < samples; ++s) {
      if (d > 2) {
        if (opts.quasi)
          throw std::invalid_argument(
              "sigma_series: quasi-random offsets cover d in {1,2}");
        for (std::size_t m = 0; m < n_offsets; ++m)
          ball_point_rejection(d, 2.0 * r, stream,
                               std::span<double>(offsets).subspan(m * d, d));
      } else {
        if (opts.quasi) {
          for (std::size_t c = 0; c < uniforms.size(); ++c)
            uniforms[c] = radical_inverse(s + 1, kHaltonPrimes[c % 24]);
        } else {
          for (double& u : uniforms) u = stream.uniform();
        }
        for (std::size_t m = 0; m < n_offsets; ++m)
          ball_point(d, 2.0 * r,
                     std::span<const double>(uniforms).subspan(m * d, d),
                     std::span<double>(offsets).subspan(m * d, d));
      }
      const Eigen::VectorXd v =
          opts.intersection_volumes
              ? opts.intersection_volumes(d, r, offsets)
              : intersection_intrinsic_volumes(d, r, offsets);
      // Project once: u_i = sum_s P_{i,s} V_s, then the term integrand is
      // u_i u_j.
      Eigen::VectorXd proj = Eigen::VectorXd::Zero(dim);
      for (unsigned i = 0; i < dim; ++i)
        for (unsigned sv = i; sv < dim; ++sv) proj[i] += p(i, sv) * v[sv];
      const Eigen::MatrixXd outer = proj * proj.transpose();
      mean += outer;
      second += outer.cwiseProduct(outer);
    }
    mean /= static_cast<double>(samples);
    second /= static_cast<double>(samples);
    const double scale = vol_factor / k_factorial;
    const Eigen::MatrixXd term = scale * mean;
    const Eigen::MatrixXd term_var =
        (second - mean.cwiseProduct(mean)) / static_cast<double>(samples);
    out.sigma += term;
    variance_acc += (scale * scale) * term_var.cwiseMax(0.0);
    const double tmax = term.cwiseAbs().maxCoeff();
    out.term_max.push_back(tmax);
    out.k_used = k;
    running_max = std::max(running_max, out.sigma.cwiseAbs().maxCoeff());
    if (k > 2 && tmax < opts.eps_rel * running_max) break;
  }
  // Decay check: terms past the onset must not grow.
  for (std::size_t t = 2; t < out.term_max.size(); ++t)
    if (out.term_max[t] > out.term_max[t - 1] * 1.5) out.decayed = false;
  out.std_error = variance_acc.cwiseSqrt();
  return out;
}

CovarianceGap covariance_gap(const Eigen::MatrixXd& sigma_n,
                             const Eigen::MatrixXd& sigma) {
  if (sigma_n.rows() != sigma.rows() || sigma_n.cols() != sigma.cols())
    throw std::invalid_argument("covariance_gap: dimension mismatch");
  CovarianceGap gap;
  gap.entrywise = (sigma_n - sigma).cwiseAbs();
  gap.max_entry = gap.entrywise.maxCoeff();
  return gap;
}

}  // namespace steinmc
