#include "steinmc/distance.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "steinmc/normal_cdf.hpp"

namespace steinmc {

GaussianTarget::GaussianTarget(const Eigen::MatrixXd& covariance) {
  if (covariance.rows() != covariance.cols())
    throw std::invalid_argument("GaussianTarget: covariance must be square");
  sigma = 0.5 * (covariance + covariance.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma);
  Eigen::VectorXd eigs = solver.eigenvalues().cwiseMax(0.0);
  sqrt_sigma = solver.eigenvectors() * eigs.cwiseSqrt().asDiagonal() *
               solver.eigenvectors().transpose();
}

Eigen::MatrixXd sample_gaussian(const GaussianTarget& target,
                                std::size_t count, RngStream& rng) {
  if (count == 0)
    throw std::invalid_argument("sample_gaussian: count must be >= 1");
  const int d = target.dim();
  Eigen::MatrixXd out(count, d);
  Eigen::VectorXd z(d);
  for (std::size_t i = 0; i < count; ++i) {
    for (int c = 0; c < d; ++c) z[c] = rng.normal();
    out.row(i) = (target.sqrt_sigma * z).transpose();
  }
  return out;
}

std::size_t TestClass::size(int dim) const {
  switch (kind) {
    case TestClassKind::half_spaces:
      return directions.size() * thresholds.size();
    case TestClassKind::axis_rectangles: {
      std::size_t total = 1;
      for (int c = 0; c < dim; ++c) total *= corner_grid.size();
      return total;
    }
    default:
      return radii.size();
  }
}

TestClass default_half_spaces(int dim, std::size_t n_directions,
                              std::size_t n_thresholds, std::uint64_t seed) {
  TestClass out;
  out.kind = TestClassKind::half_spaces;
  if (dim == 1) {
    Eigen::VectorXd u(1);
    u << 1.0;
    out.directions.push_back(u);
  } else if (dim == 2) {
    for (std::size_t i = 0; i < n_directions; ++i) {
      const double a = M_PI * static_cast<double>(i) /
                       static_cast<double>(n_directions);
      Eigen::VectorXd u(2);
      u << std::cos(a), std::sin(a);
      out.directions.push_back(u);
    }
  } else {
    RngStream rng(seed, 0);
    while (out.directions.size() < n_directions) {
      Eigen::VectorXd u(dim);
      for (int c = 0; c < dim; ++c) u[c] = rng.normal();
      const double norm = u.norm();
      if (norm > 1e-12) out.directions.push_back(u / norm);
    }
  }
  // Symmetric threshold grid in per-direction sigma units.
  for (std::size_t t = 0; t < n_thresholds; ++t) {
    const double q = -4.0 + 8.0 * (static_cast<double>(t) + 0.5) /
                                static_cast<double>(n_thresholds);
    out.thresholds.push_back(q);
  }
  return out;
}

TestClass default_rectangles(int dim, std::size_t corners_per_axis) {
  if (dim > 3)
    throw std::invalid_argument(
        "default_rectangles: corner grids are limited to d <= 3");
  TestClass out;
  out.kind = TestClassKind::axis_rectangles;
  for (std::size_t t = 0; t < corners_per_axis; ++t) {
    const double q = -4.0 + 8.0 * (static_cast<double>(t) + 0.5) /
                                static_cast<double>(corners_per_axis);
    out.corner_grid.push_back(q);
  }
  return out;
}

namespace {

double empirical_leq(const std::vector<double>& sorted, double threshold) {
  const auto it =
      std::upper_bound(sorted.begin(), sorted.end(), threshold);
  return static_cast<double>(it - sorted.begin()) /
         static_cast<double>(sorted.size());
}

}  // namespace

ProxyDistance proxy_convex_distance(const Eigen::MatrixXd& samples_w,
                                    const GaussianTarget& target,
                                    const TestClass& test_class,
                                    std::size_t gaussian_mc_samples,
                                    std::uint64_t gaussian_mc_seed) {
  const std::size_t count = samples_w.rows();
  if (count == 0)
    throw std::invalid_argument("proxy_convex_distance: no samples");
  const int d = target.dim();
  if (samples_w.cols() != d)
    throw std::invalid_argument("proxy_convex_distance: dimension mismatch");
  if (test_class.size(d) == 0)
    throw std::invalid_argument("proxy_convex_distance: empty class");

  ProxyDistance out;
  out.class_size = test_class.size(d);

  if (test_class.kind == TestClassKind::half_spaces) {
    std::vector<double> projected(count);
    for (const auto& u : test_class.directions) {
      const Eigen::VectorXd proj = samples_w * u;
      for (std::size_t i = 0; i < count; ++i) projected[i] = proj[i];
      std::sort(projected.begin(), projected.end());
      const double sigma_dir =
          std::sqrt(std::max(0.0, u.dot(target.sigma * u)));
      for (double q : test_class.thresholds) {
        const double threshold = q * (sigma_dir > 0.0 ? sigma_dir : 1.0);
        const double gauss = sigma_dir > 0.0
                                 ? normal_cdf(threshold / sigma_dir)
                                 : (threshold >= 0.0 ? 1.0 : 0.0);
        const double diff =
            std::abs(empirical_leq(projected, threshold) - gauss);
        if (diff > out.value) {
          out.value = diff;
          std::ostringstream label;
          label << "halfspace(u=" << u.transpose() << ", t=" << threshold
                << ")";
          out.argmax = label.str();
        }
      }
    }
    return out;
  }

  if (test_class.kind == TestClassKind::axis_rectangles) {
    const bool diagonal =
        (target.sigma -
         Eigen::MatrixXd(target.sigma.diagonal().asDiagonal()))
            .cwiseAbs()
            .maxCoeff() < 1e-12;
    Eigen::VectorXd axis_sigma =
        target.sigma.diagonal().cwiseMax(0.0).cwiseSqrt();
    // Lower-orthant corners on the per-axis grid.
    std::vector<std::size_t> idx(d, 0);
    Eigen::MatrixXd gauss_mc;
    if (!diagonal) {
      RngStream rng(gaussian_mc_seed, 0);
      gauss_mc = sample_gaussian(target, gaussian_mc_samples, rng);
      out.gaussian_mc_stderr =
          0.5 / std::sqrt(static_cast<double>(gaussian_mc_samples));
    }
    for (;;) {
      Eigen::VectorXd corner(d);
      for (int c = 0; c < d; ++c) {
        const double s = axis_sigma[c] > 0.0 ? axis_sigma[c] : 1.0;
        corner[c] = test_class.corner_grid[idx[c]] * s;
      }
      double emp = 0.0;
      for (std::size_t i = 0; i < count; ++i) {
        bool inside = true;
        for (int c = 0; c < d; ++c)
          if (samples_w(i, c) > corner[c]) {
            inside = false;
            break;
          }
        if (inside) emp += 1.0;
      }
      emp /= static_cast<double>(count);
      double gauss = 1.0;
      if (diagonal) {
        for (int c = 0; c < d; ++c)
          gauss *= axis_sigma[c] > 0.0
                       ? normal_cdf(corner[c] / axis_sigma[c])
                       : (corner[c] >= 0.0 ? 1.0 : 0.0);
      } else {
        double hits = 0.0;
        for (Eigen::Index i = 0; i < gauss_mc.rows(); ++i) {
          bool inside = true;
          for (int c = 0; c < d; ++c)
            if (gauss_mc(i, c) > corner[c]) {
              inside = false;
              break;
            }
          if (inside) hits += 1.0;
        }
        gauss = hits / static_cast<double>(gauss_mc.rows());
      }
      const double diff = std::abs(emp - gauss);
      if (diff > out.value) {
        out.value = diff;
        std::ostringstream label;
        label << "orthant(corner=" << corner.transpose() << ")";
        out.argmax = label.str();
      }
      int pos = 0;
      while (pos < d) {
        if (++idx[pos] < test_class.corner_grid.size()) break;
        idx[pos] = 0;
        ++pos;
      }
      if (pos == d) break;
    }
    return out;
  }

  // Centered balls: empirical via sorted norms, Gaussian via MC.
  std::vector<double> norms(count);
  for (std::size_t i = 0; i < count; ++i) norms[i] = samples_w.row(i).norm();
  std::sort(norms.begin(), norms.end());
  RngStream rng(gaussian_mc_seed, 1);
  const Eigen::MatrixXd gauss_mc =
      sample_gaussian(target, gaussian_mc_samples, rng);
  std::vector<double> gauss_norms(gauss_mc.rows());
  for (Eigen::Index i = 0; i < gauss_mc.rows(); ++i)
    gauss_norms[i] = gauss_mc.row(i).norm();
  std::sort(gauss_norms.begin(), gauss_norms.end());
  out.gaussian_mc_stderr =
      0.5 / std::sqrt(static_cast<double>(gaussian_mc_samples));
  for (double r : test_class.radii) {
    const double diff =
        std::abs(empirical_leq(norms, r) - empirical_leq(gauss_norms, r));
    if (diff > out.value) {
      out.value = diff;
      std::ostringstream label;
      label << "ball(r=" << r << ")";
      out.argmax = label.str();
    }
  }
  return out;
}

double SmoothTestFunction::operator()(const Eigen::VectorXd& x) const {
  return std::exp(-x.squaredNorm() / (2.0 * width * width));
}

SmoothTestFunction make_gaussian_bump(int dim, double width) {
  if (width <= 0.0)
    throw std::invalid_argument("make_gaussian_bump: width must be positive");
  SmoothTestFunction f;
  f.dim = dim;
  f.width = width;
  // Radial reduction: with t = <x, u>, r = ||x||, g = exp(-r^2/(2 s^2)),
  //   ||grad F||    = (r/s^2) g
  //   Hessian eigs  = -g/s^2 (tangential), g (r^2 - s^2)/s^4 (radial)
  //   D^3F[u,u,u]   = (g/s^6)(3 t s^2 - t^3).
  // The suprema are certified on a dense radial grid.
  const double s = width;
  double m1 = 0.0, m2 = 0.0, m2t = 0.0, m3 = 0.0;
  const int grid = 4000;
  for (int i = 0; i <= grid; ++i) {
    const double r = 6.0 * s * static_cast<double>(i) /
                     static_cast<double>(grid);
    const double g = std::exp(-r * r / (2.0 * s * s));
    m1 = std::max(m1, r / (s * s) * g);
    const double radial = std::abs(r * r - s * s) / (s * s * s * s);
    m2 = std::max(m2, g * std::max(radial, 1.0 / (s * s)));
    m2t = std::max(m2t, g * std::sqrt(radial * radial +
                                      (dim - 1) / (s * s * s * s)));
    for (int t_idx = 0; t_idx <= 40; ++t_idx) {
      const double t = r * static_cast<double>(t_idx) / 40.0;
      m3 = std::max(m3, g / std::pow(s, 6.0) *
                            std::abs(3.0 * t * s * s - t * t * t));
    }
  }
  f.budget.m1 = m1;
  f.budget.m2 = m2;
  f.budget.m2_tilde = m2t;
  f.budget.m3 = m3;
  return f;
}

SmoothDiscrepancy smooth_discrepancy(const Eigen::MatrixXd& samples_w,
                                     const GaussianTarget& target,
                                     const SmoothTestFunction& f,
                                     std::size_t gaussian_samples,
                                     RngStream rng) {
  const std::size_t n_w = samples_w.rows();
  if (n_w == 0)
    throw std::invalid_argument("smooth_discrepancy: no samples");
  double mean_w = 0.0, sq_w = 0.0;
  for (std::size_t i = 0; i < n_w; ++i) {
    const double v = f(samples_w.row(i).transpose());
    if (!std::isfinite(v))
      throw std::runtime_error("smooth_discrepancy: nonfinite test value");
    mean_w += v;
    sq_w += v * v;
  }
  mean_w /= static_cast<double>(n_w);
  const double var_w =
      std::max(0.0, sq_w / static_cast<double>(n_w) - mean_w * mean_w);

  const Eigen::MatrixXd gauss = sample_gaussian(target, gaussian_samples, rng);
  double mean_g = 0.0, sq_g = 0.0;
  for (Eigen::Index i = 0; i < gauss.rows(); ++i) {
    const double v = f(gauss.row(i).transpose());
    mean_g += v;
    sq_g += v * v;
  }
  mean_g /= static_cast<double>(gauss.rows());
  const double var_g =
      std::max(0.0, sq_g / static_cast<double>(gauss.rows()) -
                        mean_g * mean_g);

  SmoothDiscrepancy out;
  out.value = std::abs(mean_w - mean_g);
  out.std_error = std::sqrt(var_w / static_cast<double>(n_w) +
                            var_g / static_cast<double>(gauss.rows()));
  return out;
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 4)
    throw std::invalid_argument("rate_fit: need at least 4 (n, value) pairs");
  for (const auto& [n, value] : pairs)
    if (value <= 0.0 || n <= 0.0) {
      std::ostringstream msg;
      msg << "rate_fit: nonpositive input (n=" << n << ", value=" << value
          << "); log fit undefined";
      throw std::invalid_argument(msg.str());
    }
  const double m = static_cast<double>(pairs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [n, value] : pairs) {
    const double x = std::log(n);
    const double y = std::log(value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = sxx - sx * sx / m;
  RateFit fit;
  fit.slope = (sxy - sx * sy / m) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  double rss = 0.0;
  for (const auto& [n, value] : pairs) {
    const double resid =
        std::log(value) - (fit.intercept + fit.slope * std::log(n));
    rss += resid * resid;
  }
  const double sigma_sq = rss / (m - 2.0);
  fit.half_width = 1.96 * std::sqrt(sigma_sq / denom);
  return fit;
}

}  // namespace steinmc
