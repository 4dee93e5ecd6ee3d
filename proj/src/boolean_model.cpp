#include "steinmc/boolean_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "steinmc/geometry.hpp"
#include "steinmc/parallel.hpp"

namespace steinmc {

double GermGrainScene::side_length() const {
  return std::pow(static_cast<double>(n), 1.0 / d);
}

GermGrainScene sample_scene(int d, std::size_t n, double radius,
                            std::uint64_t seed) {
  if (d != 1 && d != 2)
    throw std::invalid_argument(
        "sample_scene: only dimensions 1 and 2 are supported");
  if (n == 0) throw std::invalid_argument("sample_scene: n must be >= 1");
  if (radius <= 0.0)
    throw std::invalid_argument("sample_scene: radius must be positive");
  GermGrainScene scene;
  scene.d = d;
  scene.n = n;
  scene.radius = radius;
  scene.seed = seed;
  scene.germs = CoordMatrix(n, static_cast<std::size_t>(d));
  const double half = 0.5 * scene.side_length();
  RngStream rng(seed, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = scene.germs.mutable_row(i);
    for (int c = 0; c < d; ++c) row[c] = rng.uniform(-half, half);
  }
  return scene;
}

Eigen::VectorXd intrinsic_volumes_1d(const CoordView& germs, double radius) {
  std::vector<std::pair<double, double>> intervals;
  intervals.reserve(germs.size());
  for (std::size_t i = 0; i < germs.size(); ++i) {
    const double c = germs.row(i)[0];
    intervals.emplace_back(c - radius, c + radius);
  }
  const IntervalUnion merged = interval_union(std::move(intervals));
  Eigen::VectorXd v(2);
  v[0] = merged.components;
  v[1] = merged.length;
  return v;
}

Eigen::VectorXd intrinsic_volumes_2d(const CoordView& germs, double radius) {
  std::vector<double> xs(germs.size()), ys(germs.size());
  for (std::size_t i = 0; i < germs.size(); ++i) {
    auto row = germs.row(i);
    xs[i] = row[0];
    ys[i] = row[1];
  }
  const DiscUnion u = disc_union(xs, ys, radius);
  Eigen::VectorXd v(3);
  v[0] = u.euler;
  v[1] = 0.5 * u.perimeter;
  v[2] = u.area;
  return v;
}

Eigen::VectorXd intrinsic_volumes(const GermGrainScene& scene) {
  if (scene.d == 1) return intrinsic_volumes_1d(scene.germs, scene.radius);
  return intrinsic_volumes_2d(scene.germs, scene.radius);
}

Functional boolean_functional(int d, std::size_t n, double radius,
                              Eigen::VectorXd center) {
  if (d != 1 && d != 2)
    throw std::invalid_argument("boolean_functional: d must be 1 or 2");
  if (center.size() != d + 1)
    throw std::invalid_argument(
        "boolean_functional: center must have d+1 entries");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  return Functional(
      d + 1,
      [d, radius, scale, center = std::move(center)](const CoordView& germs,
                                                     Eigen::VectorXd& out) {
        const Eigen::VectorXd v = d == 1
                                      ? intrinsic_volumes_1d(germs, radius)
                                      : intrinsic_volumes_2d(germs, radius);
        out = scale * (v - center);
      },
      /*symmetric=*/true, "boolean-model");
}

CoordDraw boolean_coord_draw(int d, std::size_t n) {
  const double half = 0.5 * std::pow(static_cast<double>(n), 1.0 / d);
  return [half](RngStream& rng, std::span<double> row) {
    for (double& c : row) c = rng.uniform(-half, half);
  };
}

BatchSampler boolean_batch_sampler(int d, std::size_t n, double radius) {
  (void)radius;
  return make_iid_sampler(n, static_cast<std::size_t>(d),
                          boolean_coord_draw(d, n));
}

Eigen::MatrixXd empirical_covariance(const Functional& f, std::size_t n,
                                     std::size_t dim, const CoordDraw& draw,
                                     std::size_t replicates, RngStream rng,
                                     unsigned workers) {
  if (replicates < 2)
    throw std::invalid_argument("empirical_covariance: replicates >= 2");
  const int d_out = f.dim_out();
  Eigen::MatrixXd samples(replicates, d_out);
  parallel_for(replicates, workers, [&](std::size_t rep) {
    RngStream stream = rng.substream(rep);
    CoordMatrix x(n, dim);
    for (std::size_t i = 0; i < n; ++i) draw(stream, x.mutable_row(i));
    Eigen::VectorXd w;
    f.eval_into(x, w);
    samples.row(rep) = w.transpose();
  });
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  Eigen::MatrixXd centered = samples.rowwise() - mean;
  return centered.transpose() * centered /
         static_cast<double>(replicates - 1);
}

Eigen::VectorXd pilot_center(int d, std::size_t n, double radius,
                             std::size_t replicates, RngStream rng,
                             unsigned workers) {
  Eigen::MatrixXd samples(replicates, d + 1);
  const CoordDraw draw = boolean_coord_draw(d, n);
  parallel_for(replicates, workers, [&](std::size_t rep) {
    RngStream stream = rng.substream(rep);
    CoordMatrix x(n, static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < n; ++i) draw(stream, x.mutable_row(i));
    samples.row(rep) = (d == 1 ? intrinsic_volumes_1d(x, radius)
                               : intrinsic_volumes_2d(x, radius))
                           .transpose();
  });
  return samples.colwise().mean().transpose();
}

Eigen::VectorXd exact_mean_1d(std::size_t n, double radius) {
  const double n_d = static_cast<double>(n);
  const double width = 2.0 * radius;
  if (width > n_d)
    throw std::invalid_argument("exact_mean_1d: needs 2R <= n");
  // Inclusion-exclusion over germ subsets; each term is a closed-form
  // integral of interval-intersection intrinsic volumes:
  //   I_l = integral over E_n^l of V_1(K+x_1 cap ... cap K+x_l)
  //       = n w^l - (l-1) w^{l+1} / (l+1)      (l >= 2, I_1 = n w)
  //   J_l = integral of 1[nonempty]
  //       = l n w^{l-1} - (l-1) w^l            (l >= 2, J_1 = n).
  double ev1 = 0.0;
  double ev0 = 0.0;
  double comb = 1.0;  // C(n,l) / n^l, updated incrementally
  for (std::size_t l = 1; l <= n; ++l) {
    comb *= (n_d - static_cast<double>(l) + 1.0) /
            (n_d * static_cast<double>(l));
    const double sign = (l % 2 == 1) ? 1.0 : -1.0;
    const double w_pow = std::pow(width, static_cast<double>(l));
    double i_l, j_l;
    if (l == 1) {
      i_l = n_d * width;
      j_l = n_d;
    } else {
      i_l = n_d * w_pow -
            (static_cast<double>(l) - 1.0) * w_pow * width /
                (static_cast<double>(l) + 1.0);
      j_l = static_cast<double>(l) * n_d * w_pow / width -
            (static_cast<double>(l) - 1.0) * w_pow;
    }
    const double term1 = sign * comb * i_l;
    const double term0 = sign * comb * j_l;
    ev1 += term1;
    ev0 += term0;
    if (l > 4 && std::abs(term1) < 1e-15 && std::abs(term0) < 1e-15) break;
  }
  Eigen::VectorXd out(2);
  out[0] = ev0;
  out[1] = ev1;
  return out;
}

namespace {

// 32-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; the
// rule is symmetric).
constexpr int kGaussHalf = 16;
constexpr double kGaussNode[kGaussHalf] = {
    0.0483076656877383, 0.1444719615827965, 0.2392873622521371,
    0.3318686022821277, 0.4213512761306353, 0.5068999089322294,
    0.5877157572407623, 0.6630442669302152, 0.7321821187402897,
    0.7944837959679424, 0.8493676137325700, 0.8963211557660521,
    0.9349060759377397, 0.9647622555875064, 0.9856115115452684,
    0.9972638618494816};
constexpr double kGaussWeight[kGaussHalf] = {
    0.0965400885147278, 0.0956387200792749, 0.0938443990808046,
    0.0911738786957639, 0.0876520930044038, 0.0833119242269467,
    0.0781938957870703, 0.0723457941088485, 0.0658222227763618,
    0.0586840934785355, 0.0509980592623762, 0.0428358980222267,
    0.0342738629130214, 0.0253920653092621, 0.0162743947309057,
    0.0068108000982749};

template <typename Fn>
double gauss_segment(const Fn& f, double a, double b) {
  if (b <= a) return 0.0;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < kGaussHalf; ++i) {
    acc += kGaussWeight[i] * (f(mid - half * kGaussNode[i]) +
                              f(mid + half * kGaussNode[i]));
  }
  return acc * half;
}

// Integrates over [a, b] split at the provided breakpoints.
template <typename Fn>
double gauss_pieces(const Fn& f, double a, double b,
                    std::vector<double> breaks) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double acc = 0.0;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double lo = std::max(a, breaks[s]);
    const double hi = std::min(b, breaks[s + 1]);
    if (hi > lo + 1e-15) acc += gauss_segment(f, lo, hi);
  }
  return acc;
}

// (1 - t/n)^m, stable for small t/n.
double pow_frac(double t, double n, double m) {
  const double ratio = t / n;
  if (ratio >= 1.0) return 0.0;
  return std::exp(m * std::log1p(-ratio));
}

}  // namespace

Eigen::MatrixXd exact_covariance_1d(std::size_t n_germs, double radius) {
  const double n = static_cast<double>(n_germs);
  const double r = radius;
  const double len = n;          // |E_n|
  const double half = 0.5 * len;
  const double w = 2.0 * r;      // grain length
  if (2.0 * w > len)
    throw std::invalid_argument("exact_covariance_1d: needs 4R <= n");

  // Coverage weight of a point and exposure weight of a germ.
  auto ell = [&](double x) {
    return std::max(0.0, std::min(x + r, half) - std::max(x - r, -half));
  };
  auto g_exp = [&](double c) { return std::min(w, c + half); };

  // ---- Var V1: integral of q2(x,y) - q(x)q(y) over the point domain.
  // Far pairs (|x-y| >= 2R) depend on (ell_x, ell_y) only; their integral
  // reduces to the pushforward measure mu = (len-2R) delta_{2R} + 2 Leb.
  auto f_far = [&](double a, double b) {
    return pow_frac(a + b, n, n) - pow_frac(a, n, n) * pow_frac(b, n, n);
  };
  const double full_ff =
      (len - w) * (len - w) * f_far(w, w) +
      2.0 * (len - w) * 2.0 *
          gauss_segment([&](double b) { return f_far(w, b); }, 0.0, w) +
      4.0 * gauss_segment(
                [&](double a) {
                  return gauss_segment(
                      [&](double b) { return f_far(a, b); }, 0.0, w);
                },
                0.0, w);
  // Strip |x-y| < 2R: subtract the far formula there and add the true one.
  const double x_lo = -half - r, x_hi = half + r;
  auto strip_value = [&](double u) {  // u = y - x in (0, 2R)
    auto far_part = [&](double x) { return f_far(ell(x), ell(x + u)); };
    auto near_part = [&](double x) {
      const double l_union = std::max(
          0.0, std::min(x + u + r, half) - std::max(x - r, -half));
      return pow_frac(l_union, n, n) -
             pow_frac(ell(x), n, n) * pow_frac(ell(x + u), n, n);
    };
    const std::vector<double> breaks = {-half - r, -half + r, half - r - u,
                                        half + r - u, -half + r - u,
                                        half - r};
    return gauss_pieces([&](double x) { return near_part(x) - far_part(x); },
                        x_lo, x_hi - u, breaks);
  };
  const double strip_v1 =
      2.0 * gauss_segment(strip_value, 0.0, w);
  const double var_v1 = full_ff + strip_v1;

  // ---- Var V0 via exposed left endpoints.
  const double m1 =
      (1.0 / n) * ((len - w) * pow_frac(w, n, n - 1.0) +
                   gauss_segment(
                       [&](double a) { return pow_frac(a, n, n - 1.0); },
                       0.0, w));
  double var_v0 = n * m1 - (n * m1) * (n * m1);
  if (n_germs >= 2) {
    auto g_pair = [&](double a, double b) {
      return pow_frac(a + b, n, n - 2.0);
    };
    const double full_gg =
        (len - w) * (len - w) * g_pair(w, w) +
        2.0 * (len - w) *
            gauss_segment([&](double b) { return g_pair(w, b); }, 0.0, w) +
        gauss_segment(
            [&](double a) {
              return gauss_segment(
                  [&](double b) { return g_pair(a, b); }, 0.0, w);
            },
            0.0, w);
    auto strip_g = [&](double u) {  // u = c' - c in (0, 2R): excluded pairs
      auto part = [&](double c) { return g_pair(g_exp(c), g_exp(c + u)); };
      const std::vector<double> breaks = {-half + w, -half + w - u};
      return gauss_pieces(part, -half, half - u, breaks);
    };
    const double strip_gg = 2.0 * gauss_segment(strip_g, 0.0, w);
    const double m2 = (full_gg - strip_gg) / (n * n);
    var_v0 += n * (n - 1.0) * m2;
  }

  // ---- Cov(V0, V1): germ exposure against point coverage.
  // Far part (x outside [c-3R, c+R]): depends on (g(c), ell(x)) only.
  auto h_far = [&](double a, double b) {
    return pow_frac(a, n, n - 1.0) * pow_frac(b, n, n) -
           pow_frac(a + b, n, n - 1.0);
  };
  const double full_h =
      (len - w) * (len - w) * h_far(w, w) +
      (len - w) * 2.0 *
          gauss_segment([&](double b) { return h_far(w, b); }, 0.0, w) +
      (len - w) *
          gauss_segment([&](double a) { return h_far(a, w); }, 0.0, w) +
      2.0 * gauss_segment(
                [&](double a) {
                  return gauss_segment(
                      [&](double b) { return h_far(a, b); }, 0.0, w);
                },
                0.0, w);
  // Near strip u = x - c in [-3R, R].
  auto near_cov = [&](double u) {
    auto far_part = [&](double c) { return h_far(g_exp(c), ell(c + u)); };
    auto near_part = [&](double c) {
      const double x = c + u;
      const double product =
          pow_frac(g_exp(c), n, n - 1.0) * pow_frac(ell(x), n, n);
      if (std::abs(u) <= r) return product;  // x covered by germ 1 itself
      const double isect = std::max(
          0.0, std::min(std::min(c, x + r), half) -
                   std::max(std::max(c - w, x - r), -half));
      const double h_val = g_exp(c) + ell(x) - isect;
      return product - pow_frac(h_val, n, n - 1.0);
    };
    const std::vector<double> breaks = {-half + w, -half + r - u,
                                        half - r - u, -half - r - u,
                                        half + r - u, -half + w - u};
    return gauss_pieces(
        [&](double c) { return near_part(c) - far_part(c); },
        std::max(-half, x_lo - u), std::min(half, x_hi - u), breaks);
  };
  const double near_h = gauss_pieces(near_cov, -3.0 * r, r, {-r, r});
  const double cov_v0_v1 = full_h + near_h;

  Eigen::MatrixXd cov(2, 2);
  cov(0, 0) = var_v0 / n;
  cov(0, 1) = cov_v0_v1 / n;
  cov(1, 0) = cov_v0_v1 / n;
  cov(1, 1) = var_v1 / n;
  return cov;
}

std::string scene_to_text(const GermGrainScene& scene) {
  std::ostringstream out;
  out.precision(17);
  out << "d " << scene.d << "\n";
  out << "n " << scene.n << "\n";
  out << "radius " << scene.radius << "\n";
  out << "seed " << scene.seed << "\n";
  for (std::size_t i = 0; i < scene.n; ++i) {
    auto row = scene.germs.row(i);
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c == 0 ? "" : " ") << row[c];
    out << "\n";
  }
  return out.str();
}

GermGrainScene scene_from_text(const std::string& text) {
  std::istringstream in(text);
  GermGrainScene scene;
  std::string key;
  in >> key >> scene.d;
  if (key != "d") throw std::invalid_argument("scene_from_text: expected 'd'");
  in >> key >> scene.n;
  if (key != "n") throw std::invalid_argument("scene_from_text: expected 'n'");
  in >> key >> scene.radius;
  if (key != "radius")
    throw std::invalid_argument("scene_from_text: expected 'radius'");
  in >> key >> scene.seed;
  if (key != "seed")
    throw std::invalid_argument("scene_from_text: expected 'seed'");
  scene.germs = CoordMatrix(scene.n, static_cast<std::size_t>(scene.d));
  for (std::size_t i = 0; i < scene.n; ++i) {
    auto row = scene.germs.mutable_row(i);
    for (int c = 0; c < scene.d; ++c) {
      if (!(in >> row[c]))
        throw std::invalid_argument("scene_from_text: truncated germ list");
    }
  }
  return scene;
}

}  // namespace steinmc
