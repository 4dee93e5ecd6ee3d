#include <cmath>
#include <sstream>

#include "steinmc/boolean_model.hpp"
#include "steinmc/distance.hpp"
#include "steinmc/enumeration.hpp"
#include "steinmc/experiments.hpp"
#include "steinmc/gamma.hpp"
#include "steinmc/geometry.hpp"
#include "steinmc/kappa.hpp"
#include "steinmc/report_io.hpp"
#include "steinmc/resample.hpp"
#include "steinmc/sigma_series.hpp"

namespace steinmc {

namespace {

// Random sparse polynomial in the coordinates, for the decomposition
// battery.
Functional random_polynomial(std::size_t n, RngStream& rng) {
  struct Term {
    std::vector<int> exponents;
    double coeff;
  };
  std::vector<Term> terms;
  const std::size_t n_terms = 1 + rng.uniform_index(3);
  for (std::size_t t = 0; t < n_terms; ++t) {
    Term term;
    term.coeff = rng.uniform(-2.0, 2.0);
    term.exponents.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      term.exponents[i] = static_cast<int>(rng.uniform_index(3));
    terms.push_back(std::move(term));
  }
  return Functional(
      1,
      [terms](const CoordView& xs, Eigen::VectorXd& out) {
        double acc = 0.0;
        for (const auto& term : terms) {
          double prod = term.coeff;
          for (std::size_t i = 0; i < xs.size(); ++i) {
            const double x = xs.row(i)[0];
            for (int e = 0; e < term.exponents[i]; ++e) prod *= x;
          }
          acc += prod;
        }
        out.resize(1);
        out[0] = acc;
      },
      /*symmetric=*/false, "random-poly");
}

bool check_weight_normalization() {
  for (unsigned n = 1; n <= 20; ++n) {
    const Rational total = subset_weight_total(n);
    if (!(total == Rational(n, 1))) return false;
  }
  return true;
}

bool check_lemma_battery(unsigned pairs, RngStream rng) {
  const FiniteLaw law = FiniteLaw::uniform_scalar({0.0, 1.0, 2.0});
  for (unsigned rep = 0; rep < pairs; ++rep) {
    RngStream stream = rng.substream(rep);
    const std::size_t n = 2 + stream.uniform_index(2);
    const Functional g = random_polynomial(n, stream);
    const Functional h = random_polynomial(n, stream);
    const LemmaDecomposition check =
        lemma_covariance_decomposition(g, h, law, n);
    if (std::abs(check.lhs - check.rhs) > 1e-12) return false;
  }
  return true;
}

bool check_expected_t(RngStream rng) {
  const FiniteLaw law = FiniteLaw::bernoulli();
  RngStream stream = rng.substream(1);
  const std::size_t n = 3;
  const Functional g = random_polynomial(n, stream);
  const Functional h = random_polynomial(n, stream);
  Functional pair(
      2,
      [&g, &h](const CoordView& xs, Eigen::VectorXd& out) {
        out.resize(2);
        out[0] = g(xs)[0];
        out[1] = h(xs)[0];
      },
      false, "pair");
  const Eigen::MatrixXd expected_t = exact_expected_t(pair, law, n);
  const Eigen::MatrixXd cov = exact_covariance_matrix(pair, law, n);
  return (expected_t - cov).cwiseAbs().maxCoeff() <= 1e-12;
}

bool check_kappa(bool inject_fault, std::string* message) {
  KappaTable table = KappaTable::standard(10);
  if (inject_fault) table.values[2] *= 1.0 + 1e-6;
  // Closed form pi^{m/2} / Gamma(m/2 + 1) and the two-step recursion agree
  // on an intact table.
  for (unsigned m = 0; m <= 10; ++m) {
    const double closed =
        std::pow(M_PI, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
    if (std::abs(table.values[m] - closed) > 1e-12) {
      if (message) {
        std::ostringstream msg;
        msg << "kappa table mismatch at m=" << m;
        *message = msg.str();
      }
      return false;
    }
  }
  return verify_kappa_table(table, 1e-12, message);
}

bool check_pp_identity() {
  const double radii[] = {0.2, 0.7, 1.3};
  const double lengths[] = {0.5, 2.0};
  for (double r : radii) {
    for (double len : lengths) {
      const double body[2] = {1.0, len};
      for (unsigned i = 0; i <= 1; ++i) {
        if (pp_identity_residual(1, r, body, i, 40) > 1e-8) return false;
      }
    }
  }
  return true;
}

bool check_lens_geometry() {
  const double xs[2] = {0.0, 1.0};
  const double ys[2] = {0.0, 0.0};
  const DiscUnion u = disc_union(xs, ys, 1.0);
  const double expected_area = 2.0 * M_PI - lens_area(1.0, 1.0);
  const double expected_perimeter = 2.0 * (2.0 * M_PI) - 2.0 * lens_arc_length(1.0, 1.0);
  if (std::abs(u.area - expected_area) > 1e-10) return false;
  if (std::abs(u.perimeter - expected_perimeter) > 1e-10) return false;
  if (u.euler != 1) return false;
  const DiscIntersection isect = disc_intersection(xs, ys, 1.0);
  return std::abs(isect.area - lens_area(1.0, 1.0)) < 1e-10;
}

bool check_interval_grid() {
  const GermGrainScene scene = sample_scene(1, 24, 0.4, 0x5eed);
  const Eigen::VectorXd v = intrinsic_volumes(scene);
  // Brute-force covered-length on a fine grid.
  const double half = 0.5 * scene.side_length() + scene.radius;
  const std::size_t cells = 4000000;
  const double step = 2.0 * half / static_cast<double>(cells);
  double covered = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    const double x = -half + (static_cast<double>(c) + 0.5) * step;
    for (std::size_t i = 0; i < scene.n; ++i) {
      if (std::abs(x - scene.germs.row(i)[0]) <= scene.radius) {
        covered += step;
        break;
      }
    }
  }
  return std::abs(covered - v[1]) < 1e-5 * std::max(1.0, v[1]) + 1e-4;
}

bool check_disc_grid_mc() {
  const double xs[3] = {0.0, 0.9, 0.2};
  const double ys[3] = {0.0, 0.1, 0.8};
  const double r = 0.6;
  const DiscUnion u = disc_union(xs, ys, r);
  RngStream rng(0x9e0, 0);
  const double lo = -1.0, hi = 2.0;
  const std::size_t samples = 1000000;
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double x = rng.uniform(lo, hi);
    const double y = rng.uniform(lo, hi);
    for (int i = 0; i < 3; ++i) {
      const double dx = x - xs[i], dy = y - ys[i];
      if (dx * dx + dy * dy <= r * r) {
        ++hits;
        break;
      }
    }
  }
  const double box = (hi - lo) * (hi - lo);
  const double mc_area =
      box * static_cast<double>(hits) / static_cast<double>(samples);
  return std::abs(mc_area - u.area) < 0.01 * u.area;
}

bool check_exact_mean_routes() {
  for (std::size_t n : {4, 16, 100}) {
    const double r = 0.3;
    const Eigen::VectorXd series = exact_mean_1d(n, r);
    const double n_d = static_cast<double>(n);
    const double w = 2.0 * r;
    const double direct_v0 = (n_d - w) * std::pow(1.0 - w / n_d, n_d - 1.0) +
                             1.0 - std::pow(1.0 - w / n_d, n_d);
    const double direct_v1 =
        (n_d - w) * (1.0 - std::pow(1.0 - w / n_d, n_d)) +
        2.0 * (w - n_d / (n_d + 1.0) *
                       (1.0 - std::pow(1.0 - w / n_d, n_d + 1.0)));
    if (std::abs(series[0] - direct_v0) > 1e-9) return false;
    if (std::abs(series[1] - direct_v1) > 1e-9) return false;
  }
  return true;
}

bool check_worker_determinism() {
  const std::size_t n = 16;
  const Functional f = make_linear_statistic(n, 1);
  const BatchSampler sampler = make_standard_normal_sampler(n, 1);
  const Gamma12Result one =
      estimate_gamma12(f, sampler, 2000, RngStream(77, 0), 1);
  const Gamma12Result two =
      estimate_gamma12(f, sampler, 2000, RngStream(77, 0), 2);
  return one.gamma1.value == two.gamma1.value &&
         one.gamma2.value == two.gamma2.value;
}

}  // namespace

SelfTestResult run_selftest(const SelfTestOptions& opts) {
  SelfTestResult result;
  RngStream rng(0x5e1f, 0);

  result.checks.emplace_back("subset-weight normalization (exact, n<=20)",
                             check_weight_normalization());
  result.checks.emplace_back("covariance decomposition battery",
                             check_lemma_battery(20, rng.substream(1)));
  result.checks.emplace_back("expected T equals Cov(W) (enumeration)",
                             check_expected_t(rng.substream(2)));
  std::string kappa_message;
  const bool kappa_ok = check_kappa(opts.inject_kappa_fault, &kappa_message);
  result.checks.emplace_back(
      kappa_ok ? "kappa table closed form"
               : "kappa table closed form [" + kappa_message + "]",
      kappa_ok);
  result.checks.emplace_back("P-coefficient series identity (d=1)",
                             check_pp_identity());
  result.checks.emplace_back("disc union vs lens closed form",
                             check_lens_geometry());
  result.checks.emplace_back("interval union vs fine grid",
                             check_interval_grid());
  result.checks.emplace_back("disc union vs grid Monte Carlo",
                             check_disc_grid_mc());
  result.checks.emplace_back("exact d=1 means: series vs direct",
                             check_exact_mean_routes());
  result.checks.emplace_back("worker-count determinism",
                             check_worker_determinism());
  return result;
}

}  // namespace steinmc
