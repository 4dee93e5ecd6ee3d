#include "steinmc/gamma.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "steinmc/parallel.hpp"
#include "steinmc/resample.hpp"

namespace steinmc {

BatchSampler make_iid_sampler(std::size_t n, std::size_t dim,
                              CoordDraw draw_coord) {
  return [n, dim, draw = std::move(draw_coord)](RngStream& rng) {
    return sample_batch(n, dim, draw, rng);
  };
}

BatchSampler make_standard_normal_sampler(std::size_t n, std::size_t dim) {
  return make_iid_sampler(n, dim, [](RngStream& rng, std::span<double> row) {
    for (double& v : row) v = rng.normal();
  });
}

BatchSampler make_uniform_cube_sampler(std::size_t n, std::size_t dim) {
  return make_iid_sampler(n, dim, [](RngStream& rng, std::span<double> row) {
    for (double& v : row) v = rng.uniform() - 0.5;
  });
}

namespace {

struct MeanWithError {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanWithError reduce(std::span<const double> slots) {
  MeanWithError out;
  const double n = static_cast<double>(slots.size());
  out.mean = pairwise_sum(slots) / n;
  if (slots.size() > 1) {
    std::vector<double> sq(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const double c = slots[i] - out.mean;
      sq[i] = c * c;
    }
    out.std_error = std::sqrt(pairwise_sum(sq) / (n * (n - 1.0)));
  }
  return out;
}

void require_finite(const Eigen::VectorXd& v, std::uint64_t master,
                    std::uint64_t stream, const char* where) {
  if (!v.allFinite()) {
    std::ostringstream msg;
    msg << where << ": nonfinite functional output (master seed " << master
        << ", replicate stream " << stream << ")";
    throw std::runtime_error(msg.str());
  }
}

// Root of a clamped nonnegative aggregate, with a delta-method error bar.
ValueWithError root_of(const MeanWithError& inner, double exponent,
                       std::size_t reps) {
  ValueWithError out;
  out.reps = reps;
  double value = inner.mean;
  if (value < 0.0) {
    value = 0.0;
    out.clamped = true;
  }
  out.value = std::pow(value, exponent);
  out.std_error = value > 0.0
                      ? exponent * std::pow(value, exponent - 1.0) *
                            inner.std_error
                      : inner.std_error;
  return out;
}

}  // namespace

Gamma12Result estimate_gamma12(const Functional& f, const BatchSampler& sampler,
                               std::size_t reps, RngStream rng,
                               unsigned workers) {
  if (reps < 2)
    throw std::invalid_argument("estimate_gamma12: reps must be >= 2");
  std::vector<double> cubes(reps), fourths(reps);
  parallel_for(reps, workers, [&](std::size_t rep) {
    RngStream stream = rng.substream(rep);
    SampleBatch batch = sampler(stream);
    const std::size_t n = batch.n();
    const std::size_t j = stream.uniform_index(n);
    const Eigen::VectorXd dj = delta_j(f, batch, j);
    require_finite(dj, rng.master_seed(), stream.stream_id(),
                   "estimate_gamma12");
    const double norm = dj.norm();
    const double scaled = static_cast<double>(n);
    cubes[rep] = scaled * norm * norm * norm;
    fourths[rep] = scaled * norm * norm * norm * norm;
  });
  Gamma12Result out;
  const MeanWithError m3 = reduce(cubes);
  out.gamma1 = {m3.mean, m3.std_error, reps, false};
  out.gamma2 = root_of(reduce(fourths), 0.5, reps);
  return out;
}

Gamma34Result estimate_gamma34(const Functional& f, const BatchSampler& sampler,
                               const Gamma34Options& opts, RngStream rng) {
  if (opts.reps_inner < 2)
    throw std::invalid_argument(
        "estimate_gamma34: reps_inner must be >= 2 for the unbiased-square "
        "scheme");
  const std::size_t reps = opts.reps_outer;
  std::vector<double> agg3(reps), agg4(reps);
  const double tol = opts.zero_tolerance;

  parallel_for(reps, opts.workers, [&](std::size_t rep) {
    RngStream stream = rng.substream(rep);
    SampleBatch batch = sampler(stream);
    const std::size_t n = batch.n();
    const double n_d = static_cast<double>(n);
    const std::size_t i = stream.uniform_index(n);

    // Two independent estimates of each inner A-sum (per summand group).
    std::array<std::array<double, 4>, 2> s3{};
    std::array<std::array<double, 4>, 2> s4{};
    const std::size_t first_half = (opts.reps_inner + 1) / 2;
    RecombinedVector base(batch);
    for (std::size_t inner = 0; inner < opts.reps_inner; ++inner) {
      const std::size_t half = inner < first_half ? 0 : 1;
      const double half_count =
          half == 0 ? static_cast<double>(first_half)
                    : static_cast<double>(opts.reps_inner - first_half);
      const SubsetDraw draw = sample_weighted_subset(n, stream);
      const std::size_t j = draw.j;
      RecombinedVector xa = resample_subset(batch, draw.a_set);

      const Eigen::VectorXd dj_x = delta_j_view(f, base, j);
      const Eigen::VectorXd tdj_x = tilde_delta_i_delta_j_view(f, base, i, j);
      const Eigen::VectorXd dj_xa = delta_j_view(f, xa, j);
      const Eigen::VectorXd tdj_xa =
          tilde_delta_i_delta_j_view(f, xa, i, j);
      require_finite(dj_x, rng.master_seed(), stream.stream_id(),
                     "estimate_gamma34");
      require_finite(tdj_xa, rng.master_seed(), stream.stream_id(),
                     "estimate_gamma34");

      const double norm_dj = dj_x.norm();
      const double norm_tdj = tdj_x.norm();
      const double norm_dj_a = dj_xa.norm();
      const double norm_tdj_a = tdj_xa.norm();
      const double indicator =
          (tdj_x.cwiseAbs().maxCoeff() > tol) ? 1.0 : 0.0;
      const double root3 = std::sqrt(norm_dj + norm_tdj);
      const double root4 =
          std::sqrt(norm_dj * norm_dj + norm_tdj * norm_tdj);
      const double scale = n_d / half_count;  // n * mean over the half
      s3[half][0] += scale * indicator * root3 * norm_dj_a * norm_dj;
      s3[half][1] += scale * root3 * norm_tdj_a * norm_dj;
      s3[half][2] += scale * root3 * norm_dj_a * norm_tdj;
      s3[half][3] += scale * root3 * norm_tdj_a * norm_tdj;
      s4[half][0] += scale * indicator * root4 * norm_dj_a * norm_dj;
      s4[half][1] += scale * root4 * norm_tdj_a * norm_dj;
      s4[half][2] += scale * root4 * norm_dj_a * norm_tdj;
      s4[half][3] += scale * root4 * norm_tdj_a * norm_tdj;
    }
    // Unbiased estimates of the squared sums, scaled by n for the i-sum.
    double a3 = 1.5 * s3[0][0] * s3[1][0];
    double a4 = 1.5 * s4[0][0] * s4[1][0];
    for (int g = 1; g < 4; ++g) {
      a3 += 9.0 * s3[0][g] * s3[1][g];
      a4 += 6.75 * s4[0][g] * s4[1][g];
    }
    agg3[rep] = n_d * a3;
    agg4[rep] = n_d * a4;
  });

  Gamma34Result out;
  const MeanWithError inner3 = reduce(agg3);
  const MeanWithError inner4 = reduce(agg4);
  out.gamma3_inner = {std::max(inner3.mean, 0.0), inner3.std_error, reps,
                      inner3.mean < 0.0};
  out.gamma4_inner = {std::max(inner4.mean, 0.0), inner4.std_error, reps,
                      inner4.mean < 0.0};
  out.gamma3 = root_of(inner3, 1.0 / 3.0, reps);
  out.gamma4 = root_of(inner4, 0.25, reps);
  return out;
}

ValueWithError estimate_sigma_term(const Functional& f,
                                   const Eigen::MatrixXd& sigma,
                                   const BatchSampler& sampler,
                                   const SigmaTermOptions& opts,
                                   RngStream rng) {
  if (sigma.rows() != f.dim_out() || sigma.cols() != f.dim_out())
    throw std::invalid_argument(
        "estimate_sigma_term: sigma dimension does not match the functional");
  if (opts.reps_inner < 2)
    throw std::invalid_argument(
        "estimate_sigma_term: reps_inner must be >= 2");
  const std::size_t reps = opts.reps_outer;
  std::vector<double> slots(reps);
  parallel_for(reps, opts.workers, [&](std::size_t rep) {
    RngStream stream = rng.substream(rep);
    SampleBatch outer = sampler(stream);
    const std::size_t n = outer.n();
    const double n_d = static_cast<double>(n);
    const int d = f.dim_out();
    const std::size_t first_half = (opts.reps_inner + 1) / 2;

    std::array<Eigen::MatrixXd, 2> t_hat{Eigen::MatrixXd::Zero(d, d),
                                         Eigen::MatrixXd::Zero(d, d)};
    for (std::size_t inner = 0; inner < opts.reps_inner; ++inner) {
      const std::size_t half = inner < first_half ? 0 : 1;
      const double half_count =
          half == 0 ? static_cast<double>(first_half)
                    : static_cast<double>(opts.reps_inner - first_half);
      // Fresh X' (and X~) around the fixed outer X.
      SampleBatch batch = sampler(stream);
      batch.x = outer.x;
      RecombinedVector base(batch);
      const SubsetDraw draw = sample_weighted_subset(n, stream);
      RecombinedVector xa = resample_subset(batch, draw.a_set);
      const Eigen::VectorXd dj_x = delta_j_view(f, base, draw.j);
      const Eigen::VectorXd dj_xa = delta_j_view(f, xa, draw.j);
      require_finite(dj_x, rng.master_seed(), stream.stream_id(),
                     "estimate_sigma_term");
      t_hat[half].noalias() +=
          (0.5 * n_d / half_count) * (dj_x * dj_xa.transpose());
    }
    slots[rep] =
        ((t_hat[0] - sigma).array() * (t_hat[1] - sigma).array()).sum();
  });
  return root_of(reduce(slots), 0.5, reps);
}

GammaEstimates estimate_all_gammas(const Functional& f,
                                   const Eigen::MatrixXd& sigma,
                                   const BatchSampler& sampler,
                                   const GammaEstimationPlan& plan,
                                   RngStream rng) {
  GammaEstimates out;
  out.method = "nested-mc";
  out.seed = rng.master_seed();
  const Gamma12Result g12 = estimate_gamma12(f, sampler, plan.reps12,
                                             rng.substream(1), plan.g34.workers);
  out.gamma1 = g12.gamma1;
  out.gamma2 = g12.gamma2;
  const Gamma34Result g34 =
      estimate_gamma34(f, sampler, plan.g34, rng.substream(2));
  out.gamma3 = g34.gamma3;
  out.gamma4 = g34.gamma4;
  out.sigma_term =
      estimate_sigma_term(f, sigma, sampler, plan.sigma_term, rng.substream(3));
  return out;
}

}  // namespace steinmc
