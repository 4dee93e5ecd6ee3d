#include "steinmc/enumeration.hpp"

#include <cmath>
#include <sstream>

#include "steinmc/rational.hpp"
#include "steinmc/resample.hpp"

namespace steinmc {

FiniteLaw FiniteLaw::uniform_scalar(std::vector<double> values) {
  FiniteLaw law;
  const double p = 1.0 / static_cast<double>(values.size());
  for (double v : values) {
    law.support.push_back({v});
    law.probs.push_back(p);
  }
  return law;
}

FiniteLaw FiniteLaw::bernoulli(double p) {
  FiniteLaw law;
  law.support = {{0.0}, {1.0}};
  law.probs = {1.0 - p, p};
  return law;
}

namespace {

void check_caps(const FiniteLaw& law, std::size_t n,
                const EnumerationCaps& caps) {
  if (n > caps.n_cap) {
    std::ostringstream msg;
    msg << "enumeration oracle limited to n <= " << caps.n_cap << " (got n="
        << n << ")";
    throw EnumerationCapError(msg.str());
  }
  if (law.size() > caps.support_cap) {
    std::ostringstream msg;
    msg << "enumeration oracle limited to support size <= "
        << caps.support_cap << " (got " << law.size() << ")";
    throw EnumerationCapError(msg.str());
  }
}

// Visits every assignment of `slots` support indices with its product
// probability.
template <typename Fn>
void for_each_assignment(const FiniteLaw& law, std::size_t slots, Fn&& fn) {
  std::vector<std::size_t> idx(slots, 0);
  for (;;) {
    double prob = 1.0;
    for (std::size_t s = 0; s < slots; ++s) prob *= law.probs[idx[s]];
    fn(idx, prob);
    std::size_t pos = 0;
    while (pos < slots) {
      if (++idx[pos] < law.size()) break;
      idx[pos] = 0;
      ++pos;
    }
    if (pos == slots) return;
  }
}

CoordMatrix materialize(const FiniteLaw& law,
                        const std::vector<std::size_t>& idx,
                        std::size_t offset, std::size_t n) {
  CoordMatrix m(n, law.dim());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& point = law.support[idx[offset + i]];
    auto row = m.mutable_row(i);
    for (std::size_t c = 0; c < point.size(); ++c) row[c] = point[c];
  }
  return m;
}

// Explicit vector built from (X, X', X~): slots in a_mask read X', the
// optional tilde slot reads X~ (unless the slot is in a_mask), the rest
// read X.  Deliberately materialized; no view machinery.
CoordMatrix compose(const CoordMatrix& x, const CoordMatrix& xp,
                    const CoordMatrix& xt, std::uint32_t a_mask,
                    int tilde_slot) {
  CoordMatrix out = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool in_a = (a_mask >> i) & 1u;
    if (in_a) {
      auto row = out.mutable_row(i);
      auto src = xp.row(i);
      std::copy(src.begin(), src.end(), row.begin());
    } else if (static_cast<int>(i) == tilde_slot) {
      auto row = out.mutable_row(i);
      auto src = xt.row(i);
      std::copy(src.begin(), src.end(), row.begin());
    }
  }
  return out;
}

Eigen::MatrixXd t_matrix_direct(const Functional& f, const CoordMatrix& x,
                                const CoordMatrix& xp) {
  const std::size_t n = x.size();
  const int d = f.dim_out();
  const CoordMatrix empty_tilde(n, x.dim());
  std::vector<Eigen::VectorXd> by_mask(std::size_t{1} << n);
  for (std::uint32_t mask = 0; mask < by_mask.size(); ++mask)
    by_mask[mask] = f(compose(x, xp, empty_tilde, mask, -1));
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(d, d);
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  for (std::uint32_t a_mask = 0; a_mask < full; ++a_mask) {
    const double w = subset_weight(
        static_cast<unsigned>(n),
        static_cast<unsigned>(__builtin_popcount(a_mask)));
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint32_t bit = std::uint32_t{1} << j;
      if (a_mask & bit) continue;
      const Eigen::VectorXd dj_x = by_mask[0] - by_mask[bit];
      const Eigen::VectorXd dj_xa = by_mask[a_mask] - by_mask[a_mask | bit];
      t.noalias() += (0.5 * w) * (dj_x * dj_xa.transpose());
    }
  }
  return t;
}

}  // namespace

LemmaDecomposition lemma_covariance_decomposition(
    const Functional& g, const Functional& h, const FiniteLaw& law,
    std::size_t n, const EnumerationCaps& caps) {
  check_caps(law, n, caps);
  LemmaDecomposition out;

  // lhs: plain covariance over X.
  double mean_g = 0.0, mean_h = 0.0, mean_gh = 0.0;
  for_each_assignment(law, n, [&](const std::vector<std::size_t>& idx,
                                  double prob) {
    const CoordMatrix x = materialize(law, idx, 0, n);
    const double gv = g(x)[0];
    const double hv = h(x)[0];
    mean_g += prob * gv;
    mean_h += prob * hv;
    mean_gh += prob * gv * hv;
  });
  out.lhs = mean_gh - mean_g * mean_h;

  // rhs: the weighted subset-resampling double sum over (X, X').
  const CoordMatrix empty_tilde(n, law.dim());
  double rhs = 0.0;
  for_each_assignment(law, 2 * n, [&](const std::vector<std::size_t>& idx,
                                      double prob) {
    const CoordMatrix x = materialize(law, idx, 0, n);
    const CoordMatrix xp = materialize(law, idx, n, n);
    std::vector<double> g_mask(std::size_t{1} << n), h_mask(g_mask.size());
    for (std::uint32_t mask = 0; mask < g_mask.size(); ++mask) {
      const CoordMatrix v = compose(x, xp, empty_tilde, mask, -1);
      g_mask[mask] = g(v)[0];
      h_mask[mask] = h(v)[0];
    }
    const std::uint32_t full = (std::uint32_t{1} << n) - 1;
    double contrib = 0.0;
    for (std::uint32_t a_mask = 0; a_mask < full; ++a_mask) {
      const double w = subset_weight(
          static_cast<unsigned>(n),
          static_cast<unsigned>(__builtin_popcount(a_mask)));
      for (std::size_t j = 0; j < n; ++j) {
        const std::uint32_t bit = std::uint32_t{1} << j;
        if (a_mask & bit) continue;
        contrib += w * (g_mask[0] - g_mask[bit]) *
                   (h_mask[a_mask] - h_mask[a_mask | bit]);
      }
    }
    rhs += prob * 0.5 * contrib;
  });
  out.rhs = rhs;
  return out;
}

Eigen::MatrixXd exact_covariance_matrix(const Functional& f,
                                        const FiniteLaw& law, std::size_t n,
                                        const EnumerationCaps& caps) {
  check_caps(law, n, caps);
  const int d = f.dim_out();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);
  for_each_assignment(law, n, [&](const std::vector<std::size_t>& idx,
                                  double prob) {
    const Eigen::VectorXd w = f(materialize(law, idx, 0, n));
    mean += prob * w;
    second.noalias() += prob * (w * w.transpose());
  });
  return second - mean * mean.transpose();
}

Eigen::MatrixXd exact_expected_t(const Functional& f, const FiniteLaw& law,
                                 std::size_t n, const EnumerationCaps& caps) {
  check_caps(law, n, caps);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(f.dim_out(), f.dim_out());
  for_each_assignment(law, 2 * n, [&](const std::vector<std::size_t>& idx,
                                      double prob) {
    const CoordMatrix x = materialize(law, idx, 0, n);
    const CoordMatrix xp = materialize(law, idx, n, n);
    acc += prob * t_matrix_direct(f, x, xp);
  });
  return acc;
}

Eigen::MatrixXd exact_t_for_batch(const Functional& f,
                                  const SampleBatch& batch) {
  if (batch.n() > 20)
    throw EnumerationCapError("exact_t_for_batch: limited to n <= 20");
  return t_matrix_direct(f, batch.x, batch.x_prime);
}

double exact_sigma_term_sq(const Functional& f, const Eigen::MatrixXd& sigma,
                           const FiniteLaw& law, std::size_t n,
                           const EnumerationCaps& caps) {
  check_caps(law, n, caps);
  double acc = 0.0;
  for_each_assignment(law, n, [&](const std::vector<std::size_t>& x_idx,
                                  double x_prob) {
    const CoordMatrix x = materialize(law, x_idx, 0, n);
    Eigen::MatrixXd cond =
        Eigen::MatrixXd::Zero(f.dim_out(), f.dim_out());
    for_each_assignment(law, n, [&](const std::vector<std::size_t>& p_idx,
                                    double p_prob) {
      const CoordMatrix xp = materialize(law, p_idx, 0, n);
      cond += p_prob * t_matrix_direct(f, x, xp);
    });
    acc += x_prob * (cond - sigma).squaredNorm();
  });
  return acc;
}

double exact_delta1_fourth(const Functional& f, const FiniteLaw& law,
                           std::size_t n, const EnumerationCaps& caps) {
  check_caps(law, n, caps);
  const CoordMatrix empty_tilde(n, law.dim());
  double acc = 0.0;
  for_each_assignment(law, 2 * n, [&](const std::vector<std::size_t>& idx,
                                      double prob) {
    const CoordMatrix x = materialize(law, idx, 0, n);
    const CoordMatrix xp = materialize(law, idx, n, n);
    const Eigen::VectorXd d1 =
        f(x) - f(compose(x, xp, empty_tilde, 1u, -1));
    const double norm = d1.norm();
    acc += prob * norm * norm * norm * norm;
  });
  return acc;
}

ExactGammaIngredients exact_gamma_ingredients(const Functional& f,
                                              const FiniteLaw& law,
                                              std::size_t n,
                                              const EnumerationCaps& caps) {
  check_caps(law, n, caps);
  ExactGammaIngredients out;

  // gamma1 / gamma2 need (X, X') only.
  const CoordMatrix empty_tilde(n, law.dim());
  for_each_assignment(law, 2 * n, [&](const std::vector<std::size_t>& idx,
                                      double prob) {
    const CoordMatrix x = materialize(law, idx, 0, n);
    const CoordMatrix xp = materialize(law, idx, n, n);
    const Eigen::VectorXd fx = f(x);
    for (std::size_t j = 0; j < n; ++j) {
      const Eigen::VectorXd dj =
          fx - f(compose(x, xp, empty_tilde, std::uint32_t{1} << j, -1));
      const double norm = dj.norm();
      out.gamma1 += prob * norm * norm * norm;
      out.gamma2_sq += prob * norm * norm * norm * norm;
    }
  });

  // gamma3 / gamma4 group totals over (X, X', X~).
  for_each_assignment(law, 3 * n, [&](const std::vector<std::size_t>& idx,
                                      double prob) {
    const CoordMatrix x = materialize(law, idx, 0, n);
    const CoordMatrix xp = materialize(law, idx, n, n);
    const CoordMatrix xt = materialize(law, idx, 2 * n, n);
    auto eval = [&](std::uint32_t a_mask, int tilde_slot) {
      return f(compose(x, xp, xt, a_mask, tilde_slot));
    };
    const std::uint32_t full = (std::uint32_t{1} << n) - 1;
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, 4> s3{};  // inner A-sums per summand group
      std::array<double, 4> s4{};
      for (std::uint32_t a_mask = 0; a_mask < full; ++a_mask) {
        const double w = subset_weight(
            static_cast<unsigned>(n),
            static_cast<unsigned>(__builtin_popcount(a_mask)));
        const bool i_in_a = (a_mask >> i) & 1u;
        for (std::size_t j = 0; j < n; ++j) {
          const std::uint32_t bit = std::uint32_t{1} << j;
          if (a_mask & bit) continue;
          const Eigen::VectorXd dj_x = eval(0, -1) - eval(bit, -1);
          Eigen::VectorXd tdj_x;
          if (i == j) {
            tdj_x = eval(0, -1) - eval(0, static_cast<int>(i));
          } else {
            tdj_x = dj_x - (eval(0, static_cast<int>(i)) -
                            eval(bit, static_cast<int>(i)));
          }
          const Eigen::VectorXd dj_xa =
              eval(a_mask, -1) - eval(a_mask | bit, -1);
          Eigen::VectorXd tdj_xa = Eigen::VectorXd::Zero(f.dim_out());
          if (!i_in_a) {
            if (i == j) {
              tdj_xa = eval(a_mask, -1) - eval(a_mask, static_cast<int>(i));
            } else {
              tdj_xa = dj_xa - (eval(a_mask, static_cast<int>(i)) -
                                eval(a_mask | bit, static_cast<int>(i)));
            }
          }
          const double norm_dj = dj_x.norm();
          const double norm_tdj = tdj_x.norm();
          const double norm_dj_a = dj_xa.norm();
          const double norm_tdj_a = tdj_xa.norm();
          // The oracle evaluates f on composed vectors, so second-order
          // cancellations leave ~1e-16 rounding residue; the indicator
          // must not fire on it.  True nonzero values on enumerable
          // instances are far above this threshold.
          const double indicator =
              tdj_x.cwiseAbs().maxCoeff() > 1e-9 ? 1.0 : 0.0;
          const double root3 = std::sqrt(norm_dj + norm_tdj);
          const double root4 =
              std::sqrt(norm_dj * norm_dj + norm_tdj * norm_tdj);
          s3[0] += w * indicator * root3 * norm_dj_a * norm_dj;
          s3[1] += w * root3 * norm_tdj_a * norm_dj;
          s3[2] += w * root3 * norm_dj_a * norm_tdj;
          s3[3] += w * root3 * norm_tdj_a * norm_tdj;
          s4[0] += w * indicator * root4 * norm_dj_a * norm_dj;
          s4[1] += w * root4 * norm_tdj_a * norm_dj;
          s4[2] += w * root4 * norm_dj_a * norm_tdj;
          s4[3] += w * root4 * norm_tdj_a * norm_tdj;
        }
      }
      for (int g = 0; g < 4; ++g) {
        out.gamma3_groups[g] += prob * s3[g] * s3[g];
        out.gamma4_groups[g] += prob * s4[g] * s4[g];
      }
    }
  });

  out.gamma3 = std::cbrt(1.5 * out.gamma3_groups[0] +
                         9.0 * (out.gamma3_groups[1] + out.gamma3_groups[2] +
                                out.gamma3_groups[3]));
  out.gamma4 = std::pow(1.5 * out.gamma4_groups[0] +
                            6.75 * (out.gamma4_groups[1] +
                                    out.gamma4_groups[2] +
                                    out.gamma4_groups[3]),
                        0.25);
  out.sigma_term_sq =
      exact_sigma_term_sq(f, exact_covariance_matrix(f, law, n, caps), law, n,
                          caps);
  return out;
}

}  // namespace steinmc
