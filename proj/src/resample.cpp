#include "steinmc/resample.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace steinmc {

RecombinedVector resample_subset(const SampleBatch& batch,
                                 const std::vector<std::size_t>& a_set) {
  RecombinedVector view(batch);
  for (std::size_t idx : a_set) {
    if (idx >= batch.n()) {
      std::ostringstream msg;
      msg << "resample_subset: index " << idx << " out of range (n="
          << batch.n() << ")";
      throw std::out_of_range(msg.str());
    }
    view.set_source(idx, Source::prime);
  }
  return view;
}

namespace {

void rethrow_with_context(const std::exception& e, std::size_t j,
                          const char* op) {
  std::ostringstream msg;
  msg << op << " (j=" << j << "): " << e.what();
  throw std::runtime_error(msg.str());
}

}  // namespace

Eigen::VectorXd delta_j(const Functional& f, const SampleBatch& batch,
                        std::size_t j) {
  if (j >= batch.n()) throw std::out_of_range("delta_j: index out of range");
  RecombinedVector base(batch);
  try {
    return f.slot_delta(base, j, batch.x.row(j), batch.x_prime.row(j));
  } catch (const std::out_of_range&) {
    throw;
  } catch (const std::exception& e) {
    rethrow_with_context(e, j, "delta_j");
  }
  return {};
}

Eigen::VectorXd delta_j_view(const Functional& f, const RecombinedVector& z,
                             std::size_t j) {
  const SampleBatch& batch = z.batch();
  if (j >= batch.n())
    throw std::out_of_range("delta_j_view: index out of range");
  try {
    return f.slot_delta(z, j, z.row(j), batch.x_prime.row(j));
  } catch (const std::out_of_range&) {
    throw;
  } catch (const std::exception& e) {
    rethrow_with_context(e, j, "delta_j_view");
  }
  return {};
}

Eigen::VectorXd tilde_delta_i_delta_j(const Functional& f,
                                      const SampleBatch& batch, std::size_t i,
                                      std::size_t j) {
  RecombinedVector base(batch);
  return tilde_delta_i_delta_j_view(f, base, i, j);
}

Eigen::VectorXd tilde_delta_i_delta_j_view(const Functional& f,
                                           const RecombinedVector& z,
                                           std::size_t i, std::size_t j) {
  const SampleBatch& batch = z.batch();
  if (i >= batch.n() || j >= batch.n())
    throw std::out_of_range("tilde_delta_i_delta_j: index out of range");
  // X~ substitutes the first-argument slot only; if slot i is already read
  // from X' the operator does not see the base copy and vanishes.
  if (z.source(i) != Source::base)
    return Eigen::VectorXd::Zero(f.dim_out());
  if (i == j) {
    return f.slot_delta(z, i, z.row(i), batch.x_tilde.row(i));
  }
  const Eigen::VectorXd d_base = delta_j_view(f, z, j);
  RecombinedVector z_tilde = z;
  z_tilde.set_source(i, Source::tilde);
  const Eigen::VectorXd d_tilde = delta_j_view(f, z_tilde, j);
  return d_base - d_tilde;
}

SubsetDraw sample_weighted_subset(std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("sample_weighted_subset: n == 0");
  SubsetDraw draw;
  const std::size_t a_size = rng.uniform_index(n);
  // Partial Fisher-Yates for a uniform a_size-subset.
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t t = 0; t < a_size; ++t) {
    std::size_t pick = t + rng.uniform_index(n - t);
    std::swap(pool[t], pool[pick]);
  }
  draw.a_set.assign(pool.begin(), pool.begin() + a_size);
  std::sort(draw.a_set.begin(), draw.a_set.end());
  const std::size_t complement_pick = rng.uniform_index(n - a_size);
  draw.j = pool[a_size + complement_pick];
  draw.weight = subset_weight(static_cast<unsigned>(n),
                              static_cast<unsigned>(a_size));
  return draw;
}

namespace {

// Memoized evaluation over substitution masks: bit b set means slot b is
// read from X'.
class MaskEvaluator {
 public:
  MaskEvaluator(const Functional& f, const SampleBatch& batch)
      : f_(f), batch_(batch), cache_(std::size_t{1} << batch.n()) {}

  const Eigen::VectorXd& eval(std::uint32_t mask) {
    auto& slot = cache_[mask];
    if (slot.size() == 0) {
      RecombinedVector view(batch_);
      for (std::size_t b = 0; b < batch_.n(); ++b)
        if (mask & (std::uint32_t{1} << b)) view.set_source(b, Source::prime);
      Eigen::VectorXd out;
      f_.eval_into(view, out);
      slot = std::move(out);
    }
    return slot;
  }

 private:
  const Functional& f_;
  const SampleBatch& batch_;
  std::vector<Eigen::VectorXd> cache_;
};

}  // namespace

TMatrix t_matrix(const Functional& f, const SampleBatch& batch,
                 TMatrixMode mode, RngStream& rng, const TMatrixOptions& opts) {
  const std::size_t n = batch.n();
  const int d = f.dim_out();
  TMatrix result;
  result.mode = mode;
  result.t = Eigen::MatrixXd::Zero(d, d);

  if (mode == TMatrixMode::exact) {
    if (n > opts.enumeration_cap || n > 20) {
      std::ostringstream msg;
      msg << "t_matrix: exact mode limited to n <= "
          << std::min<std::size_t>(opts.enumeration_cap, 20) << " (got n="
          << n << "); raise the cap or use monte_carlo";
      throw EnumerationCapError(msg.str());
    }
    MaskEvaluator evals(f, batch);
    const std::uint32_t full = (std::uint32_t{1} << n) - 1;
    for (std::uint32_t a_mask = 0; a_mask < full; ++a_mask) {
      const unsigned a_size =
          static_cast<unsigned>(__builtin_popcount(a_mask));
      const double weight =
          subset_weight(static_cast<unsigned>(n), a_size);
      for (std::size_t j = 0; j < n; ++j) {
        const std::uint32_t j_bit = std::uint32_t{1} << j;
        if (a_mask & j_bit) continue;
        const Eigen::VectorXd dj_x = evals.eval(0) - evals.eval(j_bit);
        const Eigen::VectorXd dj_xa =
            evals.eval(a_mask) - evals.eval(a_mask | j_bit);
        result.t.noalias() += (0.5 * weight) * (dj_x * dj_xa.transpose());
        ++result.n_terms;
      }
    }
    return result;
  }

  if (opts.reps == 0)
    throw std::invalid_argument("t_matrix: monte_carlo mode needs reps >= 1");
  RecombinedVector base(batch);
  for (std::size_t rep = 0; rep < opts.reps; ++rep) {
    const SubsetDraw draw = sample_weighted_subset(n, rng);
    RecombinedVector xa = resample_subset(batch, draw.a_set);
    const Eigen::VectorXd dj_x = delta_j_view(f, base, draw.j);
    const Eigen::VectorXd dj_xa = delta_j_view(f, xa, draw.j);
    result.t.noalias() +=
        (0.5 * static_cast<double>(n)) * (dj_x * dj_xa.transpose());
    ++result.n_terms;
  }
  result.t /= static_cast<double>(opts.reps);
  return result;
}

Rational subset_weight_total(unsigned n) {
  Rational total;
  for (unsigned a = 0; a < n; ++a) {
    Rational per_pair = subset_weight_exact(n, a);
    Rational stratum =
        per_pair * Rational(static_cast<__int128>(binomial_u64(n, a)) *
                                static_cast<__int128>(n - a),
                            1);
    total = total + stratum;
  }
  return total;
}

}  // namespace steinmc
