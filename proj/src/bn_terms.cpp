#include "steinmc/bn_terms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "steinmc/parallel.hpp"
#include "steinmc/resample.hpp"

namespace steinmc {

namespace {

constexpr std::size_t kTouchedSlots = 3;

char source_char(Source s) {
  switch (s) {
    case Source::base: return 'b';
    case Source::prime: return 'p';
    default: return 't';
  }
}

Source source_from_index(std::size_t v) {
  return v == 0 ? Source::base : (v == 1 ? Source::prime : Source::tilde);
}

RecombinedVector apply_pattern(const SampleBatch& batch,
                               const RolePattern& pattern) {
  RecombinedVector view(batch);
  for (std::size_t i = 0; i < batch.n(); ++i)
    view.set_source(i, pattern.at(i));
  return view;
}

// Delta_{a,b} f(Z) = f(Z) - f(Z^a) - f(Z^b) + f(Z^{a,b}), evaluated as a
// difference of two slot deltas so exact-delta functionals cancel
// bit-exactly.
Eigen::VectorXd second_difference(const Functional& f,
                                  const RecombinedVector& z, std::size_t a,
                                  std::size_t b) {
  const SampleBatch& batch = z.batch();
  const Eigen::VectorXd first =
      f.slot_delta(z, a, z.row(a), batch.x_prime.row(a));
  RecombinedVector zb = z;
  zb.set_source(b, Source::prime);
  const Eigen::VectorXd second =
      f.slot_delta(zb, a, z.row(a), batch.x_prime.row(a));
  return first - second;
}

std::vector<RolePattern> structured_patterns(std::size_t n,
                                             std::size_t random_patterns,
                                             RngStream& rng) {
  std::vector<RolePattern> out;
  const std::size_t head_slots = std::min(kTouchedSlots, n);
  std::size_t head_count = 1;
  for (std::size_t s = 0; s < head_slots; ++s) head_count *= 3;
  for (std::size_t tail = 0; tail < 3; ++tail) {
    for (std::size_t code = 0; code < head_count; ++code) {
      RolePattern p;
      p.tail = source_from_index(tail);
      std::size_t c = code;
      for (std::size_t s = 0; s < head_slots; ++s) {
        p.head.push_back(source_from_index(c % 3));
        c /= 3;
      }
      out.push_back(std::move(p));
    }
  }
  for (std::size_t k = 0; k < random_patterns; ++k) {
    RolePattern p;
    p.full.resize(n);
    for (std::size_t s = 0; s < n; ++s)
      p.full[s] = source_from_index(rng.uniform_index(3));
    out.push_back(std::move(p));
  }
  return out;
}

struct RoleTables {
  // [option][draw]
  std::vector<std::vector<double>> ind01;  // Delta_{0,1} f != 0
  std::vector<std::vector<double>> ind02;  // Delta_{0,2} f != 0
  std::array<std::vector<std::vector<double>>, 3> normsq;  // ||Delta_s f||^2
};

struct SearchResult {
  double value = 0.0;
  double std_error = 0.0;
  std::string label;
};

std::vector<std::size_t> top_indices(const std::vector<std::vector<double>>& t,
                                     std::size_t k) {
  std::vector<double> score(t.size(), 0.0);
  for (std::size_t o = 0; o < t.size(); ++o)
    score[o] = pairwise_sum(t[o]);
  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return score[a] > score[b];
                   });
  order.resize(std::min(k, order.size()));
  return order;
}

SearchResult maximize_product(
    const std::vector<std::vector<double>>& ind_a,
    const std::vector<std::vector<double>>* ind_b,
    const std::vector<std::vector<double>>& norm_a,
    const std::vector<std::vector<double>>& norm_b,
    const std::vector<RolePattern>& patterns, std::size_t top_k) {
  const std::size_t draws = ind_a.front().size();
  const auto ya = top_indices(ind_a, top_k);
  std::vector<std::size_t> yb{0};
  if (ind_b) yb = top_indices(*ind_b, top_k);
  const auto za = top_indices(norm_a, top_k);
  const auto zb = top_indices(norm_b, top_k);

  SearchResult best;
  std::vector<double> products(draws);
  for (std::size_t y : ya) {
    for (std::size_t yp : yb) {
      for (std::size_t z : za) {
        for (std::size_t zp : zb) {
          double total = 0.0;
          for (std::size_t r = 0; r < draws; ++r) {
            double v = ind_a[y][r] * norm_a[z][r] * norm_b[zp][r];
            if (ind_b) v *= (*ind_b)[yp][r];
            products[r] = v;
            total += v;
          }
          const double mean = total / static_cast<double>(draws);
          if (mean > best.value) {
            double var = 0.0;
            for (double v : products) var += (v - mean) * (v - mean);
            best.value = mean;
            best.std_error = std::sqrt(
                var / (static_cast<double>(draws) *
                       (static_cast<double>(draws) - 1.0)));
            best.label = "Y=" + patterns[y].label() +
                         (ind_b ? " Y'=" + patterns[yp].label() : "") +
                         " Z=" + patterns[z].label() +
                         " Z'=" + patterns[zp].label();
          }
        }
      }
    }
  }
  return best;
}

BnTerms run_bn_search(const Functional& f, const BatchSampler& sampler,
                      std::size_t n, const BnOptions& opts, RngStream rng,
                      const std::vector<RolePattern>& y_patterns,
                      const std::vector<RolePattern>& other_patterns) {
  if (!f.symmetric())
    throw std::invalid_argument(
        "estimate_bn_terms: the recombination lemma requires a symmetric "
        "functional");
  if (n < 3)
    throw std::invalid_argument("estimate_bn_terms: need n >= 3");

  const std::size_t draws = opts.frozen_draws;
  const double tol = opts.zero_tolerance;

  RoleTables y_tab;
  y_tab.ind01.assign(y_patterns.size(), std::vector<double>(draws, 0.0));
  y_tab.ind02.assign(y_patterns.size(), std::vector<double>(draws, 0.0));
  RoleTables z_tab;
  for (auto& t : z_tab.normsq)
    t.assign(other_patterns.size(), std::vector<double>(draws, 0.0));
  std::vector<double> d1_fourth(draws, 0.0);

  parallel_for(draws, opts.workers, [&](std::size_t r) {
    RngStream stream = rng.substream(r);
    const SampleBatch batch = sampler(stream);
    for (std::size_t o = 0; o < y_patterns.size(); ++o) {
      RecombinedVector view = apply_pattern(batch, y_patterns[o]);
      const Eigen::VectorXd d01 = second_difference(f, view, 0, 1);
      const Eigen::VectorXd d02 = second_difference(f, view, 0, 2);
      y_tab.ind01[o][r] = d01.cwiseAbs().maxCoeff() > tol ? 1.0 : 0.0;
      y_tab.ind02[o][r] = d02.cwiseAbs().maxCoeff() > tol ? 1.0 : 0.0;
    }
    for (std::size_t o = 0; o < other_patterns.size(); ++o) {
      RecombinedVector view = apply_pattern(batch, other_patterns[o]);
      for (std::size_t s = 0; s < 3; ++s) {
        const Eigen::VectorXd ds =
            f.slot_delta(view, s, view.row(s), batch.x_prime.row(s));
        z_tab.normsq[s][o][r] = ds.squaredNorm();
      }
    }
    RecombinedVector base(batch);
    const Eigen::VectorXd d1 =
        f.slot_delta(base, 0, base.row(0), batch.x_prime.row(0));
    const double sq = d1.squaredNorm();
    d1_fourth[r] = sq * sq;
  });

  const std::size_t top_k = opts.search_top_k;
  const SearchResult bn = maximize_product(
      y_tab.ind01, nullptr, z_tab.normsq[0], z_tab.normsq[1], y_patterns,
      top_k);
  // For B_n' the argmax search uses the Y tables for both indicator roles.
  const SearchResult bn_prime = maximize_product(
      y_tab.ind01, &y_tab.ind02, z_tab.normsq[1], z_tab.normsq[2],
      y_patterns, top_k);

  BnTerms out;
  out.bn = {bn.value, bn.std_error, draws, false};
  out.bn_prime = {bn_prime.value, bn_prime.std_error, draws, false};
  out.argmax_bn = bn.label;
  out.argmax_bn_prime = bn_prime.label;
  double mean4 = pairwise_sum(d1_fourth) / static_cast<double>(draws);
  double var4 = 0.0;
  for (double v : d1_fourth) var4 += (v - mean4) * (v - mean4);
  out.delta1_fourth = {mean4,
                       std::sqrt(var4 / (static_cast<double>(draws) *
                                         (static_cast<double>(draws) - 1.0))),
                       draws, false};
  const double n_d = static_cast<double>(n);
  out.lemma_bound =
      4.0 * std::sqrt(n_d) *
      (std::sqrt(n_d * out.bn.value) +
       std::sqrt(n_d * n_d * out.bn_prime.value) + std::sqrt(mean4));
  return out;
}

}  // namespace

std::string RolePattern::label() const {
  std::string out;
  if (!full.empty()) {
    out = "full:";
    for (Source s : full) out.push_back(source_char(s));
    return out;
  }
  out = "head:";
  for (Source s : head) out.push_back(source_char(s));
  out += "/tail:";
  out.push_back(source_char(tail));
  return out;
}

BnTerms estimate_bn_terms(const Functional& f, const BatchSampler& sampler,
                          std::size_t n, const BnOptions& opts, RngStream rng) {
  RngStream pattern_rng = rng.substream(0xb1);
  const std::vector<RolePattern> patterns =
      structured_patterns(n, opts.random_patterns, pattern_rng);
  std::vector<RolePattern> other_patterns = patterns;
  if (opts.magnitude_roles_uniform_only) {
    other_patterns.clear();
    for (std::size_t tail = 0; tail < 3; ++tail) {
      RolePattern p;
      p.tail = source_from_index(tail);
      other_patterns.push_back(std::move(p));
    }
  }
  return run_bn_search(f, sampler, n, opts, rng.substream(0xb2), patterns,
                       other_patterns);
}

BnTerms estimate_bn_terms_exhaustive_y(const Functional& f,
                                       const BatchSampler& sampler,
                                       std::size_t n, const BnOptions& opts,
                                       RngStream rng) {
  if (n > 8)
    throw EnumerationCapError(
        "estimate_bn_terms_exhaustive_y: 3^n enumeration limited to n <= 8");
  std::vector<RolePattern> y_patterns;
  std::size_t count = 1;
  for (std::size_t s = 0; s < n; ++s) count *= 3;
  y_patterns.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    RolePattern p;
    p.full.resize(n);
    std::size_t c = code;
    for (std::size_t s = 0; s < n; ++s) {
      p.full[s] = source_from_index(c % 3);
      c /= 3;
    }
    y_patterns.push_back(std::move(p));
  }
  // Magnitude roles stay on the uniform fills; the 3^n sweep covers the
  // indicator role, which is where the recombination choice bites.
  std::vector<RolePattern> other_patterns;
  for (std::size_t tail = 0; tail < 3; ++tail) {
    RolePattern p;
    p.tail = source_from_index(tail);
    other_patterns.push_back(std::move(p));
  }
  BnOptions all = opts;
  all.search_top_k = y_patterns.size();
  return run_bn_search(f, sampler, n, all, rng.substream(0xb2), y_patterns,
                       other_patterns);
}

}  // namespace steinmc
