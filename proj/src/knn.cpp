#include "steinmc/knn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <numeric>
#include <sstream>

#include "steinmc/parallel.hpp"

namespace steinmc {

namespace {

double dist_sq(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double diff = a[c] - b[c];
    acc += diff * diff;
  }
  return acc;
}

std::vector<double> flatten(const CoordView& points) {
  std::vector<double> flat(points.size() * points.dim());
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto row = points.row(i);
    std::copy(row.begin(), row.end(), flat.begin() + i * points.dim());
  }
  return flat;
}

// Deterministic tie-breaking jitter derived from the coordinates.
void jitter_points(std::vector<double>& flat, double scale) {
  std::uint64_t h = 0x452821e638d01377ULL;
  for (double v : flat) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  for (double& v : flat) {
    v += scale *
         (static_cast<double>(splitmix64(h) >> 11) * 0x1.0p-53 - 0.5);
  }
}

struct FlatPoints {
  const double* data;
  std::size_t n;
  std::size_t dim;
  std::span<const double> row(std::size_t i) const {
    return {data + i * dim, dim};
  }
};

bool build_knn(const FlatPoints& pts, std::size_t k, KnnGraph& graph) {
  const std::size_t n = pts.n;
  graph.k = k;
  graph.neighbors.assign(n, {});
  graph.kth_distance.assign(n, 0.0);
  std::vector<std::pair<double, std::size_t>> cand(n - 1);
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == l) continue;
      cand[idx++] = {dist_sq(pts.row(l), pts.row(j)), j};
    }
    std::partial_sort(cand.begin(), cand.begin() + k + (k < n - 1 ? 1 : 0),
                      cand.end());
    for (std::size_t t = 0; t + 1 < std::min(k + 1, n - 1); ++t)
      if (cand[t].first == cand[t + 1].first) return false;  // tie
    auto& list = graph.neighbors[l];
    list.resize(k);
    for (std::size_t t = 0; t < k; ++t) list[t] = cand[t].second;
    graph.kth_distance[l] = std::sqrt(cand[k - 1].first);
  }
  return true;
}

}  // namespace

KnnGraph knn_graph(const CoordView& points, std::size_t k) {
  const std::size_t n = points.size();
  if (n <= k) {
    std::ostringstream msg;
    msg << "knn_graph: need n > k (n=" << n << ", k=" << k << ")";
    throw std::invalid_argument(msg.str());
  }
  std::vector<double> flat = flatten(points);
  FlatPoints pts{flat.data(), n, points.dim()};
  KnnGraph graph;
  if (build_knn(pts, k, graph)) return graph;
  double scale = 0.0;
  for (double v : flat) scale = std::max(scale, std::abs(v));
  jitter_points(flat, 1e-12 * std::max(scale, 1.0));
  if (!build_knn(pts, k, graph))
    throw std::invalid_argument(
        "knn_graph: unresolvable distance ties after jitter");
  graph.tie_jittered = true;
  return graph;
}

InteractionGraph interaction_rule_graph(const CoordView& points,
                                        std::size_t k) {
  // Cliques over the closed (k+1)-neighbourhoods {l} + N_{k+1}(l).  A
  // summand f_l sees its k nearest neighbours; substituting one slot can
  // promote a point by at most one rank, so any pair that jointly affects
  // some f_l across the four resampled configurations lands inside a
  // common closed (k+1)-neighbourhood of one of them, and the rule covers
  // that pair by construction.
  const KnnGraph g = knn_graph(points, k + 1);
  const std::size_t n = points.size();
  InteractionGraph out;
  out.n_vertices = n;
  out.k = k;
  out.tie_jittered = g.tie_jittered;
  out.degree.assign(n, 0);
  std::vector<std::uint8_t> adj(n * n, 0);
  for (std::size_t l = 0; l < n; ++l) {
    std::vector<std::size_t> closed = g.neighbors[l];
    closed.push_back(l);
    for (std::size_t s = 0; s < closed.size(); ++s) {
      for (std::size_t t = s + 1; t < closed.size(); ++t) {
        const std::size_t a = std::min(closed[s], closed[t]);
        const std::size_t b = std::max(closed[s], closed[t]);
        adj[a * n + b] = 1;
      }
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (adj[a * n + b]) {
        out.edges.emplace_back(a, b);
        ++out.degree[a];
        ++out.degree[b];
      }
    }
  }
  return out;
}

std::size_t delta_statistic(const CoordView& extended_points, std::size_t k) {
  const InteractionGraph g = interaction_rule_graph(extended_points, k);
  return 1 + g.degree[0];
}

namespace {

std::vector<Eigen::VectorXd> sphere_candidates(unsigned m, std::size_t count,
                                               std::uint64_t seed) {
  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(count);
  if (m == 2) {
    for (std::size_t i = 0; i < count; ++i) {
      const double a = 2.0 * M_PI * static_cast<double>(i) /
                       static_cast<double>(count);
      Eigen::VectorXd v(2);
      v << std::cos(a), std::sin(a);
      dirs.push_back(v);
    }
    return dirs;
  }
  RngStream rng(seed, 0);
  while (dirs.size() < count) {
    Eigen::VectorXd v(m);
    for (unsigned c = 0; c < m; ++c) v[c] = rng.normal();
    const double norm = v.norm();
    if (norm > 1e-12) dirs.push_back(v / norm);
  }
  return dirs;
}

}  // namespace

std::size_t alpha_cones(unsigned m, std::size_t override_value) {
  if (m == 0) throw std::invalid_argument("alpha_cones: m must be >= 1");
  if (override_value != 0) {
    if (override_value < m + 1) {
      std::ostringstream msg;
      msg << "alpha_cones: override " << override_value
          << " is below the covering lower bound " << (m + 1);
      throw std::invalid_argument(msg.str());
    }
    return override_value;
  }
  if (m == 1) return 2;
  // Greedy cap covering with angular radius 30 degrees; any cover size is
  // a valid upper bound.  m == 2 uses evenly spaced candidates and lands
  // on the tight value 6.
  const double cos_cap = std::cos(M_PI / 6.0);
  const std::size_t candidate_count = m == 2 ? 720 : 4096;
  const std::vector<Eigen::VectorXd> candidates =
      sphere_candidates(m, candidate_count, 0xa1fa);
  std::vector<Eigen::VectorXd> tests;
  if (m == 2) {
    // Half-step offset keeps cap boundaries away from test points, so the
    // greedy gains are exact and the cover tiles at the optimal 6.
    const std::size_t count = 2880;
    for (std::size_t i = 0; i < count; ++i) {
      const double a = 2.0 * M_PI * (static_cast<double>(i) + 0.5) /
                       static_cast<double>(count);
      Eigen::VectorXd v(2);
      v << std::cos(a), std::sin(a);
      tests.push_back(v);
    }
  } else {
    tests = sphere_candidates(m, 20000, 0xa1fb);
  }
  std::vector<std::uint8_t> covered(tests.size(), 0);
  std::vector<Eigen::VectorXd> centers;
  std::size_t uncovered = tests.size();
  while (uncovered > 0) {
    std::size_t best = 0, best_gain = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      std::size_t gain = 0;
      for (std::size_t t = 0; t < tests.size(); ++t)
        if (!covered[t] && candidates[c].dot(tests[t]) >= cos_cap) ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    if (best_gain == 0) break;
    centers.push_back(candidates[best]);
    for (std::size_t t = 0; t < tests.size(); ++t)
      if (!covered[t] && candidates[best].dot(tests[t]) >= cos_cap) {
        covered[t] = 1;
        --uncovered;
      }
  }
  // Certification sweep: every random direction must be inside some cap;
  // stragglers become centers of their own.
  RngStream rng(0xa1fc, m);
  const std::size_t certify = 1000000;
  for (std::size_t t = 0; t < certify; ++t) {
    Eigen::VectorXd v(m);
    for (unsigned c = 0; c < m; ++c) v[c] = rng.normal();
    const double norm = v.norm();
    if (norm < 1e-12) continue;
    v /= norm;
    bool ok = false;
    for (const auto& center : centers)
      if (center.dot(v) >= cos_cap) {
        ok = true;
        break;
      }
    if (!ok) centers.push_back(v);
  }
  return centers.size();
}

std::string points_to_text(const CoordView& points, std::uint64_t seed) {
  std::ostringstream out;
  out.precision(17);
  out << "dim " << points.dim() << "\n";
  out << "count " << points.size() << "\n";
  out << "seed " << seed << "\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto row = points.row(i);
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c == 0 ? "" : " ") << row[c];
    out << "\n";
  }
  return out.str();
}

CoordMatrix points_from_text(const std::string& text, std::uint64_t* seed) {
  std::istringstream in(text);
  std::string key;
  std::size_t dim = 0, count = 0;
  std::uint64_t parsed_seed = 0;
  in >> key >> dim;
  if (key != "dim")
    throw std::invalid_argument("points_from_text: expected 'dim'");
  in >> key >> count;
  if (key != "count")
    throw std::invalid_argument("points_from_text: expected 'count'");
  in >> key >> parsed_seed;
  if (key != "seed")
    throw std::invalid_argument("points_from_text: expected 'seed'");
  CoordMatrix out(count, dim);
  for (std::size_t i = 0; i < count; ++i) {
    auto row = out.mutable_row(i);
    for (std::size_t c = 0; c < dim; ++c) {
      if (!(in >> row[c]))
        throw std::invalid_argument("points_from_text: truncated point list");
    }
  }
  if (seed) *seed = parsed_seed;
  return out;
}

Eigen::VectorXi knn_indicator_counts(const CoordView& points, std::size_t k,
                                     std::span<const double> thresholds) {
  const KnnGraph g = knn_graph(points, k);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(thresholds.size());
  for (std::size_t l = 0; l < points.size(); ++l)
    for (std::size_t c = 0; c < thresholds.size(); ++c)
      if (g.kth_distance[l] <= thresholds[c]) ++counts[c];
  return counts;
}

namespace {

// Count change when slot j moves from row_a to row_b; only points whose
// k-NN ball is touched by either position can change, and those are
// recomputed from scratch.
Eigen::VectorXi count_difference(const CoordView& v, std::size_t j,
                                 std::span<const double> row_a,
                                 std::span<const double> row_b, std::size_t k,
                                 std::span<const double> thresholds) {
  const std::size_t n = v.size();
  const std::size_t dim = v.dim();
  std::vector<double> flat(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = i == j ? row_a : v.row(i);
    std::copy(row.begin(), row.end(), flat.begin() + i * dim);
  }
  FlatPoints pts{flat.data(), n, dim};

  // k-th nearest distance to `from` among all points except `exclude`,
  // with point j read from `at_j`.
  auto kth_from = [&](std::span<const double> from, std::size_t exclude,
                      std::span<const double> at_j) {
    std::vector<double> d;
    d.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == exclude) continue;
      d.push_back(i == j ? dist_sq(from, at_j) : dist_sq(from, pts.row(i)));
    }
    std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
    return std::sqrt(d[k - 1]);
  };

  auto features = [&](double radius, Eigen::VectorXi& acc, int sign) {
    for (std::size_t c = 0; c < thresholds.size(); ++c)
      if (radius <= thresholds[c]) acc[c] += sign;
  };

  // Accumulates counts(config a) - counts(config b).
  Eigen::VectorXi diff = Eigen::VectorXi::Zero(thresholds.size());
  features(kth_from(row_a, j, row_a), diff, +1);
  features(kth_from(row_b, j, row_b), diff, -1);
  // Other points: skip those whose radius cannot have changed.
  for (std::size_t l = 0; l < n; ++l) {
    if (l == j) continue;
    const double r_a = kth_from(pts.row(l), l, row_a);
    const double da = std::sqrt(dist_sq(pts.row(l), row_a));
    const double db = std::sqrt(dist_sq(pts.row(l), row_b));
    if (da > r_a && db > r_a) continue;
    const double r_b = kth_from(pts.row(l), l, row_b);
    features(r_a, diff, +1);
    features(r_b, diff, -1);
  }
  return diff;
}

}  // namespace

KnnDeltaStats knn_delta_stats(const CoordMatrix& x, const CoordMatrix& x_prime,
                              std::size_t k, std::span<const double> thresholds,
                              double scale, const Eigen::VectorXd& center) {
  const std::size_t n = x.size();
  const std::size_t dim = x.dim();
  const double n_d = static_cast<double>(n);
  FlatPoints pts{x.data().data(), n, dim};

  // k-th nearest distance to `from` among all points except `exclude`,
  // with the point at `swap` read from `swap_row` when swap != exclude.
  auto kth_from = [&](std::span<const double> from, std::size_t exclude,
                      std::size_t swap, std::span<const double> swap_row) {
    std::vector<double> d;
    d.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == exclude) continue;
      d.push_back(i == swap ? dist_sq(from, swap_row)
                            : dist_sq(from, pts.row(i)));
    }
    std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
    return std::sqrt(d[k - 1]);
  };

  auto summand_norm = [&](double radius) {
    double acc = 0.0;
    for (std::size_t c = 0; c < thresholds.size(); ++c) {
      const double feat =
          (radius <= thresholds[c] ? 1.0 : 0.0) - center[c] / n_d;
      acc += feat * feat;
    }
    return std::sqrt(acc);
  };

  std::vector<double> base_radius(n);
  KnnDeltaStats stats;
  for (std::size_t l = 0; l < n; ++l) {
    base_radius[l] = kth_from(pts.row(l), l, l, {});
    stats.max_summand_norm =
        std::max(stats.max_summand_norm, summand_norm(base_radius[l]));
  }

  std::vector<int> diff(thresholds.size());
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(diff.begin(), diff.end(), 0);
    auto add = [&](double radius, int sign) {
      for (std::size_t c = 0; c < thresholds.size(); ++c)
        if (radius <= thresholds[c]) diff[c] += sign;
    };
    add(base_radius[j], +1);
    const double r_j_new = kth_from(x_prime.row(j), j, j, {});
    add(r_j_new, -1);
    stats.max_summand_norm =
        std::max(stats.max_summand_norm, summand_norm(r_j_new));
    for (std::size_t l = 0; l < n; ++l) {
      if (l == j) continue;
      const double da = std::sqrt(dist_sq(pts.row(l), x.row(j)));
      const double db = std::sqrt(dist_sq(pts.row(l), x_prime.row(j)));
      if (da > base_radius[l] && db > base_radius[l]) continue;
      add(base_radius[l], +1);
      const double r_l_new = kth_from(pts.row(l), l, j, x_prime.row(j));
      add(r_l_new, -1);
      stats.max_summand_norm =
          std::max(stats.max_summand_norm, summand_norm(r_l_new));
    }
    double norm_sq = 0.0;
    for (int v : diff) norm_sq += double(v) * double(v);
    stats.max_delta_norm =
        std::max(stats.max_delta_norm, scale * std::sqrt(norm_sq));
  }
  return stats;
}

Functional make_knn_indicator_functional(std::size_t n, unsigned m,
                                         std::size_t k,
                                         std::vector<double> thresholds,
                                         Eigen::VectorXd center) {
  if (center.size() != static_cast<Eigen::Index>(thresholds.size()))
    throw std::invalid_argument(
        "make_knn_indicator_functional: center/threshold size mismatch");
  const int d_out = static_cast<int>(thresholds.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  auto thresholds_ptr =
      std::make_shared<const std::vector<double>>(std::move(thresholds));
  Functional f(
      d_out,
      [k, scale, d_out, thresholds_ptr, center](const CoordView& points,
                                                Eigen::VectorXd& out) {
        const Eigen::VectorXi counts =
            knn_indicator_counts(points, k, *thresholds_ptr);
        out.resize(d_out);
        for (int c = 0; c < d_out; ++c)
          out[c] = scale * (static_cast<double>(counts[c]) - center[c]);
      },
      /*symmetric=*/true, "knn-indicator");
  f.set_exact_delta([k, scale, d_out, thresholds_ptr](
                        const CoordView& v, std::size_t j,
                        std::span<const double> a, std::span<const double> b,
                        Eigen::VectorXd& out) {
    const Eigen::VectorXi diff =
        count_difference(v, j, a, b, k, *thresholds_ptr);
    out.resize(d_out);
    for (int c = 0; c < d_out; ++c)
      out[c] = scale * static_cast<double>(diff[c]);
  });
  (void)m;
  return f;
}

bool noninteracting_pair_exact(const CoordView& points,
                               std::span<const double> replacement_i,
                               std::span<const double> replacement_j,
                               std::size_t i, std::size_t j, std::size_t k,
                               std::span<const double> thresholds) {
  const std::size_t n = points.size();
  const std::size_t dim = points.dim();
  CoordMatrix base(n, dim);
  for (std::size_t l = 0; l < n; ++l) {
    auto row = base.mutable_row(l);
    auto src = points.row(l);
    std::copy(src.begin(), src.end(), row.begin());
  }
  auto with = [&](bool sub_i, bool sub_j) {
    CoordMatrix mat = base;
    if (sub_i) {
      auto row = mat.mutable_row(i);
      std::copy(replacement_i.begin(), replacement_i.end(), row.begin());
    }
    if (sub_j) {
      auto row = mat.mutable_row(j);
      std::copy(replacement_j.begin(), replacement_j.end(), row.begin());
    }
    return knn_indicator_counts(mat, k, thresholds);
  };
  const Eigen::VectorXi lhs = with(false, false) - with(false, true);
  const Eigen::VectorXi rhs = with(true, false) - with(true, true);
  return (lhs.array() == rhs.array()).all();
}

LocalDependenceReport knn_bound_report(std::size_t n, unsigned m,
                                       std::size_t k, double p,
                                       std::span<const double> thresholds,
                                       const KnnReportOptions& opts,
                                       RngStream rng) {
  if (p < 8.0)
    throw std::invalid_argument(
        "knn_bound_report: the smooth bounds require p >= 8");
  const std::size_t d_out = thresholds.size();
  const double alpha = static_cast<double>(alpha_cones(m));
  const double n_d = static_cast<double>(n);
  const double k_d = static_cast<double>(k);

  LocalDependenceReport report;
  report.n = n;
  report.k = k;
  report.p = p;
  report.alpha_d = static_cast<std::size_t>(alpha);
  report.c_config = opts.c_config;
  report.seed = rng.master_seed();

  const CoordDraw draw = [](RngStream& stream, std::span<double> row) {
    for (double& c : row) c = stream.uniform();
  };
  std::vector<double> thresholds_copy(thresholds.begin(), thresholds.end());

  // Pilot centering block (independent seed stream).
  Eigen::VectorXd center = Eigen::VectorXd::Zero(d_out);
  {
    RngStream pilot = rng.substream(0x9101);
    const std::size_t pilot_reps = std::max<std::size_t>(opts.eta_replicates, 32);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d_out);
    for (std::size_t rep = 0; rep < pilot_reps; ++rep) {
      RngStream stream = pilot.substream(rep);
      CoordMatrix x(n, m);
      for (std::size_t i = 0; i < n; ++i) draw(stream, x.mutable_row(i));
      const Eigen::VectorXi counts =
          knn_indicator_counts(x, k, thresholds_copy);
      for (std::size_t c = 0; c < d_out; ++c) acc[c] += counts[c];
    }
    center = acc / static_cast<double>(pilot_reps);
  }
  Functional f =
      make_knn_indicator_functional(n, m, k, thresholds_copy, center);
  const BatchSampler sampler = make_iid_sampler(n, m, draw);

  // eta_p and the empirical covariance of W.
  {
    RngStream eta_rng = rng.substream(0x9102);
    const std::size_t reps = opts.eta_replicates;
    std::vector<double> eta_slots(reps);
    Eigen::MatrixXd w_samples(reps, d_out);
    parallel_for(reps, opts.workers, [&](std::size_t rep) {
      RngStream stream = eta_rng.substream(rep);
      CoordMatrix x(n, m);
      for (std::size_t i = 0; i < n; ++i) draw(stream, x.mutable_row(i));
      const KnnGraph g = knn_graph(x, k);
      // Summand moments, pooled across l (the coordinates are
      // exchangeable).
      double acc = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        double norm_sq = 0.0;
        for (std::size_t c = 0; c < d_out; ++c) {
          const double feat =
              (g.kth_distance[l] <= thresholds_copy[c] ? 1.0 : 0.0) -
              center[c] / n_d;
          norm_sq += feat * feat;
        }
        acc += std::pow(norm_sq, 0.5 * p);
      }
      eta_slots[rep] = acc / n_d;
      Eigen::VectorXd w;
      f.eval_into(x, w);
      w_samples.row(rep) = w.transpose();
    });
    report.eta_p = pairwise_sum(eta_slots) / static_cast<double>(reps);
    const Eigen::RowVectorXd mean = w_samples.colwise().mean();
    const Eigen::MatrixXd centered = w_samples.rowwise() - mean;
    const Eigen::MatrixXd sigma =
        centered.transpose() * centered / static_cast<double>(reps - 1);
    const MatrixNorms norms = matrix_norms(sigma);
    report.sigma_inv_opnorm = norms.inv_op_norm;
  }

  // E delta^4 on the extended sample.
  {
    RngStream delta_rng = rng.substream(0x9103);
    const std::size_t reps = opts.delta_replicates;
    std::vector<double> slots(reps);
    parallel_for(reps, opts.workers, [&](std::size_t rep) {
      RngStream stream = delta_rng.substream(rep);
      CoordMatrix x(n + 4, m);
      for (std::size_t i = 0; i < n + 4; ++i) draw(stream, x.mutable_row(i));
      const double delta = static_cast<double>(delta_statistic(x, k));
      slots[rep] = delta * delta * delta * delta;
    });
    report.delta_moment4 = pairwise_sum(slots) / static_cast<double>(reps);
  }

  // M moments and the structural M bound.
  if (opts.moment_replicates > 0) {
    RngStream m_rng = rng.substream(0x9104);
    const std::size_t reps = opts.moment_replicates;
    const double scale = 1.0 / std::sqrt(n_d);
    std::vector<double> m8(reps), m10(reps), m12(reps), mf_ratio(reps);
    parallel_for(reps, opts.workers, [&](std::size_t rep) {
      RngStream stream = m_rng.substream(rep);
      SampleBatch batch = sampler(stream);
      const KnnDeltaStats stats = knn_delta_stats(
          batch.x, batch.x_prime, k, thresholds_copy, scale, center);
      const double m2 = stats.max_delta_norm * stats.max_delta_norm;
      m8[rep] = m2 * m2 * m2 * m2;
      m10[rep] = m8[rep] * m2;
      m12[rep] = m10[rep] * m2;
      mf_ratio[rep] = stats.max_delta_norm <=
                              4.0 / std::sqrt(n_d) * alpha * k_d *
                                  stats.max_summand_norm
                          ? 0.0
                          : 1.0;
    });
    report.m8 = pairwise_sum(m8) / static_cast<double>(reps);
    report.m10 = pairwise_sum(m10) / static_cast<double>(reps);
    report.m12 = pairwise_sum(m12) / static_cast<double>(reps);
    report.max_m_observed = std::pow(
        *std::max_element(m8.begin(), m8.end()), 1.0 / 8.0);
    report.m_structural_bound = 4.0 / std::sqrt(n_d) * alpha * k_d *
                                std::sqrt(static_cast<double>(d_out));
    report.m_bound_ok = pairwise_sum(mf_ratio) == 0.0;
  }

  // gamma_1 and gamma_2 through the generic estimators.
  if (opts.gamma_reps > 0) {
    const Gamma12Result g12 =
        estimate_gamma12(f, sampler, opts.gamma_reps, rng.substream(0x9105),
                         opts.workers);
    report.gamma1 = g12.gamma1.value;
    report.gamma2 = g12.gamma2.value;
  }

  // Assembled report values.
  const double c = opts.c_config;
  const double d4 = std::pow(static_cast<double>(d_out), 4.0);
  const double inv_sq = std::max(1.0, report.sigma_inv_opnorm *
                                          report.sigma_inv_opnorm);
  if (opts.moment_replicates > 0 && opts.gamma_reps > 0) {
    const double m8_term = std::pow(report.m8, 0.25) *
                           std::pow(report.delta_moment4, 0.25) *
                           std::sqrt(n_d);
    report.bounds["4.1"] = c * m8_term + report.gamma1 / 12.0;
    report.bounds["4.2"] = c * report.sigma_inv_opnorm * m8_term +
                           std::sqrt(2.0 * M_PI) / 16.0 *
                               report.sigma_inv_opnorm * report.gamma1;
    const double tilde_g3 = std::pow(report.m10, 1.0 / 6.0) *
                            std::pow(report.delta_moment4, 1.0 / 6.0) *
                            std::pow(n_d, 1.0 / 3.0);
    const double tilde_g4 = std::pow(report.m12, 1.0 / 8.0) *
                            std::pow(report.delta_moment4, 1.0 / 8.0) *
                            std::pow(n_d, 0.25);
    report.bounds["4.3"] =
        c * d4 * inv_sq *
        std::max({m8_term, report.gamma1, report.gamma2, tilde_g3, tilde_g4});
  }

  const double eta = report.eta_p;
  const double a3 = alpha * alpha * alpha;
  const double t1 = a3 * std::pow(k_d, 4.0) * std::pow(eta, 2.0 / p) /
                    std::pow(n_d, (p - 8.0) / (2.0 * p));
  const double t2 = a3 * std::pow(k_d, 3.0) * std::pow(eta, 3.0 / p) /
                    std::pow(n_d, (p - 6.0) / (2.0 * p));
  report.bounds["4.4"] = c * (t1 + t2);
  if (p >= 12.0) {
    const double t3 = alpha * alpha * k_d * k_d * std::pow(eta, 2.0 / p) /
                      std::pow(n_d, (p - 4.0) / (2.0 * p));
    const double t4 = std::pow(alpha, 10.0 / 3.0) * std::pow(k_d, 4.0 / 3.0) *
                      std::pow(eta, 5.0 / (3.0 * p)) /
                      std::pow(n_d, (3.0 * p - 20.0) / (6.0 * p));
    const double t5 = alpha * alpha * std::pow(k_d, 2.5) *
                      std::pow(eta, 3.0 / (2.0 * p)) /
                      std::pow(n_d, (p - 6.0) / (2.0 * p));
    report.bounds["4.5"] =
        c * d4 * inv_sq * std::max({t1, t2, t3, t4, t5});
  }
  return report;
}

}  // namespace steinmc
