#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "steinmc/bounds.hpp"
#include "steinmc/functional.hpp"
#include "steinmc/gamma.hpp"

namespace steinmc {

// Directed k-nearest-neighbour structure under the Euclidean distance.
struct KnnGraph {
  std::size_t k = 0;
  std::vector<std::vector<std::size_t>> neighbors;  // per point, sorted by distance
  std::vector<double> kth_distance;
  bool tie_jittered = false;  // duplicate points were perturbed
};

KnnGraph knn_graph(const CoordView& points, std::size_t k);

// Undirected interaction graph certifying which pairs can jointly affect
// a k-NN statistic under resampling: edges are the cliques over the
// closed (k+1)-neighbourhoods.  Requires n > k+1.
struct InteractionGraph {
  std::size_t n_vertices = 0;
  std::size_t k = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // i < j
  std::vector<std::size_t> degree;
  bool tie_jittered = false;
};

InteractionGraph interaction_rule_graph(const CoordView& points,
                                        std::size_t k);

// delta = 1 + degree of vertex 0 in the interaction graph on the extended
// sample (n + 4 points from the same law).
std::size_t delta_statistic(const CoordView& extended_points, std::size_t k);

// Covering number by 60-degree cones: exact for m in {1, 2}; for m >= 3 a
// greedy spherical-cap covering certified on random directions, or the
// caller's override (any valid upper bound keeps the theorems valid).
std::size_t alpha_cones(unsigned m, std::size_t override_value = 0);

// Plain-text point-set replay records (dimension, count, seed,
// coordinates at 17 significant digits).
std::string points_to_text(const CoordView& points, std::uint64_t seed);
CoordMatrix points_from_text(const std::string& text, std::uint64_t* seed);

// f(x) = n^{-1/2} sum_l f_l where f_l depends on x_l and its k nearest
// neighbours: components are indicator features 1[r_l^(k) <= t_c] of the
// k-NN ball radius, minus the centering constants.
Functional make_knn_indicator_functional(std::size_t n, unsigned m,
                                         std::size_t k,
                                         std::vector<double> thresholds,
                                         Eigen::VectorXd center);

// Integer-valued feature totals (before scaling/centering); used by the
// bit-exact noninteraction checks and by the functional itself.
Eigen::VectorXi knn_indicator_counts(const CoordView& points, std::size_t k,
                                     std::span<const double> thresholds);

// Noninteraction identity f(x) - f(x^j) = f(x^i) - f(x^ij), verified on
// the integer feature totals (exact).
bool noninteracting_pair_exact(const CoordView& points,
                               std::span<const double> replacement_i,
                               std::span<const double> replacement_j,
                               std::size_t i, std::size_t j, std::size_t k,
                               std::span<const double> thresholds);

// One-pass statistics of the indicator functional under single-slot
// resampling: M = max_j ||Delta_j f(X)|| with one fresh X', and
// M_f = max_l ||f_l|| over the base and all resampled configurations.
// Shares the base k-NN radii across all j, so one call costs O(n^2).
struct KnnDeltaStats {
  double max_delta_norm = 0.0;  // M
  double max_summand_norm = 0.0;  // M_f
};

KnnDeltaStats knn_delta_stats(const CoordMatrix& x, const CoordMatrix& x_prime,
                              std::size_t k, std::span<const double> thresholds,
                              double scale, const Eigen::VectorXd& center);

struct KnnReportOptions {
  std::size_t moment_replicates = 200;  // for EM^8, EM^10, EM^12; 0 skips
                                        // the M block and bounds 4.1-4.3
  std::size_t delta_replicates = 2000;  // for E delta^4
  std::size_t eta_replicates = 64;      // for eta_p
  std::size_t gamma_reps = 20000;       // for gamma_1, gamma_2; 0 skips
  double c_config = 1.0;                // the unspecified universal constant
  unsigned workers = 1;
};

struct LocalDependenceReport {
  double delta_moment4 = 0.0;  // E delta^4
  double m8 = 0.0, m10 = 0.0, m12 = 0.0;
  double eta_p = 0.0;
  double p = 0.0;
  std::size_t alpha_d = 0;
  std::size_t n = 0, k = 0;
  double gamma1 = 0.0, gamma2 = 0.0;
  double sigma_inv_opnorm = 0.0;
  double c_config = 1.0;
  // Assembled right-hand sides keyed by their display tags.
  std::map<std::string, double> bounds;
  // Empirical max of M against the structural bound 4 n^{-1/2} alpha k M_f.
  double max_m_observed = 0.0;
  double m_structural_bound = 0.0;
  bool m_bound_ok = false;
  std::uint64_t seed = 0;
};

// Estimates the local-dependence ingredients for the k-NN indicator
// functional family and assembles the smooth and convex report values.
LocalDependenceReport knn_bound_report(std::size_t n, unsigned m,
                                       std::size_t k, double p,
                                       std::span<const double> thresholds,
                                       const KnnReportOptions& opts,
                                       RngStream rng);

}  // namespace steinmc
