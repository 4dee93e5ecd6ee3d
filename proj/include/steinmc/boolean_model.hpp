#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "steinmc/functional.hpp"
#include "steinmc/gamma.hpp"

namespace steinmc {

// Binomial germ-grain model: n germs uniform in a cube of volume n,
// grains are balls of a fixed radius (grains are not clipped to the cube).
struct GermGrainScene {
  int d = 1;
  std::size_t n = 0;
  double radius = 0.0;
  std::uint64_t seed = 0;
  CoordMatrix germs;  // n x d

  double side_length() const;  // n^(1/d)
};

GermGrainScene sample_scene(int d, std::size_t n, double radius,
                            std::uint64_t seed);

// (V_0, ..., V_d) of the grain union; exact arithmetic-geometric kernels.
Eigen::VectorXd intrinsic_volumes(const GermGrainScene& scene);
Eigen::VectorXd intrinsic_volumes_1d(const CoordView& germs, double radius);
Eigen::VectorXd intrinsic_volumes_2d(const CoordView& germs, double radius);

// Statistic fed to the bound machinery:
//   f(germs) = n^{-1/2} (V(union) - center).
// The centering constants cancel in every difference operator.
Functional boolean_functional(int d, std::size_t n, double radius,
                              Eigen::VectorXd center);

// Coordinate sampler matching the scene law (uniform germs in the cube).
BatchSampler boolean_batch_sampler(int d, std::size_t n, double radius);
CoordDraw boolean_coord_draw(int d, std::size_t n);

// Sample covariance of W = f(X) over independent scenes.
Eigen::MatrixXd empirical_covariance(const Functional& f, std::size_t n,
                                     std::size_t dim, const CoordDraw& draw,
                                     std::size_t replicates, RngStream rng,
                                     unsigned workers = 1);

// Empirical mean of the raw intrinsic-volume vector over a pilot block.
Eigen::VectorXd pilot_center(int d, std::size_t n, double radius,
                             std::size_t replicates, RngStream rng,
                             unsigned workers = 1);

// Exact E(V_0, V_1) for d = 1 through the inclusion-exclusion series with
// closed-form interval-intersection integrals; requires 2R <= n.
Eigen::VectorXd exact_mean_1d(std::size_t n, double radius);

// Exact covariance matrix of W = n^{-1/2}(V_0, V_1) for d = 1, through
// quadrature of the pair-coverage and exposed-endpoint integrals (the
// unbounded-domain parts reduce to pushforward integrals of the coverage
// weights, the interaction strips to low-dimensional piecewise-smooth
// integrals).  Requires 4R <= n.
Eigen::MatrixXd exact_covariance_1d(std::size_t n, double radius);

// Plain-text scene records (17 significant digits) for replay.
std::string scene_to_text(const GermGrainScene& scene);
GermGrainScene scene_from_text(const std::string& text);

}  // namespace steinmc
